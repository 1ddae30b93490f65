#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "levelset/calculus.hpp"
#include "levelset/revnet.hpp"
#include "levelset/sample.hpp"

namespace levelset {

// Per-coordinate weights of the orthogonality loss. Coordinates with weight 0
// are active (unconstrained); positive weights push the corresponding Jacobian
// column of g^{-1} onto the level-set tangent space.
struct AnisotropyWeights {
  Eigen::VectorXd omega;

  // Weight 0 on `active`, 1 elsewhere.
  static AnisotropyWeights from_active(int dim, const std::vector<int>& active);

  std::vector<int> active_dims() const;
  std::vector<int> inactive_dims() const;

  // Throws ConfigError on negative or non-finite weights.
  void validate() const;
};

struct LossBreakdown {
  double l1 = 0.0;
  double l2 = 0.0;
  double total = 0.0;
  double lambda = 0.0;
};

inline constexpr double kDefaultLambda = 1.0;

// L1 = sum_s sum_i [ omega_i < J_i / |J_i|, grad f(x_s) > ]^2, with J the
// Jacobian of g^{-1} at z_s = g(x_s). Only the Jacobian columns are
// normalized. Throws DegenerateError if a weighted column has zero norm.
double l1_loss(const RevNetParams& params, std::span<const GradientSample> batch,
               const AnisotropyWeights& weights);

// Mean over the batch of (det J_{g^{-1}}(z_s) - 1)^2.
double l2_loss(const RevNetParams& params, std::span<const GradientSample> batch);

// Mean of (det J - 1)^2 over explicitly supplied Jacobians.
double l2_loss(std::span<const JacobianMatrix> jacobians);

// total = l1 + lambda * l2.
LossBreakdown total_loss(const RevNetParams& params, std::span<const GradientSample> batch,
                         const AnisotropyWeights& weights, double lambda = kDefaultLambda);

// kSum differentiates total_loss as defined above. kMean differentiates
// l1 / batch_size + lambda * l2, which keeps the step size independent of the
// batch size during training.
enum class LossReduction { kSum, kMean };

struct LossGradient {
  LossBreakdown loss;     // always the kSum breakdown
  double objective = 0.0;  // value whose gradient is `grad`
  RevNetGradient grad;
};

// Reverse-mode gradient of the objective with respect to every K1, K2, b1, b2
// entry. The per-sample terms are summed in fixed-size chunks combined in
// chunk order, so the result does not depend on the thread count. Throws
// NumericalError (carrying the block index) on a non-finite gradient.
LossGradient loss_gradient(const RevNetParams& params, std::span<const GradientSample> batch,
                           const AnisotropyWeights& weights, double lambda = kDefaultLambda,
                           LossReduction reduction = LossReduction::kSum);

}  // namespace levelset
