#pragma once

#include <Eigen/Dense>

#include "levelset/revnet.hpp"

namespace levelset {

// d x d matrix whose column i is J_i(z) = dx/dz_i for x = g^{-1}(z).
using JacobianMatrix = Eigen::MatrixXd;

inline constexpr double kDefaultFdEps = 1e-5;

// Central differences of g^{-1}: column i is
// (g^{-1}(z + eps e_i) - g^{-1}(z - eps e_i)) / (2 eps).
JacobianMatrix jacobian_inverse_fd(const RevNetParams& params, const Eigen::VectorXd& z,
                                   double eps = kDefaultFdEps);

// Exact Jacobian of g^{-1} at z: product of the unit-triangular Jacobians of
// the inverse half-steps.
JacobianMatrix jacobian_inverse_analytic(const RevNetParams& params, const Eigen::VectorXd& z);

// Same matrix evaluated at z = g(x), assembled from the states of the forward
// pass on x. Equal to jacobian_inverse_analytic(params, forward(params, x))
// up to round-off; this is the path used by the loss and training.
JacobianMatrix jacobian_inverse_at_input(const RevNetParams& params, const Eigen::VectorXd& x);

struct Determinant {
  double value = 0.0;
  // True when the smallest LU pivot is below working precision relative to the
  // largest; value is still reported.
  bool singular = false;
};

// Signed determinant from a partial-pivot LU factorization.
Determinant det_jacobian(const JacobianMatrix& jac);

// |det| as the product of singular values.
double abs_det_svd(const JacobianMatrix& jac);

// (<grad_f, J_i>)_i, i.e. the partial derivatives of f o g^{-1} in z.
Eigen::VectorXd transformed_directional_derivs(const Eigen::VectorXd& grad_f,
                                               const JacobianMatrix& jac);

}  // namespace levelset
