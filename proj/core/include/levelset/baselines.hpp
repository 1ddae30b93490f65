#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <span>
#include <vector>

#include "levelset/sample.hpp"

namespace levelset {

// Orthonormal linear change of coordinates z = A^T x. Columns of A are the
// directions sorted by decreasing importance; eigenvalues follow the same
// order.
struct LinearMap {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd eigenvalues;

  static LinearMap identity(int dim);
  int dim() const { return static_cast<int>(matrix.rows()); }
};

// Eigen-decomposition of C = (1/S) sum_s grad f(x_s) grad f(x_s)^T.
LinearMap active_subspace(std::span<const GradientSample> samples);

inline constexpr int kDefaultSlices = 10;

// Sliced inverse regression: whiten x, slice by sorted y, eigen-decompose the
// weighted covariance of slice means, map back and re-orthonormalize.
// Throws DegenerateError on constant y or a singular sample covariance.
LinearMap sliced_inverse_regression(std::span<const Eigen::VectorXd> xs,
                                    std::span<const double> ys, int n_slices = kDefaultSlices);

Eigen::VectorXd apply_linear(const LinearMap& map, const Eigen::VectorXd& x);
Eigen::VectorXd invert_linear(const LinearMap& map, const Eigen::VectorXd& z);

inline constexpr int kLinearMapSchemaVersion = 1;

void save_linear_map(const LinearMap& map, const std::filesystem::path& path);
LinearMap load_linear_map(const std::filesystem::path& path);

}  // namespace levelset
