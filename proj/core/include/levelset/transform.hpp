#pragma once

#include <Eigen/Dense>

#include <string>
#include <variant>

#include "levelset/baselines.hpp"
#include "levelset/calculus.hpp"
#include "levelset/revnet.hpp"

namespace levelset {

struct IdentityTransform {
  int dim = 0;
};

// A coordinate change z = T(x): no-op, learned RevNet, or linear baseline.
using Transform = std::variant<IdentityTransform, RevNetParams, LinearMap>;

int transform_dim(const Transform& t);

Eigen::VectorXd apply_transform(const Transform& t, const Eigen::VectorXd& x);

// Jacobian of T^{-1} at z = T(x); column i is dx/dz_i.
JacobianMatrix inverse_jacobian_at_input(const Transform& t, const Eigen::VectorXd& x);

}  // namespace levelset
