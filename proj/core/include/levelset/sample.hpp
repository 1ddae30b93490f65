#pragma once

#include <Eigen/Dense>

#include <vector>

namespace levelset {

// One training record (x, f(x), grad f(x)).
struct GradientSample {
  Eigen::VectorXd x;
  double y = 0.0;
  Eigen::VectorXd grad;
};

using Dataset = std::vector<GradientSample>;

}  // namespace levelset
