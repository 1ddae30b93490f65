#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levelset/functions.hpp"
#include "levelset/sample.hpp"
#include "levelset/transform.hpp"

namespace levelset {

struct SensitivityReport {
  std::string method;
  Eigen::VectorXd raw;         // mean over samples of |d(f o T^{-1})/dz_i|
  Eigen::VectorXd normalized;  // raw / max(raw); all zero when degenerate
  std::size_t n_samples = 0;
  bool degenerate = false;     // raw is identically zero (constant f)
};

// Per-coordinate sensitivity of f o T^{-1}, using the gradients stored in the
// samples.
SensitivityReport sensitivity(const Transform& transform, std::span<const GradientSample> samples,
                              std::string method);

// Same, with gradients taken from `fn` at each point.
SensitivityReport sensitivity(const Transform& transform, const TestFunction& fn,
                              std::span<const Eigen::VectorXd> points, std::string method);

struct BaselineToggles {
  bool active_subspace = true;
  bool sliced_inverse_regression = true;
  int n_slices = kDefaultSlices;
};

// Transforms compared side by side. AS/SIR maps are fitted on the training
// data when enabled and not supplied.
struct MethodSet {
  std::optional<RevNetParams> nll;
  std::optional<LinearMap> as;
  std::optional<LinearMap> sir;
};

MethodSet fit_baselines(std::span<const GradientSample> train, const BaselineToggles& toggles);

// One report per method, identity first, then NLL, AS, SIR when present, all
// on the same validation samples.
std::vector<SensitivityReport> compare_methods(const MethodSet& methods,
                                               std::span<const GradientSample> validation);

// CSV with header method,dim_index,raw,normalized (dim_index is 0-based).
void write_sensitivity_csv(std::span<const SensitivityReport> reports,
                           const std::filesystem::path& path);

}  // namespace levelset
