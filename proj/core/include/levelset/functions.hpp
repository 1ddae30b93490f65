#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "levelset/sample.hpp"

namespace levelset {

enum class Density { kUniform };

// Axis-aligned box Omega with a sampling density.
struct DomainBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Density density = Density::kUniform;

  static DomainBox cube(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Eigen::VectorXd& x) const;
  void validate() const;
};

enum class FunctionId { kF1, kF2, kF3, kF4, kF5 };

std::string_view to_string(FunctionId id);
std::optional<FunctionId> function_id_from_string(std::string_view name);

// Scalar test function with closed-form gradient.
//
//   f1(x) = 1/2 sin(2 pi (x1 + x2)) + 1          on [0,1]^2
//   f2(x) = exp(-(x1 - 0.5)^2 - x2^2)             on [0,1]^2
//   f3(x) = x1^3 + x2^3 + 0.2 x1 + 0.6 x2         on [-1,1]^2
//   f4(x) = sin(x1^2 + ... + x20^2)               on [0,1]^20
//   f5(x) = prod_i (1.2^-2 + xi^2)^-1             on [0,1]^20
struct TestFunction {
  std::string name;
  int dim = 0;
  DomainBox domain;
  std::function<double(const Eigen::VectorXd&)> eval;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
};

TestFunction make_function(FunctionId id);

// Out-of-domain points are evaluated but reported through this hook (default:
// one line on stderr per call site).
using DomainWarning = std::function<void(const TestFunction&, const Eigen::VectorXd&)>;
void set_domain_warning(DomainWarning hook);

double evaluate(const TestFunction& fn, const Eigen::VectorXd& x);
Eigen::VectorXd gradient(const TestFunction& fn, const Eigen::VectorXd& x);

enum class SampleLayout { kUniformRandom, kGrid };

std::string_view to_string(SampleLayout layout);
SampleLayout sample_layout_from_string(std::string_view name);

// Points in the domain. kGrid requires n = k^dim with k >= 2 and produces the
// tensor-product lattice including the endpoints (first coordinate slowest).
std::vector<Eigen::VectorXd> sample_points(const DomainBox& domain, std::size_t n,
                                           std::uint64_t seed, SampleLayout layout);

Dataset sample_dataset(const TestFunction& fn, std::size_t n, std::uint64_t seed,
                       SampleLayout layout);

Dataset evaluate_dataset(const TestFunction& fn, const std::vector<Eigen::VectorXd>& points);

// Tabulated datasets: comma-separated text with header x_1..x_d,y,g_1..g_d.
Dataset read_tabulated_dataset(const std::filesystem::path& path);
void write_tabulated_dataset(const Dataset& data, const std::filesystem::path& path);

// Smallest box containing every sample point.
DomainBox bounding_box(const Dataset& data);

}  // namespace levelset
