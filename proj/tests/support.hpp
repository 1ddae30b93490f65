#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <unistd.h>

#include "levelset/loss.hpp"
#include "levelset/revnet.hpp"
#include "levelset/rng.hpp"
#include "levelset/sample.hpp"

namespace levelset::testing {

inline Eigen::VectorXd random_vector(Rng& rng, int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

inline Dataset random_batch(Rng& rng, int dim, int n) {
  Dataset out;
  for (int s = 0; s < n; ++s) {
    GradientSample g;
    g.x = random_vector(rng, dim, -1.0, 1.0);
    g.grad = random_vector(rng, dim, -2.0, 2.0);
    g.y = rng.uniform(-1.0, 1.0);
    out.push_back(std::move(g));
  }
  return out;
}

// Fourth-order central difference of a scalar function of a vector.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-4) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    auto at = [&](double t) {
      Eigen::VectorXd y = x;
      y[k] += t;
      return f(y);
    };
    g[k] = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
  }
  return g;
}

// Finite-difference gradient of total_loss(...).total over the flattened
// parameters.
inline Eigen::VectorXd fd_loss_gradient(const RevNetParams& params, const Dataset& batch,
                                        const AnisotropyWeights& w, double lambda) {
  RevNetParams q = params;
  return fd_gradient(
      [&](const Eigen::VectorXd& flat) {
        unflatten(flat, q);
        return total_loss(q, batch, w, lambda).total;
      },
      flatten(params));
}

// |a - b| / max(|a|, |b|), with exact zeros compared absolutely.
inline double rel_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / scale;
}

inline double max_rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) worst = std::max(worst, rel_error(a[i], b[i]));
  return worst;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("levelset_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace levelset::testing
