#include "levelset/analysis.hpp"

#include <fstream>

#include "csv_util.hpp"
#include "levelset/error.hpp"
#include "levelset/parallel.hpp"

namespace levelset {

int transform_dim(const Transform& t) {
  return std::visit(
      [](const auto& v) -> int {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IdentityTransform>) {
          return v.dim;
        } else if constexpr (std::is_same_v<T, RevNetParams>) {
          return v.config.dim;
        } else {
          return v.dim();
        }
      },
      t);
}

Eigen::VectorXd apply_transform(const Transform& t, const Eigen::VectorXd& x) {
  return std::visit(
      [&](const auto& v) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IdentityTransform>) {
          if (x.size() != v.dim) throw DimensionError("input length does not match the transform");
          return x;
        } else if constexpr (std::is_same_v<T, RevNetParams>) {
          return forward(v, x);
        } else {
          return apply_linear(v, x);
        }
      },
      t);
}

JacobianMatrix inverse_jacobian_at_input(const Transform& t, const Eigen::VectorXd& x) {
  return std::visit(
      [&](const auto& v) -> JacobianMatrix {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IdentityTransform>) {
          if (x.size() != v.dim) throw DimensionError("input length does not match the transform");
          return JacobianMatrix::Identity(v.dim, v.dim);
        } else if constexpr (std::is_same_v<T, RevNetParams>) {
          return jacobian_inverse_at_input(v, x);
        } else {
          if (x.size() != v.dim()) throw DimensionError("input length does not match the map");
          return v.matrix;
        }
      },
      t);
}

namespace {

template <typename GradAt>
SensitivityReport sensitivity_impl(const Transform& transform, std::size_t n, const GradAt& at,
                                   std::string method) {
  if (n == 0) throw ConfigError("sensitivity needs at least one sample");
  const int d = transform_dim(transform);
  const std::size_t chunks = chunk_count(n, kReductionChunk);
  std::vector<Eigen::VectorXd> partial(chunks, Eigen::VectorXd::Zero(d));
  for_each_chunk(n, kReductionChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const auto [x, grad] = at(s);
      const JacobianMatrix jac = inverse_jacobian_at_input(transform, x);
      partial[c] += transformed_directional_derivs(grad, jac).cwiseAbs();
    }
  });
  Eigen::VectorXd raw = partial.front();
  for (std::size_t c = 1; c < chunks; ++c) raw += partial[c];
  raw /= static_cast<double>(n);

  SensitivityReport r;
  r.method = std::move(method);
  r.n_samples = n;
  r.raw = raw;
  const double mx = raw.maxCoeff();
  r.degenerate = !(mx > 0.0);
  r.normalized = r.degenerate ? Eigen::VectorXd::Zero(d) : Eigen::VectorXd(raw / mx);
  return r;
}

}  // namespace

SensitivityReport sensitivity(const Transform& transform, std::span<const GradientSample> samples,
                              std::string method) {
  const int d = transform_dim(transform);
  for (const auto& s : samples) {
    if (s.x.size() != d || s.grad.size() != d) {
      throw DimensionError("sample dimension does not match the transform");
    }
  }
  return sensitivity_impl(
      transform, samples.size(),
      [&](std::size_t s) { return std::pair{samples[s].x, samples[s].grad}; }, std::move(method));
}

SensitivityReport sensitivity(const Transform& transform, const TestFunction& fn,
                              std::span<const Eigen::VectorXd> points, std::string method) {
  if (fn.dim != transform_dim(transform)) {
    throw DimensionError("function dimension does not match the transform");
  }
  return sensitivity_impl(
      transform, points.size(),
      [&](std::size_t s) { return std::pair{points[s], gradient(fn, points[s])}; },
      std::move(method));
}

MethodSet fit_baselines(std::span<const GradientSample> train, const BaselineToggles& toggles) {
  MethodSet m;
  if (toggles.active_subspace) m.as = active_subspace(train);
  if (toggles.sliced_inverse_regression) {
    std::vector<Eigen::VectorXd> xs;
    std::vector<double> ys;
    for (const auto& s : train) {
      xs.push_back(s.x);
      ys.push_back(s.y);
    }
    m.sir = sliced_inverse_regression(xs, ys, toggles.n_slices);
  }
  return m;
}

std::vector<SensitivityReport> compare_methods(const MethodSet& methods,
                                               std::span<const GradientSample> validation) {
  if (validation.empty()) throw ConfigError("validation set is empty");
  const int d = static_cast<int>(validation.front().x.size());
  std::vector<SensitivityReport> out;
  out.push_back(sensitivity(IdentityTransform{d}, validation, "identity"));
  if (methods.nll) out.push_back(sensitivity(*methods.nll, validation, "NLL"));
  if (methods.as) out.push_back(sensitivity(*methods.as, validation, "AS"));
  if (methods.sir) out.push_back(sensitivity(*methods.sir, validation, "SIR"));
  return out;
}

void write_sensitivity_csv(std::span<const SensitivityReport> reports,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "method,dim_index,raw,normalized\n";
  for (const auto& r : reports) {
    for (Eigen::Index i = 0; i < r.raw.size(); ++i) {
      out << r.method << ',' << i << ',' << detail::format_double(r.raw[i]) << ','
          << detail::format_double(r.normalized[i]) << '\n';
    }
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace levelset
