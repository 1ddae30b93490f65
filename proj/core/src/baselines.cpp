#include "levelset/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "json_util.hpp"
#include "levelset/error.hpp"

namespace levelset {

LinearMap LinearMap::identity(int dim) {
  return {Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim)};
}

namespace {

// Flip each column so that its first entry of non-negligible magnitude is
// positive.
void canonical_signs(Eigen::MatrixXd& a) {
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const double tol = 1e-12 * a.col(c).cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      if (std::abs(a(r, c)) > tol) {
        if (a(r, c) < 0.0) a.col(c) *= -1.0;
        break;
      }
    }
  }
}

// Symmetric eigen-decomposition sorted by decreasing eigenvalue, with
// eigenvalues clamped at zero.
LinearMap descending_eigen(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  const Eigen::Index d = sym.rows();
  LinearMap out{Eigen::MatrixXd(d, d), Eigen::VectorXd(d)};
  for (Eigen::Index k = 0; k < d; ++k) {
    out.matrix.col(k) = es.eigenvectors().col(d - 1 - k);
    out.eigenvalues[k] = std::max(0.0, es.eigenvalues()[d - 1 - k]);
  }
  return out;
}

}  // namespace

LinearMap active_subspace(std::span<const GradientSample> samples) {
  if (samples.empty()) throw ConfigError("active subspace needs at least one sample");
  const Eigen::Index d = samples.front().grad.size();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
  for (const auto& s : samples) {
    if (s.grad.size() != d) throw DimensionError("gradient samples have inconsistent length");
    if (!s.grad.allFinite()) throw NumericalError("non-finite gradient sample");
    c.selfadjointView<Eigen::Lower>().rankUpdate(s.grad);
  }
  c = c.selfadjointView<Eigen::Lower>();
  c /= static_cast<double>(samples.size());
  if (c.isZero(0.0)) return LinearMap::identity(static_cast<int>(d));
  LinearMap out = descending_eigen(c);
  canonical_signs(out.matrix);
  return out;
}

LinearMap sliced_inverse_regression(std::span<const Eigen::VectorXd> xs,
                                    std::span<const double> ys, int n_slices) {
  if (n_slices < 1) throw ConfigError("n_slices must be positive");
  if (xs.size() != ys.size()) throw DimensionError("xs and ys have different lengths");
  if (xs.size() < static_cast<std::size_t>(n_slices)) {
    throw ConfigError("sliced inverse regression needs at least n_slices samples");
  }
  const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  if (*ymin == *ymax) throw DegenerateError("all responses are equal; slices carry no information");

  const Eigen::Index d = xs.front().size();
  const auto n = static_cast<double>(xs.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& x : xs) {
    if (x.size() != d) throw DimensionError("input samples have inconsistent length");
    mean += x;
  }
  mean /= n;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (const auto& x : xs) cov.selfadjointView<Eigen::Lower>().rankUpdate(x - mean);
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= n;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const Eigen::VectorXd lam = es.eigenvalues();
  const double singular_tol =
      static_cast<double>(d) * std::numeric_limits<double>::epsilon() * lam.cwiseAbs().maxCoeff();
  std::ostringstream collinear;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (lam[k] <= singular_tol) {
      collinear << " [" << es.eigenvectors().col(k).transpose().format(
                               Eigen::IOFormat(6, Eigen::DontAlignCols, ", ", ", "))
                << "]";
    }
  }
  if (!collinear.str().empty()) {
    throw DegenerateError("sample covariance is singular; inputs do not vary along:" +
                          collinear.str());
  }

  const double ridge = 1e-12 * cov.trace() / static_cast<double>(d);
  const Eigen::MatrixXd whiten = es.eigenvectors() *
                                 (lam.array() + ridge).rsqrt().matrix().asDiagonal() *
                                 es.eigenvectors().transpose();

  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ys[a] < ys[b]; });

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  const std::size_t total = xs.size();
  const auto slices = static_cast<std::size_t>(n_slices);
  for (std::size_t h = 0; h < slices; ++h) {
    const std::size_t begin = h * total / slices;
    const std::size_t end = (h + 1) * total / slices;
    Eigen::VectorXd slice_mean = Eigen::VectorXd::Zero(d);
    for (std::size_t i = begin; i < end; ++i) slice_mean += whiten * (xs[order[i]] - mean);
    const double count = static_cast<double>(end - begin);
    slice_mean /= count;
    m.selfadjointView<Eigen::Lower>().rankUpdate(slice_mean, count / n);
  }
  m = m.selfadjointView<Eigen::Lower>();

  LinearMap out = descending_eigen(m);
  const Eigen::MatrixXd directions = whiten * out.matrix;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(directions);
  out.matrix = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  canonical_signs(out.matrix);
  return out;
}

Eigen::VectorXd apply_linear(const LinearMap& map, const Eigen::VectorXd& x) {
  if (x.size() != map.matrix.rows()) throw DimensionError("input length does not match the map");
  return map.matrix.transpose() * x;
}

Eigen::VectorXd invert_linear(const LinearMap& map, const Eigen::VectorXd& z) {
  if (z.size() != map.matrix.cols()) throw DimensionError("input length does not match the map");
  return map.matrix * z;
}

void save_linear_map(const LinearMap& map, const std::filesystem::path& path) {
  detail::json doc;
  doc["schema_version"] = kLinearMapSchemaVersion;
  doc["kind"] = "linear_map";
  doc["dim"] = map.dim();
  doc["matrix"] = detail::to_json_row_major(map.matrix);
  doc["eigenvalues"] = detail::to_json(map.eigenvalues);
  detail::write_json_file(doc, path);
}

LinearMap load_linear_map(const std::filesystem::path& path) {
  const auto doc = detail::read_json_file(path);
  detail::require_schema(doc, kLinearMapSchemaVersion, path);
  const int d = detail::require_field<int>(doc, "dim");
  if (d < 1) throw ShapeError("'" + path.string() + "' has non-positive dim");
  if (!doc.contains("matrix") || !doc.contains("eigenvalues")) {
    throw SchemaError("'" + path.string() + "' is missing matrix or eigenvalues");
  }
  return {detail::matrix_from_json(doc.at("matrix"), d, d, "matrix"),
          detail::vector_from_json(doc.at("eigenvalues"), d, "eigenvalues")};
}

}  // namespace levelset
