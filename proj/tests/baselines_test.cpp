#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "levelset/baselines.hpp"
#include "levelset/error.hpp"
#include "levelset/functions.hpp"
#include "support.hpp"

namespace levelset {
namespace {

// Angle between two lines (sign of the direction ignored).
double line_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double c = std::abs(a.normalized().dot(b.normalized()));
  return std::acos(std::min(1.0, c));
}

void expect_orthonormal(const LinearMap& m) {
  const Eigen::Index d = m.matrix.cols();
  EXPECT_LE((m.matrix.transpose() * m.matrix - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff(),
            1e-10);
  for (Eigen::Index k = 1; k < d; ++k) EXPECT_GE(m.eigenvalues[k - 1], m.eigenvalues[k]);
  EXPECT_GE(m.eigenvalues.minCoeff(), 0.0);
}

Dataset samples_of(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad, int d,
                   int n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset out;
  for (int s = 0; s < n; ++s) {
    GradientSample g;
    g.x = testing::random_vector(rng, d, 0, 1);
    g.grad = grad(g.x);
    out.push_back(g);
  }
  return out;
}

TEST(ActiveSubspace, RankOneCovariance) {
  const Dataset data = samples_of([](const Eigen::VectorXd&) { return Eigen::Vector3d(1, 0, 0); }, 3, 10, 1);
  const LinearMap m = active_subspace(data);
  EXPECT_EQ(m.matrix.col(0), Eigen::VectorXd(Eigen::Vector3d(1, 0, 0)));
  EXPECT_DOUBLE_EQ(m.eigenvalues[0], 1.0);
  EXPECT_NEAR(m.eigenvalues[1], 0.0, 1e-15);
  expect_orthonormal(m);
}

TEST(ActiveSubspace, F1FindsDiagonal) {
  const TestFunction f1 = make_function(FunctionId::kF1);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const LinearMap m = active_subspace(sample_dataset(f1, 1000, seed, SampleLayout::kUniformRandom));
    EXPECT_LE(line_angle(m.matrix.col(0), Eigen::Vector2d(1, 1)), 1e-3);
    EXPECT_GT(m.matrix(0, 0), 0.0);  // sign convention
    expect_orthonormal(m);
  }
}

TEST(ActiveSubspace, F4SpectrumHasNoGapAndMatchesBruteForce) {
  const Dataset data = sample_dataset(make_function(FunctionId::kF4), 1000, 4, SampleLayout::kUniformRandom);
  const LinearMap m = active_subspace(data);
  // Brute-force oracle: plain loop covariance and an independent eigensolver.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(20, 20);
  for (const auto& s : data) {
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) c(i, j) += s.grad[i] * s.grad[j];
    }
  }
  c /= 1000.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(c);
  std::vector<double> ev;
  for (int i = 0; i < 20; ++i) ev.push_back(es.eigenvalues()[i].real());
  std::sort(ev.rbegin(), ev.rend());
  for (int i = 0; i < 20; ++i) EXPECT_NEAR(m.eigenvalues[i], ev[i], 1e-10 * ev[0]);
  // Spherical level sets: the second eigenvalue is not two orders below the first.
  EXPECT_GT(m.eigenvalues[1], 1e-2 * m.eigenvalues[0]);
}

TEST(ActiveSubspace, TraceEqualsMeanSquaredGradient) {
  const Dataset data = sample_dataset(make_function(FunctionId::kF5), 300, 9, SampleLayout::kUniformRandom);
  double mean_sq = 0.0;
  for (const auto& s : data) mean_sq += s.grad.squaredNorm();
  mean_sq /= 300.0;
  EXPECT_NEAR(active_subspace(data).eigenvalues.sum(), mean_sq, 1e-10 * mean_sq);
}

TEST(ActiveSubspace, PermutationInvariant) {
  Dataset data = sample_dataset(make_function(FunctionId::kF2), 200, 6, SampleLayout::kUniformRandom);
  const LinearMap a = active_subspace(data);
  std::reverse(data.begin(), data.end());
  Rng rng(1);
  rng.shuffle(std::span<GradientSample>(data));
  const LinearMap b = active_subspace(data);
  EXPECT_LE((a.matrix - b.matrix).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ActiveSubspace, ZeroGradientsGiveIdentity) {
  const Dataset data = samples_of([](const Eigen::VectorXd&) { return Eigen::Vector2d(0, 0); }, 2, 5, 1);
  const LinearMap m = active_subspace(data);
  EXPECT_EQ(m.matrix, Eigen::MatrixXd::Identity(2, 2));
  EXPECT_EQ(m.eigenvalues, Eigen::VectorXd::Zero(2));
  EXPECT_THROW(active_subspace(Dataset{}), ConfigError);
}

struct Xy {
  std::vector<Eigen::VectorXd> xs;
  std::vector<double> ys;
};

Xy linear_data(const Eigen::VectorXd& dir, int n, std::uint64_t seed) {
  Rng rng(seed);
  Xy out;
  for (int s = 0; s < n; ++s) {
    out.xs.push_back(testing::random_vector(rng, static_cast<int>(dir.size()), 0, 1));
    out.ys.push_back(dir.dot(out.xs.back()));
  }
  return out;
}

TEST(Sir, RecoversLinearDirection) {
  const Xy e1 = linear_data(Eigen::Vector4d(1, 0, 0, 0), 500, 3);
  const LinearMap m = sliced_inverse_regression(e1.xs, e1.ys, 10);
  EXPECT_LE(line_angle(m.matrix.col(0), Eigen::Vector4d(1, 0, 0, 0)), 1e-2);
  expect_orthonormal(m);

  const Xy diag = linear_data(Eigen::Vector2d(1, 1), 500, 4);
  const LinearMap md = sliced_inverse_regression(diag.xs, diag.ys, 10);
  EXPECT_LE(line_angle(md.matrix.col(0), Eigen::Vector2d(1, 1)), 2e-2);
}

TEST(Sir, ConsistencyTrend) {
  const Eigen::VectorXd dir = (Eigen::VectorXd(6) << 1, -2, 0.5, 0, 1, 0).finished();
  std::vector<double> small, large;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const Xy a = linear_data(dir, 50, 100 + t);
    const Xy b = linear_data(dir, 2000, 200 + t);
    small.push_back(line_angle(sliced_inverse_regression(a.xs, a.ys, 10).matrix.col(0), dir));
    large.push_back(line_angle(sliced_inverse_regression(b.xs, b.ys, 10).matrix.col(0), dir));
  }
  std::nth_element(small.begin(), small.begin() + 10, small.end());
  std::nth_element(large.begin(), large.begin() + 10, large.end());
  EXPECT_LT(large[10], small[10]);
}

TEST(Sir, Errors) {
  const Xy data = linear_data(Eigen::Vector2d(1, 0), 20, 1);
  std::vector<double> constant(20, 3.0);
  EXPECT_THROW(sliced_inverse_regression(data.xs, constant, 5), DegenerateError);
  EXPECT_THROW(sliced_inverse_regression(data.xs, data.ys, 50), ConfigError);
  EXPECT_THROW(sliced_inverse_regression(data.xs, data.ys, 0), ConfigError);

  // x2 = 2 x1: the covariance is singular along (2, -1)/sqrt(5).
  std::vector<Eigen::VectorXd> collinear;
  for (const auto& x : data.xs) collinear.push_back(Eigen::Vector2d(x[0], 2 * x[0]));
  try {
    sliced_inverse_regression(collinear, data.ys, 5);
    FAIL() << "expected DegenerateError";
  } catch (const DegenerateError& e) {
    EXPECT_NE(std::string(e.what()).find("0.894427"), std::string::npos) << e.what();
  }
}

TEST(LinearMapOps, ApplyAndInvert) {
  const LinearMap id = LinearMap::identity(3);
  EXPECT_EQ(apply_linear(id, Eigen::Vector3d(1, 2, 3)), Eigen::VectorXd(Eigen::Vector3d(1, 2, 3)));

  const double r = std::numbers::sqrt2 / 2;
  // 45 degree rotation with columns (r, r) and (-r, r).
  const LinearMap rot{(Eigen::MatrixXd(2, 2) << r, -r, r, r).finished(), Eigen::Vector2d(1, 0)};
  const Eigen::VectorXd z = apply_linear(rot, Eigen::Vector2d(1, 0));
  EXPECT_NEAR(z[0], r, 1e-15);
  EXPECT_NEAR(z[1], -r, 1e-15);

  Rng rng(2);
  const Dataset data = sample_dataset(make_function(FunctionId::kF5), 50, 2, SampleLayout::kUniformRandom);
  const LinearMap m = active_subspace(data);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd x = testing::random_vector(rng, 20, -1, 1);
    EXPECT_LE((invert_linear(m, apply_linear(m, x)) - x).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_THROW(apply_linear(m, Eigen::Vector2d(0, 0)), DimensionError);
}

TEST(LinearMapOps, SaveLoadRoundTrip) {
  testing::TempDir dir("linmap");
  const LinearMap m =
      active_subspace(sample_dataset(make_function(FunctionId::kF4), 100, 1, SampleLayout::kUniformRandom));
  save_linear_map(m, dir / "m.json");
  const LinearMap back = load_linear_map(dir / "m.json");
  EXPECT_EQ(back.matrix, m.matrix);
  EXPECT_EQ(back.eigenvalues, m.eigenvalues);
}

}  // namespace
}  // namespace levelset
