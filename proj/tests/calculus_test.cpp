#include <gtest/gtest.h>

#include <cmath>

#include "levelset/calculus.hpp"
#include "levelset/error.hpp"
#include "levelset/revnet.hpp"
#include "support.hpp"

namespace levelset {
namespace {

RevNetParams single_block() {
  RevNetParams p = init_params(RevNetConfig::with_dim(2, 1, 0.25), 0.0);
  p.blocks[0].k1(0, 0) = 1.0;
  return p;
}

const double kSech2One = 1.0 - std::tanh(1.0) * std::tanh(1.0);  // 0.4199743...

TEST(Jacobian, ZeroParamsGiveIdentity) {
  const RevNetParams p = init_params(RevNetConfig::with_dim(4, 3, 0.25), 0.0);
  const Eigen::Vector4d z(0.1, -0.3, 0.7, 2.0);
  EXPECT_EQ(jacobian_inverse_analytic(p, z), Eigen::MatrixXd::Identity(4, 4));
  EXPECT_LE((jacobian_inverse_fd(p, z) - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(),
            1e-9);
}

TEST(Jacobian, SingleBlockClosedForm) {
  const RevNetParams p = single_block();
  const Eigen::Vector2d z(0.25 * std::tanh(1.0), 1.0);
  Eigen::Matrix2d expected;
  expected << 1.0, -0.25 * kSech2One, 0.0, 1.0;
  EXPECT_LE((jacobian_inverse_analytic(p, z) - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((jacobian_inverse_fd(p, z) - expected).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(expected(0, 1), -0.1049936, 1e-7);
}

TEST(Jacobian, AnalyticMatchesFiniteDifferences) {
  const RevNetParams p = init_params(RevNetConfig::with_dim(20, 30, 0.25, 4), 0.1);
  Rng rng(3);
  for (int t = 0; t < 5; ++t) {
    const Eigen::VectorXd z = testing::random_vector(rng, 20, 0.0, 1.0);
    const JacobianMatrix a = jacobian_inverse_analytic(p, z);
    EXPECT_LE((a - jacobian_inverse_fd(p, z)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Jacobian, InputPathMatchesLatentPath) {
  const RevNetParams p = init_params(RevNetConfig::with_dim(8, 10, 0.25, 2), 1.0);
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd x = testing::random_vector(rng, 8, 0.0, 1.0);
    const JacobianMatrix a = jacobian_inverse_at_input(p, x);
    const JacobianMatrix b = jacobian_inverse_analytic(p, forward(p, x));
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Jacobian, FdErrorIsSecondOrder) {
  const RevNetParams p = init_params(RevNetConfig::with_dim(4, 3, 0.5, 6), 1.0);
  const Eigen::Vector4d z(0.2, 0.4, -0.1, 0.8);
  const JacobianMatrix exact = jacobian_inverse_analytic(p, z);
  const double e1 = (jacobian_inverse_fd(p, z, 1e-2) - exact).cwiseAbs().maxCoeff();
  const double e2 = (jacobian_inverse_fd(p, z, 5e-3) - exact).cwiseAbs().maxCoeff();
  EXPECT_GE(std::log2(e1 / e2), 1.9);
}

TEST(Jacobian, ColumnsAreDirectionalDerivatives) {
  const RevNetParams p = init_params(RevNetConfig::with_dim(6, 4, 0.25, 9), 0.5);
  const Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(6, -0.5, 0.5);
  const JacobianMatrix j = jacobian_inverse_analytic(p, z);
  const double delta = 1e-4;
  for (int i = 0; i < 6; ++i) {
    const Eigen::VectorXd moved = inverse(p, z + delta * Eigen::VectorXd::Unit(6, i));
    const Eigen::VectorXd first_order = inverse(p, z) + delta * j.col(i);
    EXPECT_LE((moved - first_order).cwiseAbs().maxCoeff(), 10 * delta * delta);
  }
}

TEST(Determinant, VolumePreservedForRandomParams) {
  for (int d : {2, 8, 20}) {
    for (int draw = 0; draw < 10; ++draw) {
      const RevNetParams p = init_params(RevNetConfig::with_dim(d, 10, 0.25, 100 + draw), 1.0);
      Rng rng(draw);
      const Eigen::VectorXd z = testing::random_vector(rng, d, 0.0, 1.0);
      const JacobianMatrix j = jacobian_inverse_analytic(p, z);
      EXPECT_NEAR(det_jacobian(j).value, 1.0, 1e-10) << "d=" << d;
      EXPECT_NEAR(abs_det_svd(j), 1.0, 1e-8) << "d=" << d;
    }
  }
}

TEST(Determinant, SimpleMatrices) {
  EXPECT_EQ(det_jacobian(Eigen::MatrixXd::Identity(3, 3)).value, 1.0);
  Eigen::MatrixXd d2 = Eigen::MatrixXd::Identity(4, 4);
  d2(0, 0) = 2.0;
  EXPECT_DOUBLE_EQ(det_jacobian(d2).value, 2.0);
  EXPECT_FALSE(det_jacobian(d2).singular);
  Eigen::Matrix2d flip;
  flip << 0, 1, 1, 0;
  EXPECT_DOUBLE_EQ(det_jacobian(flip).value, -1.0);
  EXPECT_DOUBLE_EQ(abs_det_svd(flip), 1.0);
}

TEST(Determinant, SingularFlaggedNotThrown) {
  Eigen::Matrix2d s;
  s << 1, 2, 2, 4;
  Determinant det;
  EXPECT_NO_THROW(det = det_jacobian(s));
  EXPECT_TRUE(det.singular);
}

TEST(Determinant, SvdAgreesWithLuOnWellConditioned) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(5, 5);
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 5; ++c) m(r, c) += rng.uniform(-0.3, 0.3);
    }
    EXPECT_NEAR(std::abs(det_jacobian(m).value), abs_det_svd(m), 1e-8);
  }
}

TEST(DirectionalDerivs, Examples) {
  EXPECT_EQ(transformed_directional_derivs(Eigen::Vector2d(1, 2), Eigen::Matrix2d::Identity()),
            Eigen::VectorXd(Eigen::Vector2d(1, 2)));

  Eigen::Matrix2d j;
  j << 1, 2, 0, -1;  // J_2 = (2, -1) is orthogonal to (1, 2)
  EXPECT_EQ(transformed_directional_derivs(Eigen::Vector2d(1, 2), j)[1], 0.0);

  const RevNetParams p = single_block();
  const JacobianMatrix hand = jacobian_inverse_analytic(p, Eigen::Vector2d(0.25 * std::tanh(1.0), 1.0));
  const Eigen::VectorXd g = transformed_directional_derivs(Eigen::Vector2d(1, 1), hand);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_NEAR(g[1], 1.0 - 0.25 * kSech2One, 1e-15);

  EXPECT_THROW(transformed_directional_derivs(Eigen::Vector3d(1, 2, 3), j), DimensionError);
}

}  // namespace
}  // namespace levelset
