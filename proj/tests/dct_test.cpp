#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pcs/dct.hpp"
#include "support/test_util.hpp"

namespace {

Eigen::MatrixXd random_block(std::mt19937_64& rng, int b) {
  std::uniform_real_distribution<double> u(0.0, 255.0);
  Eigen::MatrixXd m(b, b);
  for (auto& v : m.reshaped()) v = u(rng);
  return m;
}

TEST(Vectorize, RowMajor) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2,
       3, 4;
  EXPECT_EQ(pcs::vectorize(m), Eigen::Vector4d(1, 2, 3, 4));
  EXPECT_EQ(pcs::devectorize(Eigen::Vector4d(1, 2, 3, 4), 2), m);
  EXPECT_THROW(pcs::devectorize(Eigen::Vector3d(1, 2, 3), 2), std::invalid_argument);
}

TEST(Dct2, ConstantBlockHasOnlyDc) {
  const Eigen::MatrixXd s = pcs::dct2_forward(Eigen::MatrixXd::Constant(16, 16, 3.0));
  EXPECT_NEAR(s(0, 0), 48.0, 1e-12);
  Eigen::MatrixXd ac = s;
  ac(0, 0) = 0.0;
  EXPECT_LT(ac.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(pcs::dct2_forward(Eigen::MatrixXd::Zero(16, 16)).cwiseAbs().maxCoeff(), 1e-300);
}

TEST(Dct2, InverseOfUnitDc) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(16, 16);
  s(0, 0) = 16.0;
  EXPECT_LT((pcs::dct2_inverse(s) - Eigen::MatrixXd::Ones(16, 16)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Dct2, ParsevalAndRoundTrip) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int b = 2 + trial % 15;
    const Eigen::MatrixXd x = random_block(rng, b);
    const Eigen::MatrixXd s = pcs::dct2_forward(x);
    EXPECT_NEAR(s.squaredNorm(), x.squaredNorm(), 1e-10 * x.squaredNorm());
    EXPECT_LT((pcs::dct2_inverse(s) - x).cwiseAbs().maxCoeff(), 1e-10 * x.cwiseAbs().maxCoeff());
  }
}

TEST(Dct2, Linear) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd a = random_block(rng, 16), b = random_block(rng, 16);
  const Eigen::MatrixXd lhs = pcs::dct2_forward(2.5 * a - b);
  const Eigen::MatrixXd rhs = 2.5 * pcs::dct2_forward(a) - pcs::dct2_forward(b);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(DctMatrix, MatchesCosineDefinition) {
  const int b = 8;
  const Eigen::MatrixXd c = pcs::dct_matrix(b);
  for (int k = 0; k < b; ++k) {
    const double a = k == 0 ? std::sqrt(1.0 / b) : std::sqrt(2.0 / b);
    for (int n = 0; n < b; ++n) {
      EXPECT_NEAR(c(k, n), a * std::cos(M_PI * (2 * n + 1) * k / (2.0 * b)), 1e-15);
    }
  }
}

TEST(Basis, TwoByTwoFirstColumn) {
  const auto psi = pcs::build_basis(2);
  EXPECT_EQ(psi.dimension(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(psi.matrix(i, 0), 0.5, 1e-15);
}

TEST(Basis, Orthonormal) {
  const auto psi = pcs::build_basis(16);
  ASSERT_EQ(psi.matrix.rows(), 256);
  const Eigen::MatrixXd gram = psi.matrix.transpose() * psi.matrix;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(256, 256)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(pcs::build_basis(1), std::invalid_argument);
}

TEST(Basis, ConsistentWithSeparableTransform) {
  std::mt19937_64 rng(3);
  const auto psi = pcs::build_basis(16);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd x = random_block(rng, 16);
    const Eigen::VectorXd s = pcs::vectorize(pcs::dct2_forward(x));
    EXPECT_LT((psi.matrix * s - pcs::vectorize(x)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((psi.matrix.transpose() * pcs::vectorize(x) - s).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Basis, ColumnIsBasisImage) {
  const auto psi = pcs::build_basis(16);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(16, 16);
  s(3, 7) = 1.0;
  EXPECT_LT((psi.matrix.col(3 * 16 + 7) - pcs::vectorize(pcs::dct2_inverse(s))).cwiseAbs().maxCoeff(), 1e-14);
}

}  // namespace
