#include "bandit/ridge.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bandit/error.hpp"
#include "test_util.hpp"

namespace bandit {
namespace {

using testing::code_of;
using testing::random_vector;

TEST(RidgeTest, EmptyStateIsRegularizer) {
  RidgeState s(2, 1.0);
  EXPECT_TRUE(s.precision().isApprox(Eigen::Matrix2d::Identity()));
  EXPECT_EQ(s.estimate(), Eigen::Vector2d::Zero());
  EXPECT_EQ(s.count(), 0u);

  RidgeState scalar(1, 4.0);
  EXPECT_DOUBLE_EQ(scalar.precision_inv()(0, 0), 0.25);

  const double B = 2.0;
  RidgeState theory(3, 1.0 / (B * B));
  EXPECT_TRUE(theory.precision().isApprox(0.25 * Eigen::Matrix3d::Identity()));
}

TEST(RidgeTest, RejectsBadConstruction) {
  EXPECT_EQ(code_of([] { RidgeState(0, 1.0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { RidgeState(2, 0.0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { RidgeState(2, -1.0); }), ErrorCode::kInvalidArgument);
}

TEST(RidgeTest, SingleUpdateByHand) {
  RidgeState s(2, 1.0);
  s.update(Eigen::Vector2d(1, 0), 1.0);
  EXPECT_TRUE(s.precision().isApprox(Eigen::Vector2d(2, 1).asDiagonal().toDenseMatrix()));
  EXPECT_NEAR(s.estimate()(0), 0.5, 1e-15);
  EXPECT_NEAR(s.estimate()(1), 0.0, 1e-15);
  EXPECT_NEAR(s.predict(Eigen::Vector2d(1, 0)), 0.5, 1e-15);
  EXPECT_NEAR(s.predict(Eigen::Vector2d(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(s.bonus(Eigen::Vector2d(1, 0)), std::sqrt(0.5), 1e-15);
}

TEST(RidgeTest, EmptyStateBonusAndPrediction) {
  RidgeState a(3, 1.0);
  RidgeState b(3, 4.0);
  const Eigen::Vector3d x = Eigen::Vector3d(1, 2, 2) / 3.0;
  EXPECT_DOUBLE_EQ(a.predict(x), 0.0);
  EXPECT_NEAR(a.bonus(x), 1.0, 1e-15);
  EXPECT_NEAR(b.bonus(x), 0.5, 1e-15);
}

TEST(RidgeTest, ZeroContextOnlyCounts) {
  std::mt19937_64 rng(3);
  RidgeState s(4, 1.0);
  for (int i = 0; i < 5; ++i) s.update(random_vector(4, rng), 0.3 * i);
  const Eigen::MatrixXd p = s.precision();
  const Eigen::VectorXd e = s.estimate();
  s.update(Eigen::VectorXd::Zero(4), 17.0);
  EXPECT_EQ(s.count(), 6u);
  EXPECT_EQ(s.precision(), p);
  EXPECT_EQ(s.estimate(), e);
}

TEST(RidgeTest, RejectsMismatchAndNonFinite) {
  RidgeState s(2, 1.0);
  EXPECT_EQ(code_of([&] { s.update(Eigen::Vector3d(1, 0, 0), 1.0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { s.update(Eigen::Vector2d(NAN, 0), 1.0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { s.update(Eigen::Vector2d(1, 0), INFINITY); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { s.predict(Eigen::Vector3d(1, 0, 0)); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { s.bonus(Eigen::Vector3d(1, 0, 0)); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(s.count(), 0u);
}

TEST(RidgeTest, MatchesDirectSolve) {
  std::mt19937_64 rng(11);
  const int d = 8;
  const double lambda = 0.7;
  RidgeState s(d, lambda);
  Eigen::MatrixXd U = lambda * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd x = random_vector(d, rng);
    const double r = random_vector(1, rng)(0);
    s.update(x, r);
    U += x * x.transpose();
    b += r * x;
  }
  const Eigen::VectorXd theta = U.fullPivLu().solve(b);
  EXPECT_LE((s.estimate() - theta).cwiseAbs().maxCoeff(), 1e-8);
  const Eigen::VectorXd probe = random_vector(d, rng);
  EXPECT_NEAR(s.bonus(probe), std::sqrt(probe.dot(U.fullPivLu().solve(probe))), 1e-8);
  EXPECT_LE(s.inverse_drift(), 1e-8);
}

TEST(RidgeTest, BonusNeverIncreases) {
  std::mt19937_64 rng(5);
  RidgeState s(6, 1.0);
  const Eigen::VectorXd probe = random_vector(6, rng);
  double prev = s.bonus(probe);
  for (int i = 0; i < 200; ++i) {
    s.update(random_vector(6, rng), 1.0);
    const double cur = s.bonus(probe);
    EXPECT_LE(cur, prev + 1e-12);
    prev = cur;
  }
}

TEST(RidgeTest, PrecisionStaysSymmetricPositiveDefinite) {
  std::mt19937_64 rng(9);
  RidgeState s(5, 2.0);
  for (int i = 0; i < 1500; ++i) s.update(random_vector(5, rng), 0.0);
  EXPECT_LE((s.precision() - s.precision().transpose()).cwiseAbs().maxCoeff(), 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.precision());
  EXPECT_GE(eig.eigenvalues().minCoeff(), 2.0 - 1e-9);
  EXPECT_LE(s.inverse_drift(), 1e-8);
}

TEST(RidgeTest, RowHelpersAgreeWithScalarCalls) {
  std::mt19937_64 rng(13);
  RidgeState s(4, 1.0);
  for (int i = 0; i < 20; ++i) s.update(random_vector(4, rng), 0.5);
  Eigen::MatrixXd rows(3, 4);
  for (int i = 0; i < 3; ++i) rows.row(i) = random_vector(4, rng).transpose();
  const Eigen::VectorXd p = s.predict_rows(rows);
  const Eigen::VectorXd w = robust_bonus_rows(s, rows);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(p(i), s.predict(rows.row(i).transpose()), 1e-12);
    EXPECT_NEAR(w(i), s.bonus(rows.row(i).transpose()), 1e-12);
  }
}

TEST(RidgeTest, RefreshKeepsEstimate) {
  std::mt19937_64 rng(17);
  RidgeState s(3, 1.0);
  for (int i = 0; i < 100; ++i) s.update(random_vector(3, rng), 1.0);
  const Eigen::VectorXd before = s.estimate();
  s.refresh();
  EXPECT_LE((s.estimate() - before).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(s.count(), 100u);
}

}  // namespace
}  // namespace bandit
