#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "epca/metrics.hpp"

namespace epca {
namespace {

TEST(SubspaceError, Examples) {
  Eigen::MatrixXd u(3, 2);
  u << 1, 0, 0, 1, 0, 0;
  EXPECT_EQ(subspace_error(u, u), 0.0);

  const double th = 0.7;
  Eigen::Matrix2d rot;
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  EXPECT_NEAR(subspace_error(u * rot, u), 0.0, 1e-14);

  EXPECT_DOUBLE_EQ(subspace_error(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)), 2.0);
}

TEST(SqCorrelation, Examples) {
  EXPECT_DOUBLE_EQ(sq_correlation(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(-2, -4, -6)), 1.0);
  EXPECT_EQ(sq_correlation(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 3)), 0.0);
  const double s = std::numbers::sqrt2 / 2;
  EXPECT_NEAR(sq_correlation(Eigen::Vector2d(s, s), Eigen::Vector2d(1, 0)), 0.5, 1e-15);
}

TEST(MatrixErrors, Examples) {
  const Eigen::Matrix2d a = Eigen::Matrix2d::Identity();
  const auto same = matrix_errors(a, a);
  EXPECT_EQ(same.frobenius, 0.0);
  EXPECT_EQ(same.operator_norm, 0.0);

  Eigen::Matrix2d b = a;
  b(0, 0) += 3.0;
  b(1, 1) -= 4.0;
  const auto e = matrix_errors(b, a);
  EXPECT_NEAR(e.frobenius, 5.0, 1e-14);
  EXPECT_NEAR(e.operator_norm, 4.0, 1e-14);
}

TEST(MatrixErrors, OperatorBelowFrobenius) {
  Eigen::Matrix3d m;
  m << 1, 2, 0, 2, -1, 3, 0, 3, 2;
  const auto e = matrix_errors(m, Eigen::Matrix3d::Zero());
  EXPECT_LE(e.operator_norm, e.frobenius);
}

}  // namespace
}  // namespace epca
