#include <gtest/gtest.h>

#include <cmath>

#include "kinlyap/model.hpp"
#include "support.hpp"

namespace kinlyap {
namespace {

using testing::paper_state;
using testing::uniform_state;

TEST(KineticModel, AcceptsCoplanarMatrices) {
  const auto m = coplanar_model(paper_state(), 1.0);
  EXPECT_EQ(m.dimension(), 2);
  EXPECT_EQ(m.components(), 4);
  EXPECT_EQ(m.sigma(), 1.0);
}

TEST(KineticModel, RejectsZeroVelocityRow) {
  EXPECT_KINLYAP_ERROR(KineticModel(Matrix{{0.0}}, Matrix{{0.0}}, 1.0), ErrorCode::ZeroVelocityRow);
  EXPECT_KINLYAP_ERROR(KineticModel(Matrix{{1.0, 0.0}, {0.0, 0.0}}, Matrix(2, 2), 1.0),
                       ErrorCode::ZeroVelocityRow);
}

TEST(KineticModel, DecoupledTransport) {
  const KineticModel m(Matrix{{1.0}, {-1.0}}, Matrix(2, 2), 1.0);
  EXPECT_TRUE(m.has_zero_collision());
  EXPECT_EQ(m.dimension(), 1);
}

TEST(KineticModel, RejectsBadShapesAndSigma) {
  EXPECT_KINLYAP_ERROR(KineticModel(Matrix{{1.0}, {-1.0}}, Matrix(3, 3), 1.0),
                       ErrorCode::DimensionMismatch);
  EXPECT_KINLYAP_ERROR(KineticModel(Matrix{{1.0}}, Matrix{{0.0}}, 0.0), ErrorCode::InvalidArgument);
  EXPECT_KINLYAP_ERROR(KineticModel(Matrix{{1.0}}, Matrix{{NAN}}, 1.0), ErrorCode::InvalidArgument);
}

TEST(CoplanarModel, PaperSteadyState) {
  const auto m = coplanar_model(paper_state(), 1.0);
  const std::vector<double> row1{-0.3, -0.4, 0.6, 0.2};
  for (int c = 0; c < 4; ++c) {
    EXPECT_EQ(m.collision()(0, c), row1[c]);
    EXPECT_EQ(m.collision()(1, c), row1[c]);
    EXPECT_EQ(m.collision()(2, c), -row1[c]);
    EXPECT_EQ(m.collision()(3, c), -row1[c]);
  }
  const Matrix v{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  EXPECT_EQ(m.velocities(), v);
  EXPECT_TRUE(is_coplanar(m));
}

TEST(CoplanarModel, UniformStateIsRankOneOuterProduct) {
  const auto m = coplanar_model(uniform_state(), 1.0);
  const double u[4] = {1, 1, -1, -1};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) EXPECT_DOUBLE_EQ(m.collision()(r, c), -0.25 * u[r] * u[c]);
}

TEST(CoplanarModel, SpeedScalesVelocities) {
  const auto m = coplanar_model({2.5, {0.4, 0.3, 0.2, 0.6}}, 1.0);
  EXPECT_EQ(m.velocity(1, 0), -2.5);
  EXPECT_EQ(m.velocity(2, 1), 2.5);
}

TEST(CoplanarModel, RejectsNonSteadyState) {
  EXPECT_KINLYAP_ERROR(coplanar_model({1.0, {1, 1, 1, 2}}, 1.0), ErrorCode::SteadyStateViolation);
  EXPECT_KINLYAP_ERROR(coplanar_model({1.0, {-1, -1, 1, 1}}, 1.0), ErrorCode::InvalidArgument);
}

TEST(CoplanarModel, SigmaIsStoredNotFolded) {
  const auto m = coplanar_model(paper_state(), 0.1);
  EXPECT_EQ(m.collision()(0, 0), -0.3);
  EXPECT_NEAR(m.scaled_collision()(0, 0), -3.0, 1e-15);
}

TEST(NonlinearResidual, Examples) {
  EXPECT_NEAR(nonlinear_collision_residual({0.4, 0.3, 0.2, 0.6}, 1.0), 0.0, 1e-16);
  EXPECT_EQ(nonlinear_collision_residual({1, 1, 1, 1}, 1.0), 0.0);
  EXPECT_EQ(nonlinear_collision_residual({1, 1, 2, 1}, 1.0), 1.0);
  EXPECT_EQ(nonlinear_collision_residual({1, 1, 2, 1}, 0.5), 2.0);
}

// Central-difference Jacobian of the nonlinear collision terms at f_e
// reproduces Q / sigma.
TEST(NonlinearResidual, JacobianMatchesLinearization) {
  for (double sigma : {1.0, 0.1}) {
    const auto s = paper_state();
    const auto m = coplanar_model(s, sigma);
    const Matrix q = m.scaled_collision();
    const double h = 1e-5;
    for (int c = 0; c < 4; ++c) {
      auto plus = s.density, minus = s.density;
      plus[c] += h;
      minus[c] -= h;
      const auto tp = nonlinear_collision_terms(plus, sigma);
      const auto tm = nonlinear_collision_terms(minus, sigma);
      for (int r = 0; r < 4; ++r) EXPECT_NEAR((tp[r] - tm[r]) / (2 * h), q(r, c), 1e-6);
    }
  }
}

TEST(CoplanarModel, RowPatternHoldsForRandomSteadyStates) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int i = 0; i < 50; ++i) {
    const double f1 = u(rng), f2 = u(rng), f3 = u(rng);
    const auto m = coplanar_model({u(rng), {f1, f2, f3, f1 * f2 / f3}}, u(rng));
    for (int c = 0; c < 4; ++c) {
      EXPECT_EQ(m.collision()(0, c), m.collision()(1, c));
      EXPECT_EQ(m.collision()(0, c), -m.collision()(2, c));
      EXPECT_EQ(m.collision()(0, c), -m.collision()(3, c));
    }
  }
}

}  // namespace
}  // namespace kinlyap
