#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "cohesion/dynamics.hpp"
#include "test_support.hpp"

namespace cohesion {
namespace {

using testing::Random;

void expect_state_near(const CarState& a, const CarState& b, double tol = 1e-12) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.heading, b.heading, tol);
  EXPECT_NEAR(a.speed, b.speed, tol);
}

TEST(Step, UnitSpeedAlongX) {
  expect_state_near(step(CarState{0, 0, 0, 1}, Control{0, 0}, {}), {0.1, 0, 0, 1});
}

TEST(Step, HeadingUpMovesAlongY) {
  const CarState next = step(CarState{0, 0, kPi / 2, 1}, Control{0, 0}, {});
  expect_state_near(next, {0, 0.1, kPi / 2, 1});
}

TEST(Step, FrictionSlowsDown) {
  DynamicsParams params;
  params.friction = 0.5;
  expect_state_near(step(CarState{0, 0, 0, 1}, Control{0, 0}, params), {0.1, 0, 0, 0.95});
}

TEST(Step, SteeringScalesWithSpeed) {
  const CarState next = step(CarState{0, 0, 0, 2}, Control{0.5, 0}, {});
  EXPECT_DOUBLE_EQ(next.heading, 0.1 * 2 * 0.5);
}

TEST(Step, SpeedClampsAtZero) {
  const CarState next = step(CarState{0, 0, 0, 0.1}, Control{0, -4}, {});
  EXPECT_EQ(next.speed, 0.0);
  EXPECT_DOUBLE_EQ(next.x, 0.01);
}

TEST(Step, RejectsNonFiniteInputs) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(step(CarState{nan, 0, 0, 1}, Control{0, 0}, {}), std::invalid_argument);
  EXPECT_THROW(step(CarState{0, 0, 0, inf}, Control{0, 0}, {}), std::invalid_argument);
  EXPECT_THROW(step(CarState{0, 0, 0, 1}, Control{nan, 0}, {}), std::invalid_argument);
}

TEST(Step, RejectsNonPositiveDt) {
  DynamicsParams params;
  params.dt = 0.0;
  EXPECT_THROW(step(CarState{0, 0, 0, 1}, Control{0, 0}, params), std::invalid_argument);
  params.dt = -0.1;
  EXPECT_THROW(step(CarState{0, 0, 0, 1}, Control{0, 0}, params), std::invalid_argument);
}

TEST(Rollout, EmptyControlsReturnsStart) {
  const CarState x0{1, 2, 3, 4};
  const auto states = rollout(x0, std::span<const Control>(), {});
  ASSERT_EQ(states.size(), 1u);
  EXPECT_EQ(states[0], x0);
}

TEST(Rollout, StraightLine) {
  const std::vector<Control> u(2);
  const auto states = rollout(CarState{0, 0, 0, 1}, std::span<const Control>(u), {});
  ASSERT_EQ(states.size(), 3u);
  EXPECT_NEAR(states[1].x, 0.1, 1e-15);
  EXPECT_NEAR(states[2].x, 0.2, 1e-15);
  for (const auto& s : states) EXPECT_EQ(s.y, 0.0);
}

TEST(Rollout, AcceleratingFromRest) {
  const std::vector<Control> u = {{0, 1}, {0, 1}};
  const auto states = rollout(CarState{0, 0, 0, 0}, std::span<const Control>(u), {});
  EXPECT_NEAR(states[0].speed, 0.0, 1e-15);
  EXPECT_NEAR(states[1].speed, 0.1, 1e-15);
  EXPECT_NEAR(states[2].speed, 0.2, 1e-15);
  EXPECT_NEAR(states[0].x, 0.0, 1e-15);
  EXPECT_NEAR(states[1].x, 0.0, 1e-15);
  EXPECT_NEAR(states[2].x, 0.01, 1e-15);
}

TEST(Rollout, ErrorNamesTheControlIndex) {
  std::vector<Control> u(4);
  u[2].accel = std::numeric_limits<double>::quiet_NaN();
  try {
    rollout(CarState{0, 0, 0, 1}, std::span<const Control>(u), {});
    FAIL() << "expected a throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("control 2"), std::string::npos) << e.what();
  }
}

TEST(DynamicsProperty, Deterministic) {
  Random rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const CarState x0 = rng.car();
    const auto u = rng.controls(20);
    const auto a = rollout(x0, std::span<const Control>(u), {});
    const auto b = rollout(x0, std::span<const Control>(u), {});
    ASSERT_EQ(a, b);
  }
}

TEST(DynamicsProperty, ZeroControlsKeepSpeedAndHeadingExactly) {
  Random rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const CarState x0 = rng.car();
    const std::vector<Control> u(500);
    for (const auto& s : rollout(x0, std::span<const Control>(u), {})) {
      ASSERT_EQ(s.speed, x0.speed);
      ASSERT_EQ(s.heading, x0.heading);
    }
  }
}

TEST(DynamicsProperty, TranslationEquivariant) {
  Random rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const CarState s = rng.car();
    const Control u{rng.uniform(-1, 1), rng.uniform(-4, 4)};
    const double dx = rng.uniform(-50, 50);
    const double dy = rng.uniform(-50, 50);
    const CarState moved{s.x + dx, s.y + dy, s.heading, s.speed};
    const CarState a = step(moved, u, {});
    const CarState b = step(s, u, {});
    EXPECT_NEAR(a.x, b.x + dx, 1e-12);
    EXPECT_NEAR(a.y, b.y + dy, 1e-12);
    EXPECT_EQ(a.heading, b.heading);
    EXPECT_EQ(a.speed, b.speed);
  }
}

TEST(DynamicsProperty, JacobianMatchesCentralDifferences) {
  Random rng(10);
  DynamicsParams params;
  params.friction = 0.3;
  for (int trial = 0; trial < 100; ++trial) {
    const CarState s = rng.car();
    const Control u{rng.uniform(-1, 1), rng.uniform(-4, 4)};
    const auto [a, b] = step_jacobian(s, u, params);

    Eigen::VectorXd point(6);
    point << s.x, s.y, s.heading, s.speed, u.steering, u.accel;
    for (int row = 0; row < kStateDim; ++row) {
      const auto f = [&](const Eigen::VectorXd& p) {
        const CarState next = step(CarState{p(0), p(1), p(2), p(3)}, Control{p(4), p(5)}, params);
        return next.vector()(row);
      };
      Eigen::VectorXd analytic(6);
      analytic << a.row(row).transpose(), b.row(row).transpose();
      const Eigen::VectorXd numeric = testing::central_difference(f, point);
      EXPECT_LT(testing::relative_error(analytic, numeric), 1e-6) << "row " << row;
    }
  }
}

TEST(DynamicsProperty, JacobianZeroSpeedRowWhenClamped) {
  const auto [a, b] = step_jacobian(CarState{0, 0, 0, 0.1}, Control{0, -4}, {});
  EXPECT_TRUE(a.row(3).isZero());
  EXPECT_TRUE(b.row(3).isZero());
}

TEST(Controls, FlattenRoundTrip) {
  const std::vector<Control> u = {{0.1, 1.0}, {-0.2, 2.0}, {0.3, -3.0}};
  const Eigen::VectorXd flat = flatten_controls(std::span<const Control>(u));
  ASSERT_EQ(flat.size(), 6);
  EXPECT_EQ(flat(2), -0.2);
  EXPECT_EQ(flat(5), -3.0);
  EXPECT_EQ(unflatten_controls<double>(flat), u);
}

TEST(Controls, ClipIntoBox) {
  const Control c = clip_control({2.0, -9.0}, {});
  EXPECT_EQ(c.steering, 1.0);
  EXPECT_EQ(c.accel, -4.0);
}

TEST(Params, Validate) {
  DynamicsParams p;
  EXPECT_NO_THROW(p.validate());
  p.friction = -1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace cohesion
