#include <gtest/gtest.h>

#include <cmath>

#include "cohesion/autodiff.hpp"
#include "cohesion/driving_features.hpp"
#include "test_support.hpp"

namespace cohesion {
namespace {

using testing::Random;

RoadLayout road3() { return RoadLayout{}; }

RewardParams params_for(const RoadLayout& road) {
  RewardParams p;
  p.target_lane = 1;
  p.target_speed = 10.0;
  p.validate(road);
  return p;
}

TEST(Road, LaneGeometry) {
  const RoadLayout road = road3();
  EXPECT_DOUBLE_EQ(road.lane_center(0), -3.0);
  EXPECT_DOUBLE_EQ(road.lane_center(1), 0.0);
  EXPECT_DOUBLE_EQ(road.lane_center(2), 3.0);
  EXPECT_DOUBLE_EQ(road.right_edge(), 4.5);
  EXPECT_EQ(road.lane_index(-4.0), 0);
  EXPECT_EQ(road.lane_index(0.4), 1);
  EXPECT_EQ(road.lane_index(2.0), 2);
  EXPECT_EQ(road.lane_index(-100.0), 0);
  EXPECT_EQ(road.lane_index(100.0), 2);
}

TEST(Road, ExitWidensTheRightEdge) {
  RoadLayout road = road3();
  road.exit = ExitLane{2, 80.0, 120.0};
  road.validate();
  EXPECT_DOUBLE_EQ(road.right_edge_at(0.0), 4.5);
  EXPECT_DOUBLE_EQ(road.right_edge_at(100.0), 6.0);
  EXPECT_DOUBLE_EQ(road.right_edge_at(500.0), 7.5);
}

TEST(Road, RejectsBadExit) {
  RoadLayout road = road3();
  road.exit = ExitLane{1, 80.0, 120.0};
  EXPECT_THROW(road.validate(), std::invalid_argument);
  road.exit = ExitLane{2, 80.0, 80.0};
  EXPECT_THROW(road.validate(), std::invalid_argument);
}

TEST(Phi, OptimumOfEachComponent) {
  const RoadLayout road = road3();
  const RewardParams p = params_for(road);
  const auto f = phi(CarState{0.0, 0.0, kPi / 2, 10.0}, Control{}, {}, road, p);
  EXPECT_EQ(f(kCollision), 0.0);
  EXPECT_EQ(f(kLane), 1.0);
  EXPECT_EQ(f(kBoundary), 0.0);
  EXPECT_EQ(f(kSpeed), 0.0);
  EXPECT_EQ(f(kSteering), 0.0);
  EXPECT_EQ(f(kAccel), 0.0);
}

TEST(Phi, CoincidentCarGivesGaussianPeak) {
  const RoadLayout road = road3();
  const RewardParams p = params_for(road);
  const CarState robot{0.5, 3.0, kPi / 2, 10.0};
  const std::vector<CarState> others = {{0.5, 3.0, 1.0, 7.0}};
  EXPECT_DOUBLE_EQ(phi(robot, Control{}, others, road, p)(kCollision), 1.0);
}

TEST(Phi, OneLaneOffIsTwoSigma) {
  const RoadLayout road = road3();
  const RewardParams p = params_for(road);
  const auto f = phi(CarState{3.0, 0.0, kPi / 2, 10.0}, Control{}, {}, road, p);
  EXPECT_NEAR(f(kLane), std::exp(-2.0), 1e-15);
}

TEST(Phi, ControlAndSpeedTerms) {
  const RoadLayout road = road3();
  const RewardParams p = params_for(road);
  const auto f = phi(CarState{0.0, 0.0, kPi / 2, 12.0}, Control{0.3, -2.0}, {}, road, p);
  EXPECT_DOUBLE_EQ(f(kSpeed), -4.0);
  EXPECT_DOUBLE_EQ(f(kSteering), -0.09);
  EXPECT_DOUBLE_EQ(f(kAccel), -4.0);
}

TEST(Phi, BoundaryHinge) {
  const RoadLayout road = road3();
  const RewardParams p = params_for(road);
  EXPECT_EQ(phi(CarState{4.4, 0, kPi / 2, 10}, Control{}, {}, road, p)(kBoundary), 0.0);
  EXPECT_NEAR(phi(CarState{5.5, 0, kPi / 2, 10}, Control{}, {}, road, p)(kBoundary), 1.0, 1e-12);
  EXPECT_NEAR(phi(CarState{-6.5, 0, kPi / 2, 10}, Control{}, {}, road, p)(kBoundary), 4.0, 1e-12);
}

TEST(Phi, CollisionEllipseIsLongerAlongHeading) {
  const RoadLayout road = road3();
  const RewardParams p = params_for(road);
  const std::vector<CarState> other = {{0.0, 0.0, kPi / 2, 10.0}};
  const double ahead = phi(CarState{0.0, 3.0, kPi / 2, 10}, Control{}, other, road, p)(kCollision);
  const double beside = phi(CarState{3.0, 0.0, kPi / 2, 10}, Control{}, other, road, p)(kCollision);
  EXPECT_GT(ahead, beside);
}

TEST(Phi, CollisionNeverIncreasesMovingAwayLaterally) {
  const RoadLayout road = road3();
  const RewardParams p = params_for(road);
  Random rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const CarState other{rng.uniform(-3, 3), rng.uniform(-10, 10), kPi / 2 + rng.uniform(-0.3, 0.3),
                         10.0};
    const std::vector<CarState> others = {other};
    const double along = rng.uniform(-6, 6);
    const double side = rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    const double c = std::cos(other.heading), s = std::sin(other.heading);
    double previous = std::numeric_limits<double>::infinity();
    for (double offset = 0.0; offset < 10.0; offset += 0.25) {
      // Fixed distance along the other car's heading, growing distance across it.
      const double x = other.x + along * c - side * offset * s;
      const double y = other.y + along * s + side * offset * c;
      const double value =
          phi(CarState{x, y, kPi / 2, 10}, Control{}, others, road, p)(kCollision);
      if (offset > 0.0) EXPECT_LE(value, previous + 1e-15);
      previous = value;
    }
  }
}

TEST(NominalReward, ZeroThetaIsZero) {
  const RoadLayout road = road3();
  RewardParams p = params_for(road);
  p.theta.setZero();
  Random rng(22);
  const auto env = predict_environment(road, {}, std::vector<CarState>{rng.car()}, p.horizon, 0.1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = rng.controls(p.horizon);
    EXPECT_EQ(nominal_reward<double>(rng.car(), u, env, p, {}), 0.0);
  }
}

TEST(NominalReward, SingleFeatureSumsThatFeature) {
  const RoadLayout road = road3();
  Random rng(23);
  const std::vector<CarState> cars = {rng.car(), rng.car()};
  for (int k = 0; k < kDrivingFeatureCount; ++k) {
    RewardParams p = params_for(road);
    p.theta = Eigen::VectorXd::Unit(kDrivingFeatureCount, k);
    const auto env = predict_environment(road, {}, cars, p.horizon, 0.1);
    const CarState x0 = rng.car();
    const auto u = rng.controls(p.horizon);
    const auto states = rollout(x0, std::span<const Control>(u), {});
    double expected = 0.0;
    for (int t = 0; t <= p.horizon; ++t) {
      const Control& ut = u[std::min(t, p.horizon - 1)];
      expected += phi(states[t], ut, env.at(t), road, p)(k);
    }
    EXPECT_NEAR(nominal_reward<double>(x0, u, env, p, {}), expected, 1e-12) << "feature " << k;
  }
}

// Independent re-implementation: own Euler loop, own feature formulas.
double brute_force_reward(const CarState& x0, const std::vector<Control>& u,
                          const std::vector<std::vector<CarState>>& others, const RoadLayout& road,
                          const RewardParams& p, double dt) {
  double x = x0.x, y = x0.y, h = x0.heading, s = x0.speed;
  double total = 0.0;
  const int horizon = static_cast<int>(u.size());
  for (int t = 0; t <= horizon; ++t) {
    const Control& c = u[std::min(t, horizon - 1)];
    double collision = 0.0;
    for (const CarState& o : others[t]) {
      const double rx = x - o.x, ry = y - o.y;
      const double along = rx * std::cos(o.heading) + ry * std::sin(o.heading);
      const double across = -rx * std::sin(o.heading) + ry * std::cos(o.heading);
      collision += std::exp(-0.5 * std::pow(along / p.shape.collision_sigma_long, 2) -
                            0.5 * std::pow(across / p.shape.collision_sigma_lat, 2));
    }
    const double sigma = p.shape.lane_sigma_fraction * road.lane_width;
    const double lane = std::exp(-0.5 * std::pow((x - road.lane_center(p.target_lane)) / sigma, 2));
    const double left = road.left_edge;
    const double right = road.right_edge();
    const double boundary = std::pow(std::max(0.0, x - right), 2) + std::pow(std::max(0.0, left - x), 2);
    const double features[] = {collision, lane, boundary, -std::pow(s - p.target_speed, 2),
                               -c.steering * c.steering, -c.accel * c.accel};
    for (int k = 0; k < 6; ++k) total += p.theta(k) * features[k];
    if (t == horizon) break;
    const double nx = x + dt * s * std::cos(h);
    const double ny = y + dt * s * std::sin(h);
    const double nh = h + dt * s * c.steering;
    const double ns = std::max(0.0, s + dt * c.accel);
    x = nx, y = ny, h = nh, s = ns;
  }
  return total;
}

TEST(NominalReward, MatchesBruteForceReevaluation) {
  const RoadLayout road = road3();
  Random rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    RewardParams p = params_for(road);
    p.horizon = rng.integer(1, 8);
    for (int k = 0; k < kDrivingFeatureCount; ++k) p.theta(k) = rng.uniform(-50, 50);
    std::vector<CarState> now(rng.integer(0, 4));
    std::vector<CarState> before(now.size());
    for (std::size_t c = 0; c < now.size(); ++c) {
      now[c] = rng.car();
      before[c] = {now[c].x - rng.uniform(-0.3, 0.3), now[c].y - rng.uniform(0.5, 1.5),
                   now[c].heading, now[c].speed};
    }
    const auto env = predict_environment(road, before, now, p.horizon, 0.1);
    const CarState x0 = rng.car();
    const auto u = rng.controls(p.horizon);
    const double expected = brute_force_reward(x0, u, env.others, road, p, 0.1);
    EXPECT_NEAR(nominal_reward<double>(x0, u, env, p, {}), expected,
                1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST(NominalReward, LinearInTheta) {
  const RoadLayout road = road3();
  Random rng(25);
  for (int trial = 0; trial < 50; ++trial) {
    RewardParams a = params_for(road), b = params_for(road), mix = params_for(road);
    for (int k = 0; k < kDrivingFeatureCount; ++k) {
      a.theta(k) = rng.uniform(-10, 10);
      b.theta(k) = rng.uniform(-10, 10);
    }
    const double alpha = rng.uniform(-3, 3);
    mix.theta = alpha * a.theta + b.theta;
    const auto env = predict_environment(road, {}, std::vector<CarState>{rng.car()}, a.horizon, 0.1);
    const CarState x0 = rng.car();
    const auto u = rng.controls(a.horizon);
    const double lhs = nominal_reward<double>(x0, u, env, mix, {});
    const double rhs = alpha * nominal_reward<double>(x0, u, env, a, {}) +
                       nominal_reward<double>(x0, u, env, b, {});
    EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(NominalReward, RejectsWrongControlCount) {
  const RoadLayout road = road3();
  const RewardParams p = params_for(road);
  const EnvironmentSnapshot env{road, {}};
  const std::vector<Control> u(p.horizon + 1);
  EXPECT_THROW(nominal_reward<double>(CarState{}, u, env, p, {}), std::invalid_argument);
}

TEST(NominalReward, GradientMatchesCentralDifferences) {
  RoadLayout road = road3();
  road.exit = ExitLane{2, 10.0, 40.0};
  Random rng(26);
  for (int trial = 0; trial < 40; ++trial) {
    const RewardParams p = params_for(road);
    const auto env =
        predict_environment(road, {}, std::vector<CarState>{rng.car(), rng.car()}, p.horizon, 0.1);
    const CarState x0 = rng.car(-6.0, 6.0);
    const auto objective = [&](const auto& flat) {
      using S = typename std::decay_t<decltype(flat)>::Scalar;
      const auto u = unflatten_controls<S>(flat);
      return nominal_reward<S>(x0.cast<S>(), u, env, p, {});
    };
    const Eigen::VectorXd point = flatten_controls(rng.controls(p.horizon));
    const Eigen::VectorXd exact = gradient(objective, point);
    const Eigen::VectorXd numeric = testing::central_difference(
        [&](const Eigen::VectorXd& v) { return objective(Vector<double>(v)); }, point);
    EXPECT_LT(testing::relative_error(exact, numeric), 1e-4);
  }
}

TEST(Prediction, ConstantVelocityFromTwoObservations) {
  const RoadLayout road = road3();
  const std::vector<CarState> before = {{0.0, 0.0, kPi / 2, 10.0}};
  const std::vector<CarState> now = {{0.2, 1.0, kPi / 2, 10.0}};
  const auto env = predict_environment(road, before, now, 3, 0.1);
  ASSERT_EQ(env.others.size(), 4u);
  EXPECT_NEAR(env.at(3)[0].x, 0.8, 1e-12);
  EXPECT_NEAR(env.at(3)[0].y, 4.0, 1e-12);
  EXPECT_EQ(env.at(99)[0].y, env.at(3)[0].y);
}

TEST(Prediction, FallsBackToOwnVelocity) {
  const RoadLayout road = road3();
  const std::vector<CarState> now = {{0.0, 0.0, 0.0, 10.0}};
  const auto env = predict_environment(road, {}, now, 2, 0.1);
  EXPECT_NEAR(env.at(2)[0].x, 2.0, 1e-12);
  EXPECT_NEAR(env.at(2)[0].y, 0.0, 1e-12);
}

TEST(RewardParamsTest, Validate) {
  const RoadLayout road = road3();
  RewardParams p;
  EXPECT_NO_THROW(p.validate(road));
  p.theta = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(p.validate(road), std::invalid_argument);
  p = RewardParams{};
  p.horizon = 0;
  EXPECT_THROW(p.validate(road), std::invalid_argument);
  p = RewardParams{};
  p.target_lane = 3;
  EXPECT_THROW(p.validate(road), std::invalid_argument);
}

}  // namespace
}  // namespace cohesion
