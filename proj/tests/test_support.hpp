#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "cohesion/driving_features.hpp"
#include "cohesion/dynamics.hpp"
#include "cohesion/planner.hpp"
#include "cohesion/scenarios.hpp"

namespace cohesion::testing {

/// Central differences, h scaled to the magnitude of each coordinate.
inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x(i)));
    Eigen::VectorXd plus = x;
    Eigen::VectorXd minus = x;
    plus(i) += step;
    minus(i) -= step;
    g(i) = (f(plus) - f(minus)) / (2.0 * step);
  }
  return g;
}

/// ||a - b|| / max(||a||, ||b||, floor).
inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                             double floor = 1e-8) {
  const double scale = std::max({a.norm(), b.norm(), floor});
  return (a - b).norm() / scale;
}

class Random {
 public:
  explicit Random(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  CarState car(double x_lo = -4.0, double x_hi = 4.0) {
    return {uniform(x_lo, x_hi), uniform(-20.0, 60.0), uniform(1.2, 1.9), uniform(5.0, 14.0)};
  }

  std::vector<Control> controls(int count, double steering_max = 0.9, double accel_max = 3.5) {
    std::vector<Control> u(count);
    for (auto& c : u) c = {uniform(-steering_max, steering_max), uniform(-accel_max, accel_max)};
    return u;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// The planning problem the robot faces at step t of a scenario, rebuilt from
/// a short simulation.
struct PlanningSnapshot {
  Scenario scenario;
  SimulationConfig config;
  CarState robot;
  GroupStatistics stats;
  EnvironmentSnapshot env;
  RewardParams reward;
  int time = 0;

  PlanningSnapshot(const std::string& name, int t)
      : scenario(build_scenario(name)), env{scenario.road, {}}, time(t) {
    reward = config.reward;
    reward.target_lane = scenario.target_lane;
    reward.target_speed = scenario.target_speed;

    Scenario shortened = scenario;
    shortened.duration = t;
    const SimulationResult run = simulate(shortened, config);
    robot = run.robot.back();

    SampleHistory history(config.groups.normalization);
    for (int s = 1; s <= t; ++s) history.observe(s - 1, scenario.cars_at(s - 1), scenario.cars_at(s));
    stats = history.statistics(robot, t, scenario.road, config.groups);
    set_horizon(reward.horizon);
  }

  void set_horizon(int horizon) {
    reward.horizon = horizon;
    const std::vector<CarState> previous =
        time > 0 ? scenario.cars_at(time - 1) : std::vector<CarState>{};
    env = predict_environment(scenario.road, previous, scenario.cars_at(time), horizon,
                              config.dynamics.dt);
  }

  PlanningProblem problem() const {
    return {robot, &env, &stats, reward, config.dynamics, config.groups.normalization};
  }
};

}  // namespace cohesion::testing
