#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cohesion/driving_features.hpp"
#include "cohesion/dynamics.hpp"
#include "cohesion/planner.hpp"
#include "cohesion/road.hpp"
#include "cohesion/social.hpp"

namespace cohesion {

/// An open-loop human driver: trajectory[t] is its state at step t.
struct ScriptedCar {
  int id = 0;
  std::vector<CarState> trajectory;
};

/// Something the robot cannot perceive but can still hit.
struct HiddenObstacle {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;
};

struct Scenario {
  std::string name;
  RoadLayout road;
  CarState robot_start;
  int target_lane = 1;
  double target_speed = 10.0;
  std::vector<ScriptedCar> cars;
  std::vector<HiddenObstacle> hidden_obstacles;
  int duration = 100;
  /// Step of the scripted trajectories; the simulation must use the same dt.
  double dt = 0.1;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  std::vector<CarState> cars_at(int t) const;
};

struct ScenarioOverrides {
  std::optional<int> duration;
  std::optional<double> noise_sigma;
  std::optional<std::uint64_t> seed;
  /// Rigid translation applied to everything in the scenario.
  double shift_x = 0.0;
  double shift_y = 0.0;
};

/// stalled, ambulance, speeding, exit, nothing_to_match, speed_commonality, noisy_swerve.
const std::vector<std::string>& scenario_names();

Scenario build_scenario(const std::string& name, const ScenarioOverrides& overrides = {});

/// Builds a trajectory from positions; heading and speed of state t are the
/// ones that carry position t to position t + 1 in one Euler step.
std::vector<CarState> trajectory_from_positions(const std::vector<Eigen::Vector2d>& positions,
                                                double dt);

struct SimulationConfig {
  DynamicsParams dynamics;
  RewardParams reward;
  GroupConfig groups;
  PlannerConfig planner;
  double collision_threshold = 1.0;

  void validate(const RoadLayout& road) const;
};

struct OutcomeMetrics {
  bool collided = false;
  double min_clearance = 0.0;
  int final_lane = 0;
  double mean_speed = 0.0;
  bool took_exit = false;
  /// Largest per-step |cohesive - nominal| applied control, per component,
  /// normalized by the control bounds. Only filled in for paired runs.
  std::optional<Control> max_deviation_from_nominal;

  bool operator==(const OutcomeMetrics&) const = default;
};

/// Everything recorded about one simulation step. The record at
/// step == duration is terminal: it carries the final states only.
struct StepRecord {
  int step = 0;
  bool terminal = false;
  CarState robot;
  Control applied;
  double objective = 0.0;
  double penalty = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
  FeatureGroupMatrix precision = FeatureGroupMatrix::Zero();
  std::vector<CarState> cars;
};

struct SimulationResult {
  std::vector<CarState> robot;  ///< duration + 1 states
  std::vector<Control> controls;
  std::vector<StepRecord> trace;
  OutcomeMetrics metrics;
};

/// Clearance between the robot and every car / hidden obstacle at one step.
double clearance(const CarState& robot, std::span<const CarState> cars,
                 std::span<const HiddenObstacle> hidden);

/// Metrics from a robot trajectory and the matching per-step car states.
OutcomeMetrics compute_metrics(std::span<const CarState> robot,
                               const std::vector<std::vector<CarState>>& cars,
                               const Scenario& scenario, double collision_threshold);

/// observe -> statistics -> plan -> apply, for scenario.duration steps.
SimulationResult simulate(const Scenario& scenario, const SimulationConfig& config);

/// Per-component max |a - b| over paired control streams, normalized by bounds.
Control max_control_deviation(std::span<const Control> a, std::span<const Control> b,
                              const DynamicsParams& dynamics);

struct SweepRow {
  double sigma = 0.0;
  std::uint64_t seed = 0;
  bool collided = false;
  double min_clearance = 0.0;
};

/// One cohesive run of noisy_swerve per (sigma, seed).
std::vector<SweepRow> noise_sweep(std::span<const double> sigmas,
                                  std::span<const std::uint64_t> seeds,
                                  const SimulationConfig& config, const ScenarioOverrides& base = {});

}  // namespace cohesion
