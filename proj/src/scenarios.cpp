#include "cohesion/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>

namespace cohesion {

namespace {

constexpr double kDt = 0.1;
constexpr double kUp = kPi / 2.0;

using Positions = std::vector<Eigen::Vector2d>;

// Cars drive at a constant longitudinal speed; the lateral offset is a
// function of how far up the road they are.
Positions path_positions(double y0, double speed, int count,
                         const std::function<double(double)>& x_of_y) {
  Positions p(count);
  for (int t = 0; t < count; ++t) {
    const double y = y0 + speed * kDt * t;
    p[t] = {x_of_y(y), y};
  }
  return p;
}

Positions timed_positions(double y0, double speed, int count,
                          const std::function<double(double)>& x_of_time) {
  Positions p(count);
  for (int t = 0; t < count; ++t) p[t] = {x_of_time(kDt * t), y0 + speed * kDt * t};
  return p;
}

struct Weave {
  double x0, y0;
  double speed, speed_swing, speed_rate, speed_phase;
  double heading_swing, heading_rate, heading_phase;
};

// Integrates a weaving heading/speed profile with the vehicle's own Euler step,
// then re-centers the lateral oscillation on x0.
Positions weave_positions(const Weave& w, int count) {
  Positions p(count);
  Eigen::Vector2d at(0.0, w.y0);
  double lateral_sum = 0.0;
  for (int t = 0; t < count; ++t) {
    p[t] = at;
    lateral_sum += at.x();
    const double time = kDt * t;
    const double speed = w.speed + w.speed_swing * std::sin(w.speed_rate * time + w.speed_phase);
    const double heading =
        kUp + w.heading_swing * std::sin(w.heading_rate * time + w.heading_phase);
    at += kDt * speed * Eigen::Vector2d(std::cos(heading), std::sin(heading));
  }
  const double offset = w.x0 - lateral_sum / count;
  for (auto& q : p) q.x() += offset;
  return p;
}

// Lateral offset moving from 0 to `shift` over [start, start + length].
double ramp(double v, double start, double length, double shift) {
  return shift * smoothstep((v - start) / length);
}

RoadLayout three_lane_road() { return RoadLayout{3, 3.0, -4.5, std::nullopt}; }

CarState robot_in_lane(const RoadLayout& road, int lane, double speed) {
  return {road.lane_center(lane), 0.0, kUp, speed};
}

void add_car(Scenario& s, const Positions& positions) {
  s.cars.push_back({static_cast<int>(s.cars.size()), trajectory_from_positions(positions, kDt)});
}

// Three cars ahead in the robot's lane swerve one lane left around a stalled
// car the robot cannot see, then return.
Scenario stalled(int count) {
  Scenario s;
  s.name = "stalled";
  s.road = three_lane_road();
  s.target_lane = 1;
  s.target_speed = 10.0;
  s.robot_start = robot_in_lane(s.road, 1, 10.0);
  s.duration = 150;
  const double lane = s.road.lane_center(1);
  const double width = s.road.lane_width;
  const auto swerve = [=](double y) {
    return lane + ramp(y, 60.0, 25.0, -width) - ramp(y, 115.0, 25.0, -width);
  };
  for (double y0 : {15.0, 27.0, 39.0}) add_car(s, path_positions(y0, 10.0, count, swerve));
  s.hidden_obstacles.push_back({lane, 100.0, 0.0});
  return s;
}

// An ambulance comes up the far-left lane; every other car moves one lane to
// the right at the same time.
Scenario ambulance(int count) {
  Scenario s;
  s.name = "ambulance";
  s.road = three_lane_road();
  s.target_lane = 1;
  s.target_speed = 10.0;
  s.robot_start = robot_in_lane(s.road, 1, 10.0);
  s.duration = 120;
  const double width = s.road.lane_width;
  struct Start { int lane; double y; };
  for (const Start c : {Start{1, 20.0}, Start{1, 34.0}, Start{0, 12.0}}) {
    const double x = s.road.lane_center(c.lane);
    add_car(s, timed_positions(c.y, 10.0, count,
                               [=](double time) { return x + ramp(time, 1.0, 2.5, width); }));
  }
  const double far_left = s.road.lane_center(0);
  add_car(s, timed_positions(-80.0, 22.0, count, [=](double) { return far_left; }));
  return s;
}

// Everyone drives straight a little above the robot's target speed.
Scenario speeding(int count) {
  Scenario s;
  s.name = "speeding";
  s.road = three_lane_road();
  s.target_lane = 1;
  s.target_speed = 10.0;
  s.robot_start = robot_in_lane(s.road, 1, 10.0);
  s.duration = 150;
  constexpr double kCommon = 12.0;
  struct Start { int lane; double y; };
  for (const Start c : {Start{0, -10.0}, Start{0, 14.0}, Start{2, -18.0}, Start{2, 6.0},
                        Start{1, 20.0}}) {
    const double x = s.road.lane_center(c.lane);
    add_car(s, timed_positions(c.y, kCommon, count, [=](double) { return x; }));
  }
  return s;
}

// The robot's (rightmost) lane has an exit; the three cars ahead take it.
Scenario highway_exit(int count) {
  Scenario s;
  s.name = "exit";
  s.road = three_lane_road();
  s.road.exit = ExitLane{2, 80.0, 120.0};
  s.target_lane = 2;
  s.target_speed = 10.0;
  s.robot_start = robot_in_lane(s.road, 2, 10.0);
  s.duration = 150;
  const double lane = s.road.lane_center(2);
  const double width = s.road.lane_width;
  const auto take_exit = [=](double y) { return lane + ramp(y, 80.0, 40.0, width); };
  for (double y0 : {15.0, 27.0, 39.0}) add_car(s, path_positions(y0, 10.0, count, take_exit));
  return s;
}

// Weaving cars in the outer lanes of a seven-lane road, well clear of the
// robot in the middle lane. With common_speed set, every car keeps that speed;
// otherwise speeds differ per car and fluctuate.
Scenario weaving(const std::string& name, int count, std::optional<double> common_speed) {
  Scenario s;
  s.name = name;
  s.road = RoadLayout{7, 3.0, -10.5, std::nullopt};
  s.target_lane = 3;
  s.target_speed = 10.0;
  s.robot_start = robot_in_lane(s.road, 3, 10.0);
  s.duration = 100;
  const double left = s.road.lane_center(0);
  const double right = s.road.lane_center(6);
  const std::vector<Weave> weaves = {
      {left, 21.7, 10.0, 3.1, 1.3, 1.2, 0.77, 4.3, 1.5},
      {right, 8.3, 9.5, 2.9, 1.2, 5.7, 0.67, 4.4, 1.6},
      {left, 1.7, 10.5, 2.6, 1.4, 2.4, 0.73, 5.1, 4.3},
      {right, 25.0, 10.0, 3.4, 1.8, 3.7, 0.62, 4.2, 5.9},
      {left, 5.0, 10.0, 2.8, 1.8, 3.6, 0.75, 6.8, 1.8},
      {right, -11.7, 9.9, 3.7, 0.9, 4.8, 0.62, 6.2, 4.4},
      {left, 18.3, 10.4, 3.6, 1.3, 1.2, 0.63, 5.7, 3.2},
      {right, 11.7, 9.6, 3.7, 1.3, 4.4, 0.64, 4.8, 0.1},
      {left, 15.0, 9.8, 2.9, 1.2, 2.4, 0.77, 6.9, 1.1},
      {right, -21.7, 9.9, 2.8, 1.5, 6.1, 0.64, 6.5, 1.9},
      {left, -25.0, 9.5, 3.5, 1.1, 1.1, 0.69, 4.7, 2.6},
      {right, -15.0, 9.9, 3.1, 1.4, 1.8, 0.61, 4.3, 0.7},
      {left, -18.3, 10.0, 3.0, 1.7, 3.2, 0.74, 7.1, 0.4},
      {right, -5.0, 9.5, 2.7, 1.2, 3.6, 0.75, 5.1, 6.1},
      {left, -8.3, 9.5, 3.6, 1.0, 5.5, 0.60, 7.1, 4.8},
      {right, -1.7, 10.5, 3.3, 0.9, 6.1, 0.69, 4.3, 3.8},
  };
  for (Weave w : weaves) {
    if (common_speed) {
      w.speed = *common_speed;
      w.speed_swing = 0.0;
    }
    add_car(s, weave_positions(w, count));
  }
  return s;
}

void translate(Scenario& s, double dx, double dy) {
  if (dx == 0.0 && dy == 0.0) return;
  s.road = s.road.translated(dx, dy);
  s.robot_start.x += dx;
  s.robot_start.y += dy;
  for (auto& car : s.cars) {
    for (auto& state : car.trajectory) {
      state.x += dx;
      state.y += dy;
    }
  }
  for (auto& h : s.hidden_obstacles) {
    h.x += dx;
    h.y += dy;
  }
}

// Gaussian jitter on every scripted position; heading and speed are re-derived.
void add_noise(Scenario& s, double sigma, std::uint64_t seed) {
  if (sigma == 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& car : s.cars) {
    Positions p(car.trajectory.size());
    for (std::size_t t = 0; t < p.size(); ++t) {
      p[t] = {car.trajectory[t].x + noise(rng), car.trajectory[t].y + noise(rng)};
    }
    car.trajectory = trajectory_from_positions(p, kDt);
  }
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "stalled", "ambulance", "speeding", "exit", "nothing_to_match", "speed_commonality",
      "noisy_swerve"};
  return names;
}

std::vector<CarState> trajectory_from_positions(const std::vector<Eigen::Vector2d>& positions,
                                                double dt) {
  if (positions.size() < 2) {
    throw std::invalid_argument("trajectory_from_positions: need at least two positions");
  }
  std::vector<CarState> states(positions.size());
  for (std::size_t t = 0; t < positions.size(); ++t) {
    const std::size_t from = t + 1 < positions.size() ? t : t - 1;
    const Eigen::Vector2d delta = positions[from + 1] - positions[from];
    states[t] = {positions[t].x(), positions[t].y(), std::atan2(delta.y(), delta.x()),
                 delta.norm() / dt};
  }
  return states;
}

void Scenario::validate() const {
  road.validate();
  if (duration < 1) throw std::invalid_argument("scenario: duration must be >= 1");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("scenario: noise_sigma must be >= 0");
  if (target_lane < 0 || target_lane >= road.lane_count) {
    throw std::invalid_argument("scenario: target_lane out of range");
  }
  for (const auto& car : cars) {
    if (car.trajectory.size() < static_cast<std::size_t>(duration) + 1) {
      throw std::invalid_argument("scenario: car " + std::to_string(car.id) +
                                  " does not cover the full duration");
    }
  }
}

std::vector<CarState> Scenario::cars_at(int t) const {
  std::vector<CarState> states;
  states.reserve(cars.size());
  for (const auto& car : cars) states.push_back(car.trajectory.at(t));
  return states;
}

Scenario build_scenario(const std::string& name, const ScenarioOverrides& overrides) {
  if (overrides.duration && *overrides.duration < 1) {
    throw std::invalid_argument("scenario override: duration must be >= 1");
  }
  if (overrides.noise_sigma && !(*overrides.noise_sigma >= 0.0)) {
    throw std::invalid_argument("scenario override: noise_sigma must be >= 0");
  }
  if (!std::isfinite(overrides.shift_x) || !std::isfinite(overrides.shift_y)) {
    throw std::invalid_argument("scenario override: translation must be finite");
  }

  // Long enough for the default duration of every scenario and any override.
  const int count = std::max(overrides.duration.value_or(0), 200) + 1;

  Scenario s;
  if (name == "stalled") {
    s = stalled(count);
  } else if (name == "ambulance") {
    s = ambulance(count);
  } else if (name == "speeding") {
    s = speeding(count);
  } else if (name == "exit") {
    s = highway_exit(count);
  } else if (name == "nothing_to_match") {
    s = weaving(name, count, std::nullopt);
  } else if (name == "speed_commonality") {
    s = weaving(name, count, 13.0);
  } else if (name == "noisy_swerve") {
    s = stalled(count);
    s.name = name;
    s.noise_sigma = 0.05;
  } else {
    throw std::invalid_argument("unknown scenario '" + name + "'");
  }

  if (overrides.duration) s.duration = *overrides.duration;
  if (overrides.noise_sigma) s.noise_sigma = *overrides.noise_sigma;
  if (overrides.seed) s.seed = *overrides.seed;
  if (name == "noisy_swerve") add_noise(s, s.noise_sigma, s.seed);
  translate(s, overrides.shift_x, overrides.shift_y);
  s.validate();
  return s;
}

void SimulationConfig::validate(const RoadLayout& road) const {
  dynamics.validate();
  reward.validate(road);
  groups.validate();
  planner.validate();
  if (!(collision_threshold > 0.0)) {
    throw std::invalid_argument("config: collision_threshold must be > 0");
  }
}

double clearance(const CarState& robot, std::span<const CarState> cars,
                 std::span<const HiddenObstacle> hidden) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& car : cars) best = std::min(best, std::hypot(robot.x - car.x, robot.y - car.y));
  for (const auto& h : hidden) {
    best = std::min(best, std::max(0.0, std::hypot(robot.x - h.x, robot.y - h.y) - h.radius));
  }
  return best;
}

OutcomeMetrics compute_metrics(std::span<const CarState> robot,
                               const std::vector<std::vector<CarState>>& cars,
                               const Scenario& scenario, double collision_threshold) {
  if (robot.empty() || cars.size() != robot.size()) {
    throw std::invalid_argument("compute_metrics: robot and car streams differ in length");
  }
  OutcomeMetrics m;
  m.min_clearance = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < robot.size(); ++t) {
    m.min_clearance = std::min(m.min_clearance,
                               clearance(robot[t], cars[t], scenario.hidden_obstacles));
  }
  m.collided = m.min_clearance < collision_threshold;

  const CarState& last = robot.back();
  m.final_lane = scenario.road.lane_index(last.x);

  const std::size_t tail = std::max<std::size_t>(1, robot.size() / 4);
  double sum = 0.0;
  for (std::size_t t = robot.size() - tail; t < robot.size(); ++t) sum += robot[t].speed;
  m.mean_speed = sum / static_cast<double>(tail);

  if (const auto& exit = scenario.road.exit) {
    const double threshold = scenario.road.lane_center(exit->lane) + 0.5 * scenario.road.lane_width;
    m.took_exit = last.y >= exit->end_y && last.x >= threshold;
  }
  return m;
}

SimulationResult simulate(const Scenario& scenario, const SimulationConfig& config) {
  scenario.validate();
  RewardParams reward = config.reward;
  reward.target_lane = scenario.target_lane;
  reward.target_speed = scenario.target_speed;
  SimulationConfig effective = config;
  effective.reward = reward;
  effective.validate(scenario.road);
  if (std::abs(config.dynamics.dt - scenario.dt) > 1e-12) {
    throw std::invalid_argument("simulate: dynamics dt differs from the scenario's script step");
  }

  SampleHistory history(config.groups.normalization);
  MpcController mpc(config.planner);
  SimulationResult result;
  result.robot.reserve(scenario.duration + 1);
  result.robot.push_back(scenario.robot_start);
  std::vector<std::vector<CarState>> car_stream;

  std::vector<CarState> previous;
  for (int t = 0; t <= scenario.duration; ++t) {
    const std::vector<CarState> current = scenario.cars_at(t);
    if (t > 0) history.observe(t - 1, previous, current);
    const CarState robot = result.robot.back();
    const GroupStatistics stats = history.statistics(robot, t, scenario.road, config.groups);

    StepRecord record;
    record.step = t;
    record.robot = robot;
    record.precision = stats.precision();
    record.cars = current;
    car_stream.push_back(current);

    if (t == scenario.duration) {
      record.terminal = true;
      result.trace.push_back(std::move(record));
      break;
    }

    const EnvironmentSnapshot env =
        predict_environment(scenario.road, previous, current, reward.horizon, config.dynamics.dt);
    const PlanningProblem problem{robot, &env, &stats, reward, config.dynamics,
                                  config.groups.normalization};
    Control applied;
    try {
      applied = mpc.step(problem);
    } catch (const std::exception& e) {
      throw std::runtime_error("simulate: step " + std::to_string(t) + ": " + e.what());
    }
    const PlanResult& plan_result = mpc.last_plan();
    record.applied = applied;
    record.objective = plan_result.objective;
    record.penalty = PlanObjective(problem, config.planner).penalty(plan_result.controls);
    record.iterations = plan_result.iterations;
    record.gradient_norm = plan_result.gradient_norm;
    result.trace.push_back(std::move(record));

    result.controls.push_back(applied);
    result.robot.push_back(step(robot, applied, config.dynamics));
    previous = current;
  }

  result.metrics = compute_metrics(result.robot, car_stream, scenario, config.collision_threshold);
  return result;
}

Control max_control_deviation(std::span<const Control> a, std::span<const Control> b,
                              const DynamicsParams& dynamics) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("max_control_deviation: streams differ in length");
  }
  Control worst{0.0, 0.0};
  for (std::size_t t = 0; t < a.size(); ++t) {
    worst.steering = std::max(worst.steering,
                              std::abs(a[t].steering - b[t].steering) / dynamics.steering_max);
    worst.accel = std::max(worst.accel, std::abs(a[t].accel - b[t].accel) / dynamics.accel_max);
  }
  return worst;
}

std::vector<SweepRow> noise_sweep(std::span<const double> sigmas,
                                  std::span<const std::uint64_t> seeds,
                                  const SimulationConfig& config, const ScenarioOverrides& base) {
  for (double sigma : sigmas) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("noise_sweep: sigmas must be >= 0");
  }
  SimulationConfig cohesive = config;
  cohesive.planner.mode = PlannerMode::kCohesive;

  std::vector<SweepRow> rows;
  rows.reserve(sigmas.size() * seeds.size());
  for (double sigma : sigmas) {
    for (std::uint64_t seed : seeds) {
      ScenarioOverrides overrides = base;
      overrides.noise_sigma = sigma;
      overrides.seed = seed;
      const Scenario scenario = build_scenario("noisy_swerve", overrides);
      const SimulationResult run = simulate(scenario, cohesive);
      rows.push_back({sigma, seed, run.metrics.collided, run.metrics.min_clearance});
    }
  }
  return rows;
}

}  // namespace cohesion
