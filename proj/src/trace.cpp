#include "cohesion/trace.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace cohesion {

using nlohmann::json;

namespace {

json state_to_json(const CarState& s) {
  return {{"x", s.x}, {"y", s.y}, {"heading", s.heading}, {"speed", s.speed}};
}

CarState state_from_json(const json& j) {
  return {j.at("x").get<double>(), j.at("y").get<double>(), j.at("heading").get<double>(),
          j.at("speed").get<double>()};
}

json control_to_json(const Control& c) { return {{"steering", c.steering}, {"accel", c.accel}}; }

Control control_from_json(const json& j) {
  return {j.at("steering").get<double>(), j.at("accel").get<double>()};
}

}  // namespace

json record_to_json(const StepRecord& r) {
  std::vector<double> precision;
  precision.reserve(static_cast<std::size_t>(r.precision.size()));
  for (int i = 0; i < kSocialFeatureCount; ++i) {
    for (int j = 0; j < kGroupCount; ++j) precision.push_back(r.precision(i, j));
  }
  json cars = json::array();
  for (const auto& c : r.cars) cars.push_back(state_to_json(c));

  json out = {{"step", r.step},
              {"terminal", r.terminal},
              {"robot", state_to_json(r.robot)},
              {"applied", r.terminal ? json(nullptr) : control_to_json(r.applied)},
              {"objective", r.objective},
              {"penalty", r.penalty},
              {"iterations", r.iterations},
              {"gradient_norm", r.gradient_norm},
              {"precision", precision},
              {"cars", cars}};
  return out;
}

StepRecord record_from_json(const json& j) {
  StepRecord r;
  r.step = j.at("step").get<int>();
  r.terminal = j.at("terminal").get<bool>();
  r.robot = state_from_json(j.at("robot"));
  if (!j.at("applied").is_null()) r.applied = control_from_json(j.at("applied"));
  r.objective = j.at("objective").get<double>();
  r.penalty = j.at("penalty").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.gradient_norm = j.at("gradient_norm").get<double>();
  const auto precision = j.at("precision").get<std::vector<double>>();
  if (precision.size() != static_cast<std::size_t>(r.precision.size())) {
    throw std::invalid_argument("trace: precision must have k * M entries");
  }
  for (int i = 0; i < kSocialFeatureCount; ++i) {
    for (int g = 0; g < kGroupCount; ++g) r.precision(i, g) = precision[i * kGroupCount + g];
  }
  for (const auto& c : j.at("cars")) r.cars.push_back(state_from_json(c));
  return r;
}

void write_trace(std::ostream& out, const std::vector<StepRecord>& trace) {
  for (const auto& record : trace) out << record_to_json(record).dump() << '\n';
}

std::vector<StepRecord> read_trace(std::istream& in) {
  std::vector<StepRecord> trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    trace.push_back(record_from_json(json::parse(line)));
  }
  return trace;
}

OutcomeMetrics metrics_from_trace(const std::vector<StepRecord>& trace, const Scenario& scenario,
                                  double collision_threshold) {
  std::vector<CarState> robot;
  std::vector<std::vector<CarState>> cars;
  for (const auto& record : trace) {
    robot.push_back(record.robot);
    cars.push_back(record.cars);
  }
  return compute_metrics(robot, cars, scenario, collision_threshold);
}

json metrics_to_json(const OutcomeMetrics& m) {
  json out = {{"collided", m.collided},
              {"min_clearance", m.min_clearance},
              {"final_lane", m.final_lane},
              {"mean_speed", m.mean_speed},
              {"took_exit", m.took_exit},
              {"max_deviation_from_nominal", nullptr}};
  if (m.max_deviation_from_nominal) {
    out["max_deviation_from_nominal"] = control_to_json(*m.max_deviation_from_nominal);
  }
  return out;
}

OutcomeMetrics metrics_from_json(const json& j) {
  OutcomeMetrics m;
  m.collided = j.at("collided").get<bool>();
  m.min_clearance = j.at("min_clearance").get<double>();
  m.final_lane = j.at("final_lane").get<int>();
  m.mean_speed = j.at("mean_speed").get<double>();
  m.took_exit = j.at("took_exit").get<bool>();
  if (!j.at("max_deviation_from_nominal").is_null()) {
    m.max_deviation_from_nominal = control_from_json(j.at("max_deviation_from_nominal"));
  }
  return m;
}

json summary_to_json(const RunSummary& s) {
  return {{"scenario", s.scenario},
          {"planner", to_string(s.mode)},
          {"beta", s.beta},
          {"seed", s.seed},
          {"metrics", metrics_to_json(s.metrics)},
          {"wall_clock_seconds", s.wall_clock_seconds}};
}

RunSummary summary_from_json(const json& j) {
  RunSummary s;
  s.scenario = j.at("scenario").get<std::string>();
  s.mode = planner_mode_from_string(j.at("planner").get<std::string>());
  s.beta = j.at("beta").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.metrics = metrics_from_json(j.at("metrics"));
  s.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
  return s;
}

}  // namespace cohesion
