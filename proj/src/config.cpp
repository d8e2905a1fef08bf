#include "cohesion/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace cohesion {

namespace {

using nlohmann::json;

void check_keys(const json& section, const std::string& where, const std::set<std::string>& known) {
  if (!section.is_object()) throw std::invalid_argument("config: '" + where + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    if (!known.contains(key)) {
      throw std::invalid_argument("config: unknown key '" + where + "." + key + "'");
    }
  }
}

template <typename T>
void read(const json& section, const char* key, T& out) {
  if (section.contains(key)) out = section.at(key).get<T>();
}

void merge_scenario(const json& j, RunConfig& cfg) {
  check_keys(j, "scenario", {"name", "duration", "noise_sigma", "seed", "shift"});
  read(j, "name", cfg.scenario);
  if (j.contains("duration")) cfg.overrides.duration = j.at("duration").get<int>();
  if (j.contains("noise_sigma")) cfg.overrides.noise_sigma = j.at("noise_sigma").get<double>();
  if (j.contains("seed")) cfg.overrides.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("shift")) {
    const auto shift = j.at("shift").get<std::vector<double>>();
    if (shift.size() != 2) throw std::invalid_argument("config: scenario.shift must be [dx, dy]");
    cfg.overrides.shift_x = shift[0];
    cfg.overrides.shift_y = shift[1];
  }
}

void merge_dynamics(const json& j, DynamicsParams& d) {
  check_keys(j, "dynamics", {"friction", "dt", "steering_max", "accel_max"});
  read(j, "friction", d.friction);
  read(j, "dt", d.dt);
  read(j, "steering_max", d.steering_max);
  read(j, "accel_max", d.accel_max);
}

void merge_reward(const json& j, RewardParams& r) {
  check_keys(j, "reward", {"theta", "horizon", "collision_sigma_long", "collision_sigma_lat",
                           "lane_sigma_fraction"});
  if (j.contains("theta")) {
    const auto theta = j.at("theta").get<std::vector<double>>();
    r.theta = Eigen::Map<const Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
  }
  read(j, "horizon", r.horizon);
  read(j, "collision_sigma_long", r.shape.collision_sigma_long);
  read(j, "collision_sigma_lat", r.shape.collision_sigma_lat);
  read(j, "lane_sigma_fraction", r.shape.lane_sigma_fraction);
}

void merge_groups(const json& j, GroupConfig& g) {
  check_keys(j, "groups", {"position_radius", "road_radius", "recency_window", "variance_floor",
                           "normalization"});
  read(j, "position_radius", g.position_radius);
  read(j, "road_radius", g.road_radius);
  read(j, "recency_window", g.recency_window);
  read(j, "variance_floor", g.variance_floor);
  if (j.contains("normalization")) {
    const json& n = j.at("normalization");
    check_keys(n, "groups.normalization", {"delta_x", "delta_y", "delta_heading", "displacement"});
    read(n, "delta_x", g.normalization.delta_x);
    read(n, "delta_y", g.normalization.delta_y);
    read(n, "delta_heading", g.normalization.delta_heading);
    read(n, "displacement", g.normalization.displacement);
  }
}

void merge_planner(const json& j, PlannerConfig& p) {
  check_keys(j, "planner", {"mode", "beta", "warm_start", "bound_penalty", "max_iterations",
                            "gradient_tolerance", "history", "armijo", "backtrack",
                            "max_line_search"});
  if (j.contains("mode")) p.mode = planner_mode_from_string(j.at("mode").get<std::string>());
  read(j, "beta", p.beta);
  read(j, "warm_start", p.warm_start);
  read(j, "bound_penalty", p.bound_penalty);
  read(j, "max_iterations", p.optimizer.max_iterations);
  read(j, "gradient_tolerance", p.optimizer.gradient_tolerance);
  read(j, "history", p.optimizer.history);
  read(j, "armijo", p.optimizer.armijo);
  read(j, "backtrack", p.optimizer.backtrack);
  read(j, "max_line_search", p.optimizer.max_line_search);
}

}  // namespace

void merge_config(const json& doc, RunConfig& cfg) {
  check_keys(doc, "<root>",
             {"scenario", "dynamics", "reward", "groups", "planner", "collision_threshold"});
  try {
    if (doc.contains("scenario")) merge_scenario(doc.at("scenario"), cfg);
    if (doc.contains("dynamics")) merge_dynamics(doc.at("dynamics"), cfg.sim.dynamics);
    if (doc.contains("reward")) merge_reward(doc.at("reward"), cfg.sim.reward);
    if (doc.contains("groups")) merge_groups(doc.at("groups"), cfg.sim.groups);
    if (doc.contains("planner")) merge_planner(doc.at("planner"), cfg.sim.planner);
    read(doc, "collision_threshold", cfg.sim.collision_threshold);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  merge_config(doc, base);
  return base;
}

json to_json(const RunConfig& cfg) {
  const SimulationConfig& s = cfg.sim;
  json scenario = {{"name", cfg.scenario},
                   {"shift", {cfg.overrides.shift_x, cfg.overrides.shift_y}}};
  if (cfg.overrides.duration) scenario["duration"] = *cfg.overrides.duration;
  if (cfg.overrides.noise_sigma) scenario["noise_sigma"] = *cfg.overrides.noise_sigma;
  if (cfg.overrides.seed) scenario["seed"] = *cfg.overrides.seed;

  return {
      {"scenario", scenario},
      {"dynamics",
       {{"friction", s.dynamics.friction},
        {"dt", s.dynamics.dt},
        {"steering_max", s.dynamics.steering_max},
        {"accel_max", s.dynamics.accel_max}}},
      {"reward",
       {{"theta", std::vector<double>(s.reward.theta.data(),
                                      s.reward.theta.data() + s.reward.theta.size())},
        {"horizon", s.reward.horizon},
        {"collision_sigma_long", s.reward.shape.collision_sigma_long},
        {"collision_sigma_lat", s.reward.shape.collision_sigma_lat},
        {"lane_sigma_fraction", s.reward.shape.lane_sigma_fraction}}},
      {"groups",
       {{"position_radius", s.groups.position_radius},
        {"road_radius", s.groups.road_radius},
        {"recency_window", s.groups.recency_window},
        {"variance_floor", s.groups.variance_floor},
        {"normalization",
         {{"delta_x", s.groups.normalization.delta_x},
          {"delta_y", s.groups.normalization.delta_y},
          {"delta_heading", s.groups.normalization.delta_heading},
          {"displacement", s.groups.normalization.displacement}}}}},
      {"planner",
       {{"mode", to_string(s.planner.mode)},
        {"beta", s.planner.beta},
        {"warm_start", s.planner.warm_start},
        {"bound_penalty", s.planner.bound_penalty},
        {"max_iterations", s.planner.optimizer.max_iterations},
        {"gradient_tolerance", s.planner.optimizer.gradient_tolerance},
        {"history", s.planner.optimizer.history},
        {"armijo", s.planner.optimizer.armijo},
        {"backtrack", s.planner.optimizer.backtrack},
        {"max_line_search", s.planner.optimizer.max_line_search}}},
      {"collision_threshold", s.collision_threshold},
  };
}

}  // namespace cohesion
