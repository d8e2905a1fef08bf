#pragma once

#include <string>

#include <json.hpp>

#include "cohesion/scenarios.hpp"

namespace cohesion {

/// A fully resolved run: which scenario, how it is perturbed, and how the
/// robot plans.
struct RunConfig {
  std::string scenario = "stalled";
  ScenarioOverrides overrides;
  SimulationConfig sim;
};

/// Merges a JSON config document into cfg. Only keys present in the
/// document change; unknown keys are rejected.
///
///   {
///     "scenario":  {"name", "duration", "noise_sigma", "seed", "shift": [dx, dy]},
///     "dynamics":  {"friction", "dt", "steering_max", "accel_max"},
///     "reward":    {"theta": [6], "horizon", "collision_sigma_long",
///                   "collision_sigma_lat", "lane_sigma_fraction"},
///     "groups":    {"position_radius", "road_radius", "recency_window",
///                   "variance_floor", "normalization": {"delta_x", "delta_y",
///                   "delta_heading", "displacement"}},
///     "planner":   {"mode", "beta", "warm_start", "bound_penalty",
///                   "max_iterations", "gradient_tolerance", "history",
///                   "armijo", "backtrack", "max_line_search"},
///     "collision_threshold": 1.0
///   }
void merge_config(const nlohmann::json& doc, RunConfig& cfg);

RunConfig load_config_file(const std::string& path, RunConfig base = {});

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace cohesion
