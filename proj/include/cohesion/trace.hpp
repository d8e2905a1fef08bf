#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cohesion/scenarios.hpp"

namespace cohesion {

/// One JSON object per line:
///   {"step", "terminal", "robot": {x, y, heading, speed},
///    "applied": {steering, accel} | null, "objective", "penalty",
///    "iterations", "gradient_norm",
///    "precision": [k * M entries, index feature * M + group, 0 = inactive],
///    "cars": [{x, y, heading, speed}, ...]}
nlohmann::json record_to_json(const StepRecord& record);
StepRecord record_from_json(const nlohmann::json& j);

void write_trace(std::ostream& out, const std::vector<StepRecord>& trace);
std::vector<StepRecord> read_trace(std::istream& in);

/// Recomputes the outcome metrics from a trace alone (plus the static parts of
/// the scenario: road and hidden obstacles).
OutcomeMetrics metrics_from_trace(const std::vector<StepRecord>& trace, const Scenario& scenario,
                                  double collision_threshold);

struct RunSummary {
  std::string scenario;
  PlannerMode mode = PlannerMode::kCohesive;
  double beta = 1.0;
  std::uint64_t seed = 0;
  OutcomeMetrics metrics;
  double wall_clock_seconds = 0.0;
};

nlohmann::json metrics_to_json(const OutcomeMetrics& m);
OutcomeMetrics metrics_from_json(const nlohmann::json& j);
nlohmann::json summary_to_json(const RunSummary& s);
RunSummary summary_from_json(const nlohmann::json& j);

}  // namespace cohesion
