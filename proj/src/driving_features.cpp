#include "cohesion/driving_features.hpp"

namespace cohesion {

void RewardParams::validate(const RoadLayout& road) const {
  if (theta.size() != kDrivingFeatureCount) {
    throw std::invalid_argument("reward: theta must have " +
                                std::to_string(kDrivingFeatureCount) + " entries");
  }
  if (!theta.allFinite()) throw std::invalid_argument("reward: theta must be finite");
  if (horizon < 1) throw std::invalid_argument("reward: horizon must be >= 1");
  if (target_lane < 0 || target_lane >= road.lane_count) {
    throw std::invalid_argument("reward: target_lane out of range");
  }
  if (!(target_speed >= 0.0)) throw std::invalid_argument("reward: target_speed must be >= 0");
  if (!(shape.collision_sigma_long > 0.0) || !(shape.collision_sigma_lat > 0.0) ||
      !(shape.lane_sigma_fraction > 0.0)) {
    throw std::invalid_argument("reward: feature shape constants must be positive");
  }
}

EnvironmentSnapshot predict_environment(const RoadLayout& road,
                                        std::span<const CarState> previous,
                                        std::span<const CarState> current, int horizon,
                                        double dt) {
  EnvironmentSnapshot env;
  env.road = road;
  env.others.assign(horizon + 1, std::vector<CarState>(current.size()));
  const bool have_previous = previous.size() == current.size();
  for (std::size_t c = 0; c < current.size(); ++c) {
    const CarState& now = current[c];
    double vx = now.speed * std::cos(now.heading) * dt;
    double vy = now.speed * std::sin(now.heading) * dt;
    if (have_previous) {
      vx = now.x - previous[c].x;
      vy = now.y - previous[c].y;
    }
    for (int t = 0; t <= horizon; ++t) {
      CarState predicted = now;
      predicted.x = now.x + t * vx;
      predicted.y = now.y + t * vy;
      env.others[t][c] = predicted;
    }
  }
  return env;
}

}  // namespace cohesion
