#include "cohesion/social.hpp"

#include <algorithm>

namespace cohesion {

void NormalizationConstants::validate() const {
  if (!(delta_x > 0.0) || !(delta_y > 0.0) || !(delta_heading > 0.0) || !(displacement > 0.0)) {
    throw std::invalid_argument("normalization constants must be positive");
  }
}

NormalizationConstants NormalizationConstants::for_road(const RoadLayout& road) {
  const double position = 1.5 * road.lane_width;
  return {position, position, kPi, position};
}

SocialSample make_sample(int car, int time, const CarState& from, const CarState& to,
                         const NormalizationConstants& norm) {
  SocialSample sample;
  sample.features = compute_psi(from, to, norm);
  sample.source_car = car;
  sample.time = time;
  sample.source_state = from;
  return sample;
}

void GroupConfig::validate() const {
  if (!(position_radius > 0.0) || !(road_radius > 0.0)) {
    throw std::invalid_argument("groups: radii must be positive");
  }
  if (recency_window < 1) throw std::invalid_argument("groups: recency_window must be >= 1");
  if (!(variance_floor > 0.0)) throw std::invalid_argument("groups: variance_floor must be > 0");
  normalization.validate();
}

GroupSet assign_groups(const SocialSample& sample, const CarState& robot, int now,
                       const RoadLayout& road, const GroupConfig& cfg) {
  const double distance =
      std::hypot(sample.source_state.x - robot.x, sample.source_state.y - robot.y);
  const bool recent = now - sample.time < cfg.recency_window;

  GroupSet groups;
  groups[kPositionGroup] = distance <= cfg.position_radius;
  groups[kLaneGroup] = recent && road.lane_index(sample.source_state.x) == road.lane_index(robot.x);
  groups[kRoadGroup] = recent && distance <= cfg.road_radius;
  return groups;
}

int GroupStatistics::active_cells() const { return static_cast<int>((count.array() >= 2).count()); }

FeatureGroupMatrix GroupStatistics::precision() const {
  FeatureGroupMatrix lambda = FeatureGroupMatrix::Zero();
  for (int j = 0; j < kGroupCount; ++j) {
    for (int i = 0; i < kSocialFeatureCount; ++i) {
      if (active(i, j)) lambda(i, j) = 1.0 / variance(i, j);
    }
  }
  return lambda;
}

GroupStatistics update_statistics(std::span<const MemberSample> samples, double variance_floor) {
  RunningStat cells[kSocialFeatureCount][kGroupCount];
  for (const MemberSample& member : samples) {
    for (int j = 0; j < kGroupCount; ++j) {
      if (!member.groups[j]) continue;
      for (int i = 0; i < kSocialFeatureCount; ++i) cells[i][j].push(member.sample.features(i));
    }
  }

  GroupStatistics stats;
  for (int j = 0; j < kGroupCount; ++j) {
    for (int i = 0; i < kSocialFeatureCount; ++i) {
      const RunningStat& cell = cells[i][j];
      stats.count(i, j) = static_cast<int>(cell.count());
      stats.mean(i, j) = cell.mean();
      stats.variance(i, j) = cell.count() >= 2 ? std::max(cell.variance(), variance_floor) : 0.0;
    }
  }
  return stats;
}

void SampleHistory::observe(int time, std::span<const CarState> previous,
                            std::span<const CarState> current) {
  if (previous.size() != current.size()) {
    throw std::invalid_argument("SampleHistory::observe: car count changed between steps");
  }
  for (std::size_t c = 0; c < current.size(); ++c) {
    samples_.push_back(make_sample(static_cast<int>(c), time, previous[c], current[c], norm_));
  }
}

std::vector<MemberSample> SampleHistory::grouped(const CarState& robot, int now,
                                                 const RoadLayout& road,
                                                 const GroupConfig& cfg) const {
  std::vector<MemberSample> members;
  for (const SocialSample& sample : samples_) {
    const GroupSet groups = assign_groups(sample, robot, now, road, cfg);
    if (groups.any()) members.push_back({sample, groups});
  }
  return members;
}

GroupStatistics SampleHistory::statistics(const CarState& robot, int now, const RoadLayout& road,
                                          const GroupConfig& cfg) const {
  const auto members = grouped(robot, now, road, cfg);
  return update_statistics(members, cfg.variance_floor);
}

}  // namespace cohesion
