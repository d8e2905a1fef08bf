#pragma once

#include <bitset>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "cohesion/driving_features.hpp"
#include "cohesion/dynamics.hpp"
#include "cohesion/road.hpp"
#include "cohesion/scalar.hpp"

namespace cohesion {

/// Layout of the social feature vector psi(s0, s1).
enum SocialFeature : int {
  kDeltaX = 0,    ///< lateral displacement / norm.delta_x
  kDeltaY,        ///< longitudinal displacement / norm.delta_y
  kDeltaHeading,  ///< heading change in (-pi, pi] / norm.delta_heading
  kDisplacement,  ///< |dp| / norm.displacement
  kDirectionX,    ///< dx / |dp| (0 below the motion threshold)
  kDirectionY,    ///< dy / |dp| (0 below the motion threshold)
  kSocialFeatureCount
};

/// Feature groups: who the robot considers imitating.
enum SocialGroup : int {
  kPositionGroup = 0,  ///< generated at the robot's current position, any time
  kLaneGroup,          ///< generated in the robot's current lane, recently
  kRoadGroup,          ///< generated near the robot on the road, recently
  kGroupCount
};

template <typename Scalar>
using SocialFeatures = Eigen::Matrix<Scalar, kSocialFeatureCount, 1>;

using GroupSet = std::bitset<kGroupCount>;

/// Raw displacements below this length (m) carry no direction.
inline constexpr double kMotionThreshold = 1e-3;

/// Each raw difference is divided by the largest value expected for it, so
/// variances of different features are comparable.
struct NormalizationConstants {
  double delta_x = 4.5;
  double delta_y = 4.5;
  double delta_heading = kPi;
  double displacement = 4.5;

  void validate() const;
  /// Positions scale with 1.5 lane widths, headings with pi.
  static NormalizationConstants for_road(const RoadLayout& road);
};

template <typename Scalar>
SocialFeatures<Scalar> compute_psi(const CarStateT<Scalar>& s0, const CarStateT<Scalar>& s1,
                                   const NormalizationConstants& norm) {
  using std::sqrt;
  const double values[] = {value_of(s0.x), value_of(s0.y), value_of(s0.heading),
                           value_of(s1.x), value_of(s1.y), value_of(s1.heading)};
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("compute_psi: non-finite state");
  }

  const Scalar dx = s1.x - s0.x;
  const Scalar dy = s1.y - s0.y;
  const Scalar dh = wrap_angle<Scalar>(s1.heading - s0.heading);
  const Scalar squared = dx * dx + dy * dy;
  const Scalar length = value_of(squared) > 0.0 ? Scalar(sqrt(squared)) : Scalar(0.0);

  SocialFeatures<Scalar> psi;
  psi(kDeltaX) = dx / norm.delta_x;
  psi(kDeltaY) = dy / norm.delta_y;
  psi(kDeltaHeading) = dh / norm.delta_heading;
  psi(kDisplacement) = length / norm.displacement;
  if (value_of(length) < kMotionThreshold) {
    psi(kDirectionX) = Scalar(0.0);
    psi(kDirectionY) = Scalar(0.0);
  } else {
    psi(kDirectionX) = dx / length;
    psi(kDirectionY) = dy / length;
  }
  return psi;
}

/// One observed transition (source_state -> next state) of another car.
struct SocialSample {
  SocialFeatures<double> features = SocialFeatures<double>::Zero();
  int source_car = 0;
  int time = 0;
  CarState source_state;
};

SocialSample make_sample(int car, int time, const CarState& from, const CarState& to,
                         const NormalizationConstants& norm);

struct GroupConfig {
  double position_radius = 2.0;
  double road_radius = 30.0;
  /// A sample is "present" when now - sample.time < recency_window.
  int recency_window = 2;
  double variance_floor = 1e-4;
  NormalizationConstants normalization;

  void validate() const;
};

GroupSet assign_groups(const SocialSample& sample, const CarState& robot, int now,
                       const RoadLayout& road, const GroupConfig& cfg);

/// Welford accumulator.
class RunningStat {
 public:
  void push(double value) {
    ++count_;
    const double delta = value - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (value - mean_);
  }

  long count() const { return count_; }
  double mean() const { return count_ > 0 ? mean_ : 0.0; }
  /// Unbiased (n - 1) sample variance; 0 for fewer than two samples.
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }

 private:
  long count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

using FeatureGroupMatrix = Eigen::Matrix<double, kSocialFeatureCount, kGroupCount>;

/// Per (feature, group) cell: mean, floored sample variance and count.
/// Cells with fewer than two samples are inactive.
struct GroupStatistics {
  FeatureGroupMatrix mean = FeatureGroupMatrix::Zero();
  FeatureGroupMatrix variance = FeatureGroupMatrix::Zero();
  Eigen::Matrix<int, kSocialFeatureCount, kGroupCount> count =
      Eigen::Matrix<int, kSocialFeatureCount, kGroupCount>::Zero();

  bool active(int feature, int group) const { return count(feature, group) >= 2; }
  int active_cells() const;
  /// lambda = 1 / sigma^2 on active cells, 0 elsewhere.
  FeatureGroupMatrix precision() const;
};

struct MemberSample {
  SocialSample sample;
  GroupSet groups;
};

GroupStatistics update_statistics(std::span<const MemberSample> samples, double variance_floor);

/// Every transition observed since the start of the run.
class SampleHistory {
 public:
  explicit SampleHistory(NormalizationConstants norm) : norm_(norm) {}

  /// Records the transitions previous[c] -> current[c] that began at step time.
  void observe(int time, std::span<const CarState> previous, std::span<const CarState> current);

  std::span<const SocialSample> samples() const { return samples_; }

  std::vector<MemberSample> grouped(const CarState& robot, int now, const RoadLayout& road,
                                    const GroupConfig& cfg) const;

  GroupStatistics statistics(const CarState& robot, int now, const RoadLayout& road,
                             const GroupConfig& cfg) const;

 private:
  NormalizationConstants norm_;
  std::vector<SocialSample> samples_;
};

/// sum over active cells of (mu_ij - psi_i(x0, x1))^2 / sigma_ij^2.
template <typename Scalar>
Scalar cohesion_penalty(const CarStateT<Scalar>& x0, const CarStateT<Scalar>& x1,
                        const GroupStatistics& stats, const NormalizationConstants& norm) {
  const SocialFeatures<Scalar> psi = compute_psi(x0, x1, norm);
  Scalar total(0.0);
  for (int j = 0; j < kGroupCount; ++j) {
    for (int i = 0; i < kSocialFeatureCount; ++i) {
      if (!stats.active(i, j)) continue;
      const Scalar diff = psi(i) - stats.mean(i, j);
      total += diff * diff / stats.variance(i, j);
    }
  }
  return total;
}

/// The pair of planned states the cohesion penalty is evaluated on: the first
/// two states that the control sequence influences, x^1 and x^2. When the
/// horizon is a single step, x^2 applies the repeated terminal control.
template <typename Scalar>
std::pair<CarStateT<Scalar>, CarStateT<Scalar>> cohesion_pair(
    std::span<const CarStateT<Scalar>> states, std::span<const ControlT<Scalar>> controls,
    const DynamicsParams& dynamics) {
  if (states.size() >= 3) return {states[1], states[2]};
  return {states[1], step(states[1], controls.back(), dynamics)};
}

struct CohesionContext {
  const GroupStatistics* stats = nullptr;
  NormalizationConstants norm;
  double beta = 1.0;
};

/// Nominal reward minus beta times the cohesion penalty.
template <typename Scalar>
Scalar cohesive_reward(const CarStateT<Scalar>& x0, std::span<const ControlT<Scalar>> controls,
                       const EnvironmentSnapshot& env, const RewardParams& params,
                       const DynamicsParams& dynamics, const CohesionContext& cohesion) {
  check_horizon(controls.size(), params);
  const auto states = rollout(x0, controls, dynamics);
  const Scalar nominal = reward_along<Scalar>(states, controls, env, params);
  if (cohesion.stats == nullptr) return nominal;
  const auto [first, second] = cohesion_pair<Scalar>(states, controls, dynamics);
  return nominal - cohesion.beta * cohesion_penalty(first, second, *cohesion.stats, cohesion.norm);
}

}  // namespace cohesion
