#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "cohesion/dynamics.hpp"
#include "cohesion/road.hpp"
#include "cohesion/scalar.hpp"

namespace cohesion {

/// Layout of the driving feature vector.
enum DrivingFeature : int {
  kCollision = 0,  ///< sum of anisotropic Gaussians around other cars (>= 0)
  kLane,           ///< Gaussian of lateral distance to the target lane center
  kBoundary,       ///< squared hinge outside the drivable area (>= 0)
  kSpeed,          ///< -(speed - target_speed)^2
  kSteering,       ///< -steering^2
  kAccel,          ///< -accel^2
  kDrivingFeatureCount
};

template <typename Scalar>
using DrivingFeatures = Eigen::Matrix<Scalar, kDrivingFeatureCount, 1>;

struct FeatureShape {
  double collision_sigma_long = 4.0;  ///< along the other car's heading (m)
  double collision_sigma_lat = 1.2;   ///< across the other car's heading (m)
  double lane_sigma_fraction = 0.5;   ///< lane Gaussian std as a fraction of lane width
};

/// Hand-tuned weights. Not learned; they only need to produce sensible
/// nominal driving on the bundled scenarios.
inline Eigen::VectorXd default_theta() {
  Eigen::VectorXd theta(kDrivingFeatureCount);
  theta << -40.0, 10.0, -100.0, 10.0, 150.0, 3.0;
  return theta;
}

struct RewardParams {
  Eigen::VectorXd theta = default_theta();
  int horizon = 5;
  double target_speed = 10.0;
  int target_lane = 1;
  FeatureShape shape;

  void validate(const RoadLayout& road) const;
};

/// What the planner believes about the world over its horizon.
/// others[t] holds the predicted states of every visible car at step t,
/// for t = 0 .. horizon.
struct EnvironmentSnapshot {
  RoadLayout road;
  std::vector<std::vector<CarState>> others;

  std::span<const CarState> at(std::size_t t) const {
    if (others.empty()) return {};
    return others[std::min(t, others.size() - 1)];
  }
};

/// Constant-velocity extrapolation of each car from its two latest observations.
/// Without a previous observation the car's own heading and speed are used.
EnvironmentSnapshot predict_environment(const RoadLayout& road,
                                        std::span<const CarState> previous,
                                        std::span<const CarState> current, int horizon,
                                        double dt);

template <typename Scalar>
Scalar collision_proximity(const CarStateT<Scalar>& robot, std::span<const CarState> others,
                           const FeatureShape& shape) {
  using std::exp;
  Scalar total(0.0);
  const double inv_long = 1.0 / (2.0 * shape.collision_sigma_long * shape.collision_sigma_long);
  const double inv_lat = 1.0 / (2.0 * shape.collision_sigma_lat * shape.collision_sigma_lat);
  for (const CarState& other : others) {
    const double c = std::cos(other.heading);
    const double s = std::sin(other.heading);
    const Scalar dx = robot.x - other.x;
    const Scalar dy = robot.y - other.y;
    const Scalar along = c * dx + s * dy;
    const Scalar across = c * dy - s * dx;
    total += exp(-(along * along * inv_long + across * across * inv_lat));
  }
  return total;
}

/// The driving feature map for one (state, control) pair.
template <typename Scalar>
DrivingFeatures<Scalar> phi(const CarStateT<Scalar>& state, const ControlT<Scalar>& control,
                            std::span<const CarState> others, const RoadLayout& road,
                            const RewardParams& params) {
  using std::exp;
  DrivingFeatures<Scalar> f;
  f(kCollision) = collision_proximity(state, others, params.shape);

  const double lane_sigma = params.shape.lane_sigma_fraction * road.lane_width;
  const Scalar lateral = state.x - road.lane_center(params.target_lane);
  f(kLane) = exp(-(lateral * lateral) / (2.0 * lane_sigma * lane_sigma));

  Scalar boundary(0.0);
  const Scalar right = road.right_edge_at(state.y);
  if (value_of(state.x) > value_of(right)) {
    const Scalar over = state.x - right;
    boundary += over * over;
  }
  if (value_of(state.x) < road.left_edge) {
    const Scalar under = road.left_edge - state.x;
    boundary += under * under;
  }
  f(kBoundary) = boundary;

  const Scalar speed_error = state.speed - params.target_speed;
  f(kSpeed) = -(speed_error * speed_error);
  f(kSteering) = -(control.steering * control.steering);
  f(kAccel) = -(control.accel * control.accel);
  return f;
}

/// Sum over t = 0..T of theta . phi(x^t, u^t) for an already rolled-out
/// trajectory. states has T + 1 entries; the control at index T repeats
/// the last control.
template <typename Scalar>
Scalar reward_along(std::span<const CarStateT<Scalar>> states,
                    std::span<const ControlT<Scalar>> controls, const EnvironmentSnapshot& env,
                    const RewardParams& params) {
  Scalar total(0.0);
  for (std::size_t t = 0; t < states.size(); ++t) {
    const ControlT<Scalar>& u = controls[std::min(t, controls.size() - 1)];
    const DrivingFeatures<Scalar> f = phi(states[t], u, env.at(t), env.road, params);
    for (int k = 0; k < kDrivingFeatureCount; ++k) {
      if (params.theta(k) != 0.0) total += params.theta(k) * f(k);
    }
  }
  return total;
}

inline void check_horizon(std::size_t control_count, const RewardParams& params) {
  if (control_count != static_cast<std::size_t>(params.horizon)) {
    throw std::invalid_argument("reward: expected " + std::to_string(params.horizon) +
                                " controls, got " + std::to_string(control_count));
  }
}

/// The nominal driving reward of a control sequence from x0.
template <typename Scalar>
Scalar nominal_reward(const CarStateT<Scalar>& x0, std::span<const ControlT<Scalar>> controls,
                      const EnvironmentSnapshot& env, const RewardParams& params,
                      const DynamicsParams& dynamics) {
  check_horizon(controls.size(), params);
  const auto states = rollout(x0, controls, dynamics);
  return reward_along<Scalar>(states, controls, env, params);
}

}  // namespace cohesion
