#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cohesion/scalar.hpp"

namespace cohesion {

/// Point-mass vehicle state. x is lateral, y is along the road, heading is
/// measured from +x (so pi/2 drives straight up the road).
template <typename Scalar>
struct CarStateT {
  Scalar x{0.0};
  Scalar y{0.0};
  Scalar heading{0.0};
  Scalar speed{0.0};

  Eigen::Matrix<Scalar, 4, 1> vector() const { return {x, y, heading, speed}; }

  static CarStateT from_vector(const Eigen::Matrix<Scalar, 4, 1>& v) {
    return {v(0), v(1), v(2), v(3)};
  }

  template <typename NewScalar>
  CarStateT<NewScalar> cast() const {
    return {NewScalar(x), NewScalar(y), NewScalar(heading), NewScalar(speed)};
  }

  bool operator==(const CarStateT&) const = default;
};

/// Steering is a curvature-like coefficient: the heading rate is speed * steering.
template <typename Scalar>
struct ControlT {
  Scalar steering{0.0};
  Scalar accel{0.0};

  template <typename NewScalar>
  ControlT<NewScalar> cast() const {
    return {NewScalar(steering), NewScalar(accel)};
  }

  bool operator==(const ControlT&) const = default;
};

using CarState = CarStateT<double>;
using Control = ControlT<double>;

inline constexpr int kStateDim = 4;
inline constexpr int kControlDim = 2;

struct DynamicsParams {
  double friction = 0.0;
  double dt = 0.1;
  double steering_max = 1.0;
  double accel_max = 4.0;

  void validate() const;
};

namespace detail {
void check_step_inputs(const double* values, int count, const DynamicsParams& params);
}  // namespace detail

/// One explicit-Euler step of
///   (x', y', heading', speed') = (s cos h, s sin h, s * steering, accel - friction * s).
/// Every derivative is taken at the input state; the resulting speed is
/// clamped at zero (with zero derivative when the clamp is active).
template <typename Scalar>
CarStateT<Scalar> step(const CarStateT<Scalar>& state, const ControlT<Scalar>& control,
                       const DynamicsParams& params) {
  const double values[] = {value_of(state.x),       value_of(state.y),
                           value_of(state.heading), value_of(state.speed),
                           value_of(control.steering), value_of(control.accel)};
  detail::check_step_inputs(values, 6, params);

  using std::cos;
  using std::sin;
  const double dt = params.dt;
  CarStateT<Scalar> next;
  next.x = state.x + dt * state.speed * cos(state.heading);
  next.y = state.y + dt * state.speed * sin(state.heading);
  next.heading = state.heading + dt * state.speed * control.steering;
  next.speed = state.speed + dt * (control.accel - params.friction * state.speed);
  if (value_of(next.speed) < 0.0) next.speed = Scalar(0.0);
  return next;
}

/// Returns controls.size() + 1 states, states[0] == initial.
template <typename Scalar>
std::vector<CarStateT<Scalar>> rollout(const CarStateT<Scalar>& initial,
                                       std::span<const ControlT<Scalar>> controls,
                                       const DynamicsParams& params) {
  std::vector<CarStateT<Scalar>> states;
  states.reserve(controls.size() + 1);
  states.push_back(initial);
  for (std::size_t t = 0; t < controls.size(); ++t) {
    try {
      states.push_back(step(states.back(), controls[t], params));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("rollout: control " + std::to_string(t) + ": " + e.what());
    }
  }
  return states;
}

/// Analytic Jacobians (d next / d state, d next / d control) of step().
std::pair<Eigen::Matrix4d, Eigen::Matrix<double, 4, 2>> step_jacobian(
    const CarState& state, const Control& control, const DynamicsParams& params);

/// Flattened controls are laid out as [steering_0, accel_0, steering_1, ...].
template <typename Scalar>
std::vector<ControlT<Scalar>> unflatten_controls(const Vector<Scalar>& flat) {
  if (flat.size() % kControlDim != 0) {
    throw std::invalid_argument("unflatten_controls: odd-length control vector");
  }
  std::vector<ControlT<Scalar>> controls(flat.size() / kControlDim);
  for (std::size_t t = 0; t < controls.size(); ++t) {
    controls[t] = {flat(kControlDim * t), flat(kControlDim * t + 1)};
  }
  return controls;
}

Eigen::VectorXd flatten_controls(std::span<const Control> controls);

/// Clips a control into the box configured in params.
Control clip_control(const Control& control, const DynamicsParams& params);

}  // namespace cohesion
