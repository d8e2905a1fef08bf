#include "cohesion/dynamics.hpp"

#include <algorithm>

namespace cohesion {

void DynamicsParams::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dynamics: dt must be > 0");
  if (!(friction >= 0.0)) throw std::invalid_argument("dynamics: friction must be >= 0");
  if (!(steering_max > 0.0) || !(accel_max > 0.0)) {
    throw std::invalid_argument("dynamics: control bounds must be positive");
  }
}

namespace detail {

void check_step_inputs(const double* values, int count, const DynamicsParams& params) {
  if (!(params.dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  for (int i = 0; i < count; ++i) {
    if (!std::isfinite(values[i])) throw std::invalid_argument("step: non-finite input");
  }
}

}  // namespace detail

std::pair<Eigen::Matrix4d, Eigen::Matrix<double, 4, 2>> step_jacobian(
    const CarState& state, const Control& control, const DynamicsParams& params) {
  const double dt = params.dt;
  const double c = std::cos(state.heading);
  const double s = std::sin(state.heading);

  Eigen::Matrix4d a = Eigen::Matrix4d::Identity();
  a(0, 2) = -dt * state.speed * s;
  a(0, 3) = dt * c;
  a(1, 2) = dt * state.speed * c;
  a(1, 3) = dt * s;
  a(2, 3) = dt * control.steering;
  a(3, 3) = 1.0 - dt * params.friction;

  Eigen::Matrix<double, 4, 2> b = Eigen::Matrix<double, 4, 2>::Zero();
  b(2, 0) = dt * state.speed;
  b(3, 1) = dt;

  const double next_speed = state.speed + dt * (control.accel - params.friction * state.speed);
  if (next_speed < 0.0) {
    a.row(3).setZero();
    b.row(3).setZero();
  }
  return {a, b};
}

Eigen::VectorXd flatten_controls(std::span<const Control> controls) {
  Eigen::VectorXd flat(kControlDim * controls.size());
  for (std::size_t t = 0; t < controls.size(); ++t) {
    flat(kControlDim * t) = controls[t].steering;
    flat(kControlDim * t + 1) = controls[t].accel;
  }
  return flat;
}

Control clip_control(const Control& control, const DynamicsParams& params) {
  return {std::clamp(control.steering, -params.steering_max, params.steering_max),
          std::clamp(control.accel, -params.accel_max, params.accel_max)};
}

}  // namespace cohesion
