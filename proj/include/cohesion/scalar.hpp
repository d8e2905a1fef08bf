#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>
#include <unsupported/Eigen/AutoDiff>

namespace cohesion {

/// Upper bound on the number of directional derivatives, so planning horizons
/// are limited to kMaxDerivatives / 2 steps.
inline constexpr int kMaxDerivatives = 64;

/// Forward-mode scalar carrying N derivatives inline. The width is fixed so
/// that constants (zero derivatives) mix freely with seeded variables.
template <int N>
using ADScalarN = Eigen::AutoDiffScalar<Eigen::Matrix<double, N, 1>>;

using ADScalar = ADScalarN<kMaxDerivatives>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline double value_of(double v) { return v; }

template <typename DerType>
double value_of(const Eigen::AutoDiffScalar<DerType>& v) {
  return v.value();
}

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces an angle to (-pi, pi]. The shift is piecewise constant, so the
/// derivative of the result equals the derivative of the input.
template <typename Scalar>
Scalar wrap_angle(const Scalar& angle) {
  const double turns = std::ceil((value_of(angle) - kPi) / kTwoPi);
  if (turns == 0.0) return angle;
  return angle - kTwoPi * turns;
}

/// C1 ramp from 0 (s <= 0) to 1 (s >= 1).
template <typename Scalar>
Scalar smoothstep(const Scalar& s) {
  const double v = value_of(s);
  if (v <= 0.0) return Scalar(0.0);
  if (v >= 1.0) return Scalar(1.0);
  return s * s * (3.0 - 2.0 * s);
}

}  // namespace cohesion
