#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "cohesion/scalar.hpp"

namespace cohesion {

namespace detail {

template <int N, typename Objective>
double value_and_gradient_fixed(const Objective& objective, const Eigen::VectorXd& point,
                                Eigen::VectorXd& gradient) {
  using Scalar = ADScalarN<N>;
  const Eigen::Index n = point.size();
  Vector<Scalar> seeded(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    seeded(i).value() = point(i);
    seeded(i).derivatives().setZero();
    seeded(i).derivatives()(i) = 1.0;
  }
  const Scalar result = objective(seeded);
  gradient = result.derivatives().head(n);
  return result.value();
}

}  // namespace detail

/// Evaluates a scalar objective and its exact gradient with forward-mode
/// automatic differentiation. The objective must be callable with
/// Vector<double> and Vector<ADScalarN<N>> for any N.
template <typename Objective>
double value_and_gradient(const Objective& objective, const Eigen::VectorXd& point,
                          Eigen::VectorXd& gradient) {
  const Eigen::Index n = point.size();
  double value = 0.0;
  if (n <= 2) {
    value = detail::value_and_gradient_fixed<2>(objective, point, gradient);
  } else if (n <= 4) {
    value = detail::value_and_gradient_fixed<4>(objective, point, gradient);
  } else if (n <= 10) {
    value = detail::value_and_gradient_fixed<10>(objective, point, gradient);
  } else if (n <= 16) {
    value = detail::value_and_gradient_fixed<16>(objective, point, gradient);
  } else if (n <= 32) {
    value = detail::value_and_gradient_fixed<32>(objective, point, gradient);
  } else if (n <= kMaxDerivatives) {
    value = detail::value_and_gradient_fixed<kMaxDerivatives>(objective, point, gradient);
  } else {
    throw std::invalid_argument("value_and_gradient: " + std::to_string(n) +
                                " variables exceeds the supported maximum");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(gradient(i))) {
      throw std::runtime_error("gradient: non-finite entry at index " + std::to_string(i));
    }
  }
  return value;
}

template <typename Objective>
Eigen::VectorXd gradient(const Objective& objective, const Eigen::VectorXd& point) {
  Eigen::VectorXd g;
  value_and_gradient(objective, point, g);
  return g;
}

}  // namespace cohesion
