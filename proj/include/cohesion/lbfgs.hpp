#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace cohesion {

struct OptimizerSettings {
  int max_iterations = 100;
  double gradient_tolerance = 1e-6;
  int history = 8;
  double armijo = 1e-4;      ///< sufficient-increase constant
  double backtrack = 0.5;    ///< step shrink factor
  int max_line_search = 40;

  void validate() const;
};

struct OptimizerResult {
  Eigen::VectorXd point;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
};

/// Thrown when the objective is non-finite at an accepted iterate.
class OptimizerDivergence : public std::runtime_error {
 public:
  OptimizerDivergence(const std::string& what, Eigen::VectorXd iterate)
      : std::runtime_error(what), iterate_(std::move(iterate)) {}
  const Eigen::VectorXd& iterate() const { return iterate_; }

 private:
  Eigen::VectorXd iterate_;
};

/// Returns f(x) and writes the gradient into the second argument.
using ValueAndGradient = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Limited-memory BFGS ascent with a backtracking Armijo line search.
/// Every accepted step strictly increases the objective, so the result is
/// never worse than the starting point.
OptimizerResult maximize_lbfgs(const ValueAndGradient& objective, const Eigen::VectorXd& start,
                               const OptimizerSettings& settings);

}  // namespace cohesion
