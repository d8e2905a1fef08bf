#include "cohesion/lbfgs.hpp"

#include <vector>

namespace cohesion {

void OptimizerSettings::validate() const {
  if (max_iterations < 0) throw std::invalid_argument("optimizer: max_iterations must be >= 0");
  if (!(gradient_tolerance >= 0.0)) {
    throw std::invalid_argument("optimizer: gradient_tolerance must be >= 0");
  }
  if (history < 1) throw std::invalid_argument("optimizer: history must be >= 1");
  if (!(armijo > 0.0 && armijo < 1.0) || !(backtrack > 0.0 && backtrack < 1.0)) {
    throw std::invalid_argument("optimizer: line-search constants must lie in (0, 1)");
  }
  if (max_line_search < 1) throw std::invalid_argument("optimizer: max_line_search must be >= 1");
}

namespace {

struct Correction {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

// Two-loop recursion on the minimization problem -f. Returns H * g.
Eigen::VectorXd apply_inverse_hessian(const std::deque<Correction>& memory,
                                      const Eigen::VectorXd& g) {
  Eigen::VectorXd q = g;
  std::vector<double> alpha(memory.size());
  for (std::size_t k = memory.size(); k-- > 0;) {
    alpha[k] = memory[k].rho * memory[k].s.dot(q);
    q -= alpha[k] * memory[k].y;
  }
  if (!memory.empty()) {
    const Correction& last = memory.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t k = 0; k < memory.size(); ++k) {
    const double beta = memory[k].rho * memory[k].y.dot(q);
    q += (alpha[k] - beta) * memory[k].s;
  }
  return q;
}

}  // namespace

OptimizerResult maximize_lbfgs(const ValueAndGradient& objective, const Eigen::VectorXd& start,
                               const OptimizerSettings& settings) {
  // Work on the minimization of -f throughout.
  Eigen::VectorXd x = start;
  Eigen::VectorXd grad;
  double f = -objective(x, grad);
  grad = -grad;
  if (!std::isfinite(f) || !grad.allFinite()) {
    throw OptimizerDivergence("optimizer: non-finite objective at the initial iterate", x);
  }

  std::deque<Correction> memory;
  int iteration = 0;
  Eigen::VectorXd trial_grad;
  for (; iteration < settings.max_iterations; ++iteration) {
    if (grad.norm() <= settings.gradient_tolerance) break;

    Eigen::VectorXd direction = -apply_inverse_hessian(memory, grad);
    double slope = grad.dot(direction);
    if (!(slope < 0.0)) {
      memory.clear();
      direction = -grad;
      slope = grad.dot(direction);
    }
    double step = memory.empty() ? std::min(1.0, 1.0 / grad.norm()) : 1.0;

    bool accepted = false;
    Eigen::VectorXd trial;
    double trial_f = 0.0;
    for (int ls = 0; ls < settings.max_line_search; ++ls) {
      trial = x + step * direction;
      trial_f = -objective(trial, trial_grad);
      if (std::isfinite(trial_f) && trial_grad.allFinite() &&
          trial_f <= f + settings.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= settings.backtrack;
    }
    if (!accepted) break;
    trial_grad = -trial_grad;
    if (!(trial_f < f)) break;

    Correction c{trial - x, trial_grad - grad, 0.0};
    const double curvature = c.s.dot(c.y);
    if (curvature > 1e-12 * c.s.norm() * c.y.norm()) {
      c.rho = 1.0 / curvature;
      memory.push_back(std::move(c));
      if (static_cast<int>(memory.size()) > settings.history) memory.pop_front();
    }
    x = std::move(trial);
    f = trial_f;
    grad = trial_grad;
  }

  return {x, -f, grad.norm(), iteration};
}

}  // namespace cohesion
