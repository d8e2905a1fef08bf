#include "cohesion/planner.hpp"

#include <limits>
#include <stdexcept>

#include "cohesion/autodiff.hpp"

namespace cohesion {

std::string to_string(PlannerMode mode) {
  return mode == PlannerMode::kNominal ? "nominal" : "cohesive";
}

PlannerMode planner_mode_from_string(const std::string& name) {
  if (name == "nominal") return PlannerMode::kNominal;
  if (name == "cohesive") return PlannerMode::kCohesive;
  throw std::invalid_argument("unknown planner mode '" + name + "'");
}

void PlannerConfig::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("planner: beta must be >= 0");
  if (!(bound_penalty >= 0.0)) throw std::invalid_argument("planner: bound_penalty must be >= 0");
  optimizer.validate();
}

double PlanObjective::penalty(std::span<const Control> controls) const {
  if (problem_.stats == nullptr) return 0.0;
  const auto states = rollout(problem_.start, controls, problem_.dynamics);
  const auto [first, second] = cohesion_pair<double>(states, controls, problem_.dynamics);
  return cohesion_penalty(first, second, *problem_.stats, problem_.norm);
}

PlanResult plan(const PlanningProblem& problem, const PlannerConfig& cfg,
                std::span<const Control> init) {
  if (problem.env == nullptr) throw std::invalid_argument("plan: missing environment snapshot");
  const int horizon = problem.reward.horizon;
  if (horizon < 1) throw std::invalid_argument("plan: horizon must be >= 1");
  if (kControlDim * horizon > kMaxDerivatives) {
    throw std::invalid_argument("plan: horizon exceeds the supported maximum");
  }

  Eigen::VectorXd start = Eigen::VectorXd::Zero(kControlDim * horizon);
  if (!init.empty()) {
    if (init.size() != static_cast<std::size_t>(horizon)) {
      throw std::invalid_argument("plan: initialization length differs from the horizon");
    }
    start = flatten_controls(init);
  }

  const PlanObjective objective(problem, cfg);
  const ValueAndGradient evaluate = [&objective](const Eigen::VectorXd& u, Eigen::VectorXd& g) {
    try {
      return value_and_gradient(objective, u, g);
    } catch (const std::exception&) {
      g = Eigen::VectorXd::Constant(u.size(), std::numeric_limits<double>::quiet_NaN());
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  const OptimizerResult best = maximize_lbfgs(evaluate, start, cfg.optimizer);
  PlanResult result;
  result.controls = unflatten_controls<double>(best.point);
  result.objective = best.value;
  result.iterations = best.iterations;
  result.gradient_norm = best.gradient_norm;
  return result;
}

Control MpcController::step(const PlanningProblem& problem) {
  const std::span<const Control> init =
      cfg_.warm_start && !warm_.empty() ? std::span<const Control>(warm_) : std::span<const Control>();
  last_ = plan(problem, cfg_, init);
  if (cfg_.warm_start) {
    warm_.assign(last_.controls.begin() + 1, last_.controls.end());
    warm_.push_back(last_.controls.back());
  }
  return clip_control(last_.controls.front(), problem.dynamics);
}

}  // namespace cohesion
