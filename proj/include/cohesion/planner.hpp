#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cohesion/driving_features.hpp"
#include "cohesion/dynamics.hpp"
#include "cohesion/lbfgs.hpp"
#include "cohesion/social.hpp"

namespace cohesion {

enum class PlannerMode { kNominal, kCohesive };

std::string to_string(PlannerMode mode);
PlannerMode planner_mode_from_string(const std::string& name);

struct PlannerConfig {
  PlannerMode mode = PlannerMode::kCohesive;
  double beta = 1.0;
  OptimizerSettings optimizer;
  bool warm_start = true;
  /// Weight of the quadratic penalty on controls outside the bound box.
  double bound_penalty = 1e3;

  void validate() const;
};

struct PlanResult {
  std::vector<Control> controls;
  double objective = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
};

/// Everything a single planning call needs besides the control sequence.
struct PlanningProblem {
  CarState start;
  const EnvironmentSnapshot* env = nullptr;
  const GroupStatistics* stats = nullptr;  ///< ignored in nominal mode
  RewardParams reward;
  DynamicsParams dynamics;
  NormalizationConstants norm;
};

/// The planner objective over the flattened control sequence: the nominal or
/// cohesion-augmented reward minus the bound penalty.
class PlanObjective {
 public:
  PlanObjective(const PlanningProblem& problem, const PlannerConfig& cfg)
      : problem_(problem), cfg_(cfg) {}

  template <typename Scalar>
  Scalar operator()(const Vector<Scalar>& flat) const {
    const auto controls = unflatten_controls<Scalar>(flat);
    const CarStateT<Scalar> start = problem_.start.template cast<Scalar>();
    const std::span<const ControlT<Scalar>> view(controls);

    Scalar value;
    if (cfg_.mode == PlannerMode::kNominal) {
      value = nominal_reward<Scalar>(start, view, *problem_.env, problem_.reward, problem_.dynamics);
    } else {
      const CohesionContext cohesion{problem_.stats, problem_.norm, cfg_.beta};
      value = cohesive_reward<Scalar>(start, view, *problem_.env, problem_.reward,
                                      problem_.dynamics, cohesion);
    }
    return value - cfg_.bound_penalty * bound_violation<Scalar>(view);
  }

  /// Cohesion penalty of a concrete plan, for diagnostics.
  double penalty(std::span<const Control> controls) const;

 private:
  template <typename Scalar>
  Scalar bound_violation(std::span<const ControlT<Scalar>> controls) const {
    Scalar total(0.0);
    for (const auto& u : controls) {
      const double steer = std::abs(value_of(u.steering)) - problem_.dynamics.steering_max;
      if (steer > 0.0) {
        const Scalar excess = (value_of(u.steering) > 0.0 ? u.steering : Scalar(-u.steering)) -
                              problem_.dynamics.steering_max;
        total += excess * excess;
      }
      const double accel = std::abs(value_of(u.accel)) - problem_.dynamics.accel_max;
      if (accel > 0.0) {
        const Scalar excess =
            (value_of(u.accel) > 0.0 ? u.accel : Scalar(-u.accel)) - problem_.dynamics.accel_max;
        total += excess * excess;
      }
    }
    return total;
  }

  const PlanningProblem& problem_;
  const PlannerConfig& cfg_;
};

/// Locally maximizes the planner objective from an initial control sequence
/// (zeros when init is empty).
PlanResult plan(const PlanningProblem& problem, const PlannerConfig& cfg,
                std::span<const Control> init = {});

/// Receding-horizon wrapper: plan, apply the first (clipped) control, keep the
/// shifted plan as the next initialization.
class MpcController {
 public:
  explicit MpcController(PlannerConfig cfg) : cfg_(std::move(cfg)) {}

  Control step(const PlanningProblem& problem);

  const PlanResult& last_plan() const { return last_; }
  const PlannerConfig& config() const { return cfg_; }

 private:
  PlannerConfig cfg_;
  std::vector<Control> warm_;
  PlanResult last_;
};

}  // namespace cohesion
