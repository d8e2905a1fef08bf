#pragma once

#include <optional>

#include "cohesion/scalar.hpp"

namespace cohesion {

/// A lane that peels off to the right of the road. Over [start_y, end_y] the
/// drivable area widens by one lane width on the right; past end_y the exit
/// lane runs parallel to the road.
struct ExitLane {
  int lane = 0;
  double start_y = 0.0;
  double end_y = 0.0;
};

/// Straight road running along +y. Lane 0 is the leftmost lane (smallest x);
/// lanes are numbered left to right.
struct RoadLayout {
  int lane_count = 3;
  double lane_width = 3.0;
  double left_edge = -4.5;
  std::optional<ExitLane> exit;

  void validate() const;

  double lane_center(int lane) const { return left_edge + (lane + 0.5) * lane_width; }
  double right_edge() const { return left_edge + lane_count * lane_width; }

  /// Nearest lane, clamped to the valid range.
  int lane_index(double x) const;

  /// Fraction of the exit divergence completed at longitudinal position y.
  template <typename Scalar>
  Scalar exit_progress(const Scalar& y) const {
    if (!exit) return Scalar(0.0);
    return smoothstep(Scalar((y - exit->start_y) / (exit->end_y - exit->start_y)));
  }

  /// Right edge of the drivable area, accounting for the exit lane.
  template <typename Scalar>
  Scalar right_edge_at(const Scalar& y) const {
    if (!exit) return Scalar(right_edge());
    return right_edge() + lane_width * exit_progress(y);
  }

  /// Returns a copy shifted rigidly by (dx, dy).
  RoadLayout translated(double dx, double dy) const;
};

}  // namespace cohesion
