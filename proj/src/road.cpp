#include "cohesion/road.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cohesion {

void RoadLayout::validate() const {
  if (lane_count < 1) throw std::invalid_argument("road: lane_count must be >= 1");
  if (!(lane_width > 0.0)) throw std::invalid_argument("road: lane_width must be > 0");
  if (!std::isfinite(left_edge)) throw std::invalid_argument("road: left_edge must be finite");
  if (exit) {
    if (exit->lane != lane_count - 1) {
      throw std::invalid_argument("road: the exit must branch from the rightmost lane");
    }
    if (!(exit->end_y > exit->start_y)) {
      throw std::invalid_argument("road: exit span must have positive length");
    }
  }
}

int RoadLayout::lane_index(double x) const {
  const auto lane = static_cast<int>(std::floor((x - left_edge) / lane_width));
  return std::clamp(lane, 0, lane_count - 1);
}

RoadLayout RoadLayout::translated(double dx, double dy) const {
  RoadLayout out = *this;
  out.left_edge += dx;
  if (out.exit) {
    out.exit->start_y += dy;
    out.exit->end_y += dy;
  }
  return out;
}

}  // namespace cohesion
