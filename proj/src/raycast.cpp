#include "follownet/raycast.hpp"

#include <cmath>
#include <limits>

#include "follownet/errors.hpp"

namespace follownet {

RayHit raycast(const HouseMap& house, const Pose& pose, double azimuth_offset, double d_max) {
  if (!house.walkable(pose.x, pose.y)) {
    throw ValidationError("raycast: pose (" + std::to_string(pose.x) + "," +
                          std::to_string(pose.y) + ") is not on a walkable cell");
  }
  const double angle = static_cast<int>(pose.heading) * (M_PI / 2.0) + azimuth_offset;
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  const double ox = pose.x + 0.5;
  const double oy = pose.y + 0.5;

  int cx = pose.x;
  int cy = pose.y;
  const int step_x = dx > 0.0 ? 1 : (dx < 0.0 ? -1 : 0);
  const int step_y = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);
  const double inf = std::numeric_limits<double>::infinity();
  const double t_delta_x = step_x != 0 ? 1.0 / std::fabs(dx) : inf;
  const double t_delta_y = step_y != 0 ? 1.0 / std::fabs(dy) : inf;
  // Distance along the ray to the first vertical / horizontal grid line.
  double t_max_x = step_x != 0 ? (step_x > 0 ? (cx + 1.0 - ox) / dx : (cx - ox) / dx) : inf;
  double t_max_y = step_y != 0 ? (step_y > 0 ? (cy + 1.0 - oy) / dy : (cy - oy) / dy) : inf;

  while (true) {
    double t_entry;
    if (t_max_x <= t_max_y) {  // exact corner crossings step x first
      t_entry = t_max_x;
      t_max_x += t_delta_x;
      cx += step_x;
    } else {
      t_entry = t_max_y;
      t_max_y += t_delta_y;
      cy += step_y;
    }
    if (!house.in_bounds(cx, cy)) {
      throw InternalError("raycast: ray escaped the map; border walls are missing");
    }
    const Cell& c = house.at(cx, cy);
    if (c.kind != CellKind::kFloor) {
      return {std::min(t_entry, d_max), c.class_id};
    }
  }
}

}  // namespace follownet
