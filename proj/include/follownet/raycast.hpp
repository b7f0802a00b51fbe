#pragma once

#include "follownet/house_map.hpp"

namespace follownet {

struct RayHit {
  double distance = 0.0;  // meters from the cell-center origin, clamped to d_max
  int hit_class = kClassWall;
};

// Casts a ray from the center of the pose's cell at the pose's heading angle
// plus `azimuth_offset` (radians, counterclockwise positive). Grid traversal
// visits cells in order; when a crossing lands exactly on a cell corner the
// x step is taken first. Returns the first wall/door/object cell's class and
// the Euclidean distance to the point where the ray enters that cell.
RayHit raycast(const HouseMap& house, const Pose& pose, double azimuth_offset,
               double d_max = 1e30);

}  // namespace follownet
