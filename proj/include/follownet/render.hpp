#pragma once

#include <vector>

#include "follownet/house_map.hpp"
#include "follownet/tensor.hpp"

namespace follownet {

struct RenderParams {
  int h_img = 24;
  int w_img = 32;
  double fov = 1.5707963267948966;  // 90 degrees horizontal
  double d_max = 20.0;              // meters
};

// First-person view: a one-hot semantic image [h x w x C] and a depth image
// [h x w] with values in [0, 1]. Tokens ride along untouched so one struct
// carries everything the agent is allowed to see.
struct Observation {
  TensorPtr semantic;
  TensorPtr depth;
  std::vector<int> tokens;
};

// One ray per image column across the horizontal field of view; the wall band
// height encodes perpendicular distance, ceiling above, floor below, with
// linear depth gradients on both.
Observation render_observation(const HouseMap& house, const Pose& pose,
                               const std::vector<int>& tokens,
                               const RenderParams& params = {});

}  // namespace follownet
