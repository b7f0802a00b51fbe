#include "follownet/render.hpp"

#include <cmath>

#include "follownet/errors.hpp"
#include "follownet/raycast.hpp"

namespace follownet {

Observation render_observation(const HouseMap& house, const Pose& pose,
                               const std::vector<int>& tokens, const RenderParams& params) {
  if (params.h_img < 1 || params.w_img < 1) {
    throw ConfigError("render: image dims must be positive");
  }
  if (params.fov <= 0.0 || params.d_max <= 0.0) {
    throw ConfigError("render: fov and d_max must be positive");
  }
  const int h = params.h_img;
  const int w = params.w_img;
  const int n_classes = static_cast<int>(house.class_names.size());

  Observation obs;
  obs.semantic = Tensor::zeros({h, w, n_classes});
  obs.depth = Tensor::zeros({h, w});
  obs.tokens = tokens;

  auto set_pixel = [&](int row, int col, int cls, double depth) {
    obs.semantic->values[(static_cast<std::size_t>(row) * w + col) * n_classes + cls] = 1.0;
    obs.depth->values[static_cast<std::size_t>(row) * w + col] = depth;
  };

  for (int col = 0; col < w; ++col) {
    // Leftmost column looks furthest counterclockwise.
    const double az = params.fov / 2.0 - (col + 0.5) * params.fov / w;
    const RayHit hit = raycast(house, pose, az, params.d_max);
    const double d_perp = hit.distance * std::cos(az);
    const double band_depth = std::min(d_perp / params.d_max, 1.0);

    int band = static_cast<int>(std::lround(h / std::max(d_perp, 1e-9)));
    band = std::max(1, std::min(band, h));
    const int top = (h - band) / 2;
    const int bottom = top + band;  // exclusive

    for (int row = 0; row < top; ++row) {
      // Ceiling: nearest overhead at the image top, receding toward the band.
      const double depth = band_depth * (row + 1) / (top + 1);
      set_pixel(row, col, kClassCeiling, depth);
    }
    for (int row = top; row < bottom; ++row) {
      set_pixel(row, col, hit.hit_class, band_depth);
    }
    const int floor_rows = h - bottom;
    for (int row = bottom; row < h; ++row) {
      // Floor: receding from the band down to the camera's feet.
      const double depth = band_depth * (h - row) / (floor_rows + 1);
      set_pixel(row, col, kClassFloor, depth);
    }
  }
  return obs;
}

}  // namespace follownet
