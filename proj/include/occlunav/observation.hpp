#pragma once

#include "occlunav/geometry.hpp"
#include "occlunav/gsscene.hpp"

namespace occlunav {

/// Egocentric RGB-D frame plus the camera pose in the world frame.
struct Observation {
  RgbImage rgb;
  DepthImage depth;
  Pose pose;
};

}  // namespace occlunav
