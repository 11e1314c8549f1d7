#pragma once

#include "occlunav/gsscene.hpp"

namespace occlunav {

// Semantic ids used by the synthetic worlds.
inline constexpr Label kFloorLabel = 1;
inline constexpr Label kWallLabel = 2;
inline constexpr Label kPartitionLabel = 3;
inline constexpr Label kSuddenObstacleLabel = 4;
inline constexpr Label kFirstObjectLabel = 10;  // target/distractor ids start here
inline constexpr Label kObjectLabelCount = 3;

/// Height band (robot body) in which non-floor Gaussians block motion.
inline constexpr double kObstacleMaxHeight = 1.0;
/// Unlabeled Gaussians above this height are treated as obstacles.
inline constexpr double kUnlabeledObstacleMinHeight = 0.15;

inline bool is_floor(const Gaussian9& g) { return g.label == kFloorLabel; }

/// Non-floor Gaussian inside the robot's height band.
inline bool is_obstacle(const Gaussian9& g) {
  if (g.label == kFloorLabel) return false;
  const double z = g.position.z();
  if (z >= kObstacleMaxHeight || z < -0.3) return false;
  return g.label != kUnlabeled || z > kUnlabeledObstacleMinHeight;
}

}  // namespace occlunav
