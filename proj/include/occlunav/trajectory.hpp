#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "occlunav/geometry.hpp"

namespace occlunav {

enum class TrajectoryKind { L, U, R };

std::string_view to_string(TrajectoryKind kind) noexcept;

struct TrajectoryParams {
  Intrinsics k;
  int n = 24;                        // cameras per trajectory
  double d_c = 2.0;                  // orbit radius [m]
  double d_v = 2.0 * kPi / 2.0;      // total arc length [m]

  /// Throws Errc::InvalidParams unless n >= 1, d_v >= 0 and d_c > 0.
  void validate() const;
};

struct CameraTrajectory {
  TrajectoryKind kind = TrajectoryKind::L;
  std::vector<Pose> poses;
  Vec3 orbit_center = Vec3::Zero();
};

/// Orbit of `params.n` cameras around a point `d_c` ahead of the anchor.
///
/// The orbit is a rigid rotation of the anchor pose about an axis through
/// the orbit center, so camera 0 reproduces the anchor exactly and every
/// camera keeps looking at the center:
///  - L: about the anchor's vertical axis, camera swings to the anchor's left
///  - R: mirror image of L, swings to the right
///  - U: about the anchor's horizontal left axis, camera rises over the top
/// The i-th camera sits at angle i * (d_v / d_c) / (n - 1).
///
/// Throws Errc::DegenerateAnchor for a non-orthonormal anchor rotation or a
/// forward axis parallel to world up (no vertical orbit plane exists).
CameraTrajectory generate_trajectory(TrajectoryKind kind, const TrajectoryParams& params, const Pose& anchor);

/// The three candidate trajectories in fixed [L, U, R] order.
std::array<CameraTrajectory, 3> sample_tri(const TrajectoryParams& params, const Pose& anchor);

}  // namespace occlunav
