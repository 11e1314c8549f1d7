#include "occlunav/trajectory.hpp"

#include <cmath>

#include "occlunav/error.hpp"

namespace occlunav {

std::string_view to_string(TrajectoryKind kind) noexcept {
  switch (kind) {
    case TrajectoryKind::L: return "L";
    case TrajectoryKind::U: return "U";
    case TrajectoryKind::R: return "R";
  }
  return "?";
}

void TrajectoryParams::validate() const {
  if (n < 1) throw Error(Errc::InvalidParams, "camera count must be >= 1");
  if (!(d_v >= 0.0) || !std::isfinite(d_v)) throw Error(Errc::InvalidParams, "d_v must be >= 0");
  if (!(d_c > 0.0) || !std::isfinite(d_c)) throw Error(Errc::InvalidParams, "d_c must be > 0");
}

CameraTrajectory generate_trajectory(TrajectoryKind kind, const TrajectoryParams& params, const Pose& anchor) {
  params.validate();
  if (!anchor.is_valid(1e-6)) throw Error(Errc::DegenerateAnchor, "anchor rotation is not orthonormal");

  const Vec3 forward = anchor.forward();
  // Vertical direction orthogonal to forward, and the horizontal left axis.
  const Vec3 up_perp_raw = Vec3::UnitZ() - forward.dot(Vec3::UnitZ()) * forward;
  if (up_perp_raw.norm() < 1e-9) throw Error(Errc::DegenerateAnchor, "anchor looks straight up or down");
  const Vec3 up_perp = up_perp_raw.normalized();
  const Vec3 left = up_perp.cross(forward);

  CameraTrajectory traj;
  traj.kind = kind;
  traj.orbit_center = anchor.translation + params.d_c * forward;

  Vec3 axis = up_perp;
  double sign = 1.0;
  switch (kind) {
    case TrajectoryKind::L: axis = up_perp; sign = -1.0; break;
    case TrajectoryKind::R: axis = up_perp; sign = 1.0; break;
    case TrajectoryKind::U: axis = left; sign = 1.0; break;
  }
  // Positive rotation about up_perp moves the camera to the right, positive
  // rotation about `left` lifts it.

  const double total = params.d_v / params.d_c;
  const double step = params.n > 1 ? total / (params.n - 1) : 0.0;
  traj.poses.reserve(static_cast<std::size_t>(params.n));
  const Vec3 offset = anchor.translation - traj.orbit_center;
  for (int i = 0; i < params.n; ++i) {
    if (i == 0) {
      traj.poses.push_back(anchor);
      continue;
    }
    const Mat3 rot = Eigen::AngleAxisd(sign * step * i, axis).toRotationMatrix();
    Pose p;
    p.rotation = rot * anchor.rotation;
    p.translation = traj.orbit_center + rot * offset;
    traj.poses.push_back(p);
  }
  return traj;
}

std::array<CameraTrajectory, 3> sample_tri(const TrajectoryParams& params, const Pose& anchor) {
  return {generate_trajectory(TrajectoryKind::L, params, anchor),
          generate_trajectory(TrajectoryKind::U, params, anchor),
          generate_trajectory(TrajectoryKind::R, params, anchor)};
}

}  // namespace occlunav
