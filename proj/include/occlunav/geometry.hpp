#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace occlunav {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Camera frame: +z forward, +x right, +y down. World frame: z up.

/// Rigid transform mapping points from a local (camera/body) frame into the
/// parent frame: x_parent = rotation * x_local + translation.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }

  Vec3 forward() const { return rotation.col(2); }
  Vec3 right() const { return rotation.col(0); }
  Vec3 left() const { return -rotation.col(0); }
  Vec3 up() const { return -rotation.col(1); }

  Mat4 matrix() const;
  Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(rotation); }

  /// True when the rotation is orthonormal with determinant +1 within tol.
  bool is_valid(double tol = 1e-9) const;

  /// Exact element-wise equality.
  bool operator==(const Pose& o) const { return rotation == o.rotation && translation == o.translation; }
};

Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& p);
Vec3 apply(const Pose& p, const Vec3& x);

/// Max absolute element difference of the 4x4 matrices.
double pose_distance(const Pose& a, const Pose& b);

/// Camera pose at `position` looking at `target`. `up_hint` must not be
/// parallel to the viewing direction.
Pose look_at(const Vec3& position, const Vec3& target, const Vec3& up_hint);

/// Level camera (no pitch/roll) at `position` with heading `yaw_rad`
/// measured counter-clockwise from world +x.
Pose level_camera(const Vec3& position, double yaw_rad);

struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  /// Throws Errc::InvalidIntrinsics unless fx, fy > 0 and the principal
  /// point lies inside the image.
  void validate() const;
};

/// Pinhole projection of a camera-frame point to continuous pixel
/// coordinates. Throws Errc::NonPositiveDepth when z <= 0.
Vec2 project(const Vec3& point_cam, const Intrinsics& k);

/// Ray through pixel (u, v) scaled so that its z component equals `depth`.
Vec3 unproject(double u, double v, double depth, const Intrinsics& k);

/// Square-pixel intrinsics from a horizontal field of view in degrees.
/// Throws Errc::InvalidFov unless 0 < hfov_deg < 180.
Intrinsics intrinsics_from_hfov(int width, int height, double hfov_deg);

double hfov_degrees(const Intrinsics& k);

constexpr double kPi = 3.14159265358979323846;
inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

}  // namespace occlunav
