#include "occlunav/geometry.hpp"

#include <cmath>

#include "occlunav/error.hpp"

namespace occlunav {

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

bool Pose::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

Pose compose(const Pose& a, const Pose& b) {
  return Pose{a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

Pose invert(const Pose& p) {
  const Mat3 rt = p.rotation.transpose();
  return Pose{rt, -(rt * p.translation)};
}

Vec3 apply(const Pose& p, const Vec3& x) { return p.rotation * x + p.translation; }

double pose_distance(const Pose& a, const Pose& b) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

Pose look_at(const Vec3& position, const Vec3& target, const Vec3& up_hint) {
  const Vec3 z = (target - position).normalized();
  const Vec3 x = z.cross(up_hint).normalized();
  const Vec3 y = z.cross(x);
  Pose p;
  p.rotation.col(0) = x;
  p.rotation.col(1) = y;
  p.rotation.col(2) = z;
  p.translation = position;
  return p;
}

Pose level_camera(const Vec3& position, double yaw_rad) {
  const Vec3 dir(std::cos(yaw_rad), std::sin(yaw_rad), 0.0);
  return look_at(position, position + dir, Vec3::UnitZ());
}

void Intrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw Error(Errc::InvalidIntrinsics, "focal lengths must be positive");
  if (width <= 0 || height <= 0) throw Error(Errc::InvalidIntrinsics, "image size must be positive");
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw Error(Errc::InvalidIntrinsics, "principal point outside the image");
  }
}

Vec2 project(const Vec3& point_cam, const Intrinsics& k) {
  const double z = point_cam.z();
  if (!(z > 0.0)) throw Error(Errc::NonPositiveDepth, "point at z <= 0 cannot be projected");
  return {k.fx * point_cam.x() / z + k.cx, k.fy * point_cam.y() / z + k.cy};
}

Vec3 unproject(double u, double v, double depth, const Intrinsics& k) {
  return {(u - k.cx) / k.fx * depth, (v - k.cy) / k.fy * depth, depth};
}

Intrinsics intrinsics_from_hfov(int width, int height, double hfov_deg) {
  if (!(hfov_deg > 0.0 && hfov_deg < 180.0)) {
    throw Error(Errc::InvalidFov, "hfov must lie in (0, 180) degrees");
  }
  if (width <= 0 || height <= 0) throw Error(Errc::InvalidIntrinsics, "image size must be positive");
  Intrinsics k;
  k.width = width;
  k.height = height;
  k.fx = k.fy = (width / 2.0) / std::tan(deg2rad(hfov_deg) / 2.0);
  k.cx = width / 2.0;
  k.cy = height / 2.0;
  return k;
}

double hfov_degrees(const Intrinsics& k) { return rad2deg(2.0 * std::atan(k.width / (2.0 * k.fx))); }

}  // namespace occlunav
