#include <gtest/gtest.h>

#include <random>

#include "occlunav/error.hpp"
#include "occlunav/trajectory.hpp"
#include "test_support.hpp"

using namespace occlunav;

namespace {

Pose random_anchor(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-5, 5), yaw(-kPi, kPi), pitch(-1.2, 1.2);
  const Vec3 pos(u(rng), u(rng), u(rng));
  const double y = yaw(rng), p = pitch(rng);
  const Vec3 dir(std::cos(p) * std::cos(y), std::cos(p) * std::sin(y), std::sin(p));
  return look_at(pos, pos + dir, Vec3::UnitZ());
}

TrajectoryParams params(int n, double d_c, double d_v) {
  TrajectoryParams p;
  p.n = n;
  p.d_c = d_c;
  p.d_v = d_v;
  return p;
}

}  // namespace

TEST(Trajectory, ZeroSweepRepeatsAnchor) {
  std::mt19937_64 rng(1);
  const Pose a = random_anchor(rng);
  for (auto kind : {TrajectoryKind::L, TrajectoryKind::U, TrajectoryKind::R}) {
    const auto t = generate_trajectory(kind, params(5, 2.0, 0.0), a);
    ASSERT_EQ(t.poses.size(), 5u);
    for (const Pose& p : t.poses) EXPECT_LT(pose_distance(p, a), 1e-12);
  }
}

TEST(Trajectory, QuarterTurnLeftOnUnitCircle) {
  const Pose a = level_camera({0, 0, 0}, 0.0);  // looking along +x, left is +y
  const auto t = generate_trajectory(TrajectoryKind::L, params(2, 1.0, kPi / 2), a);
  EXPECT_NEAR((t.orbit_center - Vec3(1, 0, 0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((t.poses[1].translation - Vec3(1, 1, 0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((t.poses[1].translation - t.orbit_center).norm(), 1.0, 1e-12);
  const auto r = generate_trajectory(TrajectoryKind::R, params(2, 1.0, kPi / 2), a);
  EXPECT_NEAR((r.poses[1].translation - Vec3(1, -1, 0)).norm(), 0.0, 1e-12);
  const auto u = generate_trajectory(TrajectoryKind::U, params(2, 1.0, kPi / 2), a);
  EXPECT_NEAR((u.poses[1].translation - Vec3(1, 0, 1)).norm(), 0.0, 1e-12);
}

TEST(Trajectory, SingleCameraIsAnchor) {
  std::mt19937_64 rng(2);
  const Pose a = random_anchor(rng);
  const auto t = generate_trajectory(TrajectoryKind::U, params(1, 2.0, kPi), a);
  ASSERT_EQ(t.poses.size(), 1u);
  EXPECT_LT(pose_distance(t.poses[0], a), 1e-12);
}

TEST(Trajectory, CircleSpacingAndLookAtInvariants) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dc(0.5, 3.0), sweep(0.1, 2.5);
  std::uniform_int_distribution<int> n(2, 30);
  for (int trial = 0; trial < 100; ++trial) {
    const Pose a = random_anchor(rng);
    const double d_c = dc(rng);
    const auto p = params(n(rng), d_c, d_c * sweep(rng));
    for (auto kind : {TrajectoryKind::L, TrajectoryKind::U, TrajectoryKind::R}) {
      const auto t = generate_trajectory(kind, p, a);
      ASSERT_EQ(static_cast<int>(t.poses.size()), p.n);
      EXPECT_LT(pose_distance(t.poses[0], a), 1e-12);
      const double chord = (t.poses[1].translation - t.poses[0].translation).norm();
      // Chord of a circle of radius d_c subtending one angular step.
      const double step = (p.d_v / p.d_c) / (p.n - 1);
      EXPECT_NEAR(chord, 2.0 * d_c * std::sin(step / 2.0), 1e-9);
      for (int i = 0; i < p.n; ++i) {
        const Pose& q = t.poses[static_cast<std::size_t>(i)];
        EXPECT_NEAR((q.translation - t.orbit_center).norm(), d_c, 1e-9);
        EXPECT_TRUE(q.is_valid(1e-9));
        EXPECT_NEAR(q.forward().cross((t.orbit_center - q.translation).normalized()).norm(), 0.0, 1e-9);
        EXPECT_GT(q.forward().dot(t.orbit_center - q.translation), 0.0);
        if (i + 1 < p.n) {
          const double c = (t.poses[static_cast<std::size_t>(i) + 1].translation - q.translation).norm();
          EXPECT_NEAR(c, chord, 1e-9);
        }
      }
    }
  }
}

TEST(Trajectory, LeftAndRightAreMirrorImages) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Pose a = random_anchor(rng);
    const auto tri = sample_tri(params(12, 2.0, kPi), a);
    // Normal of the plane spanned by forward and the vertical through the anchor.
    const Vec3 f = a.forward();
    const Vec3 up = (Vec3::UnitZ() - f.dot(Vec3::UnitZ()) * f).normalized();
    const Vec3 nrm = up.cross(f).normalized();
    for (std::size_t i = 0; i < 12; ++i) {
      const Vec3 pl = tri[0].poses[i].translation;
      const Vec3 reflected = pl - 2.0 * (pl - a.translation).dot(nrm) * nrm;
      EXPECT_NEAR((reflected - tri[2].poses[i].translation).norm(), 0.0, 1e-9);
    }
  }
}

TEST(Trajectory, TriOrderAndErrors) {
  const Pose a = level_camera({0, 0, 1}, 0.4);
  const auto tri = sample_tri(TrajectoryParams{}, a);
  EXPECT_EQ(tri[0].kind, TrajectoryKind::L);
  EXPECT_EQ(tri[1].kind, TrajectoryKind::U);
  EXPECT_EQ(tri[2].kind, TrajectoryKind::R);
  EXPECT_EQ(tri[1].poses.size(), 24u);

  Pose bad = a;
  bad.rotation *= 2.0;
  try {
    generate_trajectory(TrajectoryKind::L, TrajectoryParams{}, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateAnchor);
  }
  EXPECT_THROW(generate_trajectory(TrajectoryKind::L, params(0, 2.0, 1.0), a), Error);
  EXPECT_THROW(generate_trajectory(TrajectoryKind::L, params(3, 0.0, 1.0), a), Error);
  EXPECT_THROW(generate_trajectory(TrajectoryKind::L, params(3, 1.0, -1.0), a), Error);
}

TEST(Trajectory, ArcLengthMatchesSweep) {
  const auto p = params(24, 2.0, kPi);
  const auto t = generate_trajectory(TrajectoryKind::R, p, level_camera({0, 0, 0.5}, 1.0));
  double angle = 0.0;
  for (std::size_t i = 0; i + 1 < t.poses.size(); ++i) {
    const Vec3 a = (t.poses[i].translation - t.orbit_center).normalized();
    const Vec3 b = (t.poses[i + 1].translation - t.orbit_center).normalized();
    angle += std::atan2(a.cross(b).norm(), a.dot(b));
  }
  EXPECT_NEAR(angle * p.d_c, p.d_v, 1e-9);
}
