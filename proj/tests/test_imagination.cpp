#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "occlunav/error.hpp"
#include "occlunav/grounding.hpp"
#include "occlunav/imagination.hpp"
#include "test_support.hpp"

using namespace occlunav;
using occlunav::testing::gaussian;

namespace {

// Floor patch, a short wall 2 m ahead and a labeled box hidden behind it.
GaussianScene room() {
  GaussianScene s;
  for (double x = 0.4; x <= 5.0; x += 0.2)
    for (double y = -2.0; y <= 2.0; y += 0.2) s.gaussians.push_back(gaussian({x, y, 0.0}, 0.1, 1));
  for (double y = -0.6; y <= 0.6; y += 0.1)
    for (double z = 0.05; z <= 1.2; z += 0.1) s.gaussians.push_back(gaussian({2.0, y, z}, 0.07, 2));
  for (double y = -0.1; y <= 0.1; y += 0.1)
    for (double z = 0.1; z <= 0.3; z += 0.1) s.gaussians.push_back(gaussian({2.6, y, z}, 0.06, 11));
  return s;
}

Intrinsics k64() { return intrinsics_from_hfov(64, 64, 79.0); }

Observation observe(const GaussianScene& s, const Pose& cam) {
  const RenderResult r = render(s, cam, k64());
  return {r.rgb, r.depth, cam};
}

TrajectoryParams tparams(int n = 8) {
  TrajectoryParams p;
  p.n = n;
  return p;
}

Pose anchor() { return level_camera({0.0, 0.0, 0.5}, 0.0); }

OracleConfig fixed_scale(double s) {
  OracleConfig c;
  c.scale_min = c.scale_max = s;
  return c;
}

class ThrowsOnU final : public WorldModel {
 public:
  explicit ThrowsOnU(const GaussianScene& hidden) : inner_(hidden, OracleConfig{}) {}
  ImaginedScene imagine(const Observation& obs, const CameraTrajectory& traj, const Intrinsics& k) const override {
    if (traj.kind == TrajectoryKind::U) throw Error(Errc::ImaginationFailed, "backend down");
    return inner_.imagine(obs, traj, k);
  }

 private:
  OracleWorldModel inner_;
};

}  // namespace

TEST(Imagination, OutputShapeAndFrame) {
  const GaussianScene s = room();
  const auto traj = generate_trajectory(TrajectoryKind::L, tparams(), anchor());
  const auto im = oracle_imagine(s, observe(s, anchor()), traj, k64(), OracleConfig{});
  EXPECT_EQ(im.scene.frame, Frame::LocalImagined);
  EXPECT_FALSE(im.scene.metric);
  ASSERT_EQ(im.local_poses.size(), traj.poses.size());
  ASSERT_EQ(im.rendered_depths.size(), traj.poses.size());
  ASSERT_EQ(im.rendered_labels.size(), traj.poses.size());
  EXPECT_LT(pose_distance(im.local_poses[0], Pose::identity()), 1e-15);
  for (const auto& d : im.rendered_depths) EXPECT_TRUE(d.same_shape(64, 64));
  for (const auto& g : im.scene.gaussians) EXPECT_EQ(g.label, kUnlabeled);
  EXPECT_FALSE(im.scene.empty());
}

TEST(Imagination, KnownScaleHalvesAnchorDepth) {
  const GaussianScene s = room();
  const Observation obs = observe(s, anchor());
  const auto traj = generate_trajectory(TrajectoryKind::R, tparams(), anchor());
  const auto im = oracle_imagine(s, obs, traj, k64(), fixed_scale(2.0));
  std::size_t valid = 0, close = 0;
  for (std::size_t i = 0; i < obs.depth.data.size(); ++i) {
    if (obs.depth.data[i] <= 0) continue;
    ++valid;
    if (std::abs(im.rendered_depths[0].data[i] - obs.depth.data[i] / 2.0) < 1e-9) ++close;
  }
  ASSERT_GT(valid, 0u);
  EXPECT_GE(static_cast<double>(close) / valid, 0.99);
  EXPECT_NEAR(global_scale(obs.depth, im.rendered_depths[0]).s, 2.0, 1e-9);
}

TEST(Imagination, SeedDeterminism) {
  const GaussianScene s = room();
  const Observation obs = observe(s, anchor());
  const auto traj = generate_trajectory(TrajectoryKind::U, tparams(), anchor());
  OracleConfig c;
  c.dropout = 0.3;
  c.position_noise_sigma = 0.01;
  c.seed = 7;
  const auto a = oracle_imagine(s, obs, traj, k64(), c);
  const auto b = oracle_imagine(s, obs, traj, k64(), c);
  EXPECT_EQ(a.scene, b.scene);
  EXPECT_EQ(a.rendered_depths, b.rendered_depths);
  c.seed = 8;
  EXPECT_NE(oracle_imagine(s, obs, traj, k64(), c).scene, a.scene);
}

TEST(Imagination, EveryImaginedGaussianWasVisible) {
  const GaussianScene s = room();
  const Observation obs = observe(s, anchor());
  for (auto kind : {TrajectoryKind::L, TrajectoryKind::U, TrajectoryKind::R}) {
    const auto traj = generate_trajectory(kind, tparams(), anchor());
    const auto im = oracle_imagine(s, obs, traj, k64(), fixed_scale(1.5));
    const auto vis = visible_set(s, traj.poses, k64());
    ASSERT_EQ(im.scene.size(), vis.size());
    for (std::size_t i = 0; i < vis.size(); ++i) {
      const Vec3 world = apply(anchor(), 1.5 * im.scene.gaussians[i].position);
      EXPECT_NEAR((world - s.gaussians[vis[i]].position).norm(), 0.0, 1e-9);
    }
    // Brute force: a Gaussian is visible iff it wins a pixel in some view.
    std::set<std::size_t> winners;
    for (const Pose& p : traj.poses)
      for (auto w : render_indexed(s, p, k64()).winners)
        if (w >= 0) winners.insert(static_cast<std::size_t>(w));
    EXPECT_EQ(std::vector<std::size_t>(winners.begin(), winners.end()), vis);
  }
}

TEST(Imagination, WallHidesEverythingBehindIt) {
  GaussianScene s;
  for (double y = -3; y <= 3; y += 0.1)
    for (double z = -2; z <= 3; z += 0.1) s.gaussians.push_back(gaussian({1.0, y, z}, 0.08, 2));
  s.gaussians.push_back(gaussian({3.0, 0, 0.5}, 0.1, 11));
  TrajectoryParams p = tparams();
  p.d_c = 0.5;
  p.d_v = 0.1;
  const auto traj = generate_trajectory(TrajectoryKind::L, p, anchor());
  const auto vis = visible_set(s, traj.poses, k64());
  EXPECT_TRUE(std::find(vis.begin(), vis.end(), s.size() - 1) == vis.end());
}

TEST(Imagination, Errors) {
  const GaussianScene s = room();
  const Observation obs = observe(s, anchor());
  auto traj = generate_trajectory(TrajectoryKind::L, tparams(), level_camera({0.3, 0, 0.5}, 0.0));
  try {
    oracle_imagine(s, obs, traj, k64(), OracleConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ImaginationFailed);
  }
  GaussianScene behind;
  behind.gaussians = {gaussian({-3, 0, 0.5})};
  const auto t2 = generate_trajectory(TrajectoryKind::L, tparams(), anchor());
  try {
    oracle_imagine(behind, obs, t2, k64(), OracleConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyVisibleSet);
  }
  OracleConfig bad;
  bad.dropout = 1.0;
  EXPECT_THROW(oracle_imagine(s, obs, t2, k64(), bad), Error);
}

TEST(Imagination, TriKeepsOrderAndIsolatesFailures) {
  const GaussianScene s = room();
  const Observation obs = observe(s, anchor());
  const auto tri = sample_tri(tparams(), anchor());
  const ThrowsOnU model(s);
  const auto out = imagine_tri(obs, tri, model, k64());
  EXPECT_TRUE(out[0].has_value());
  EXPECT_FALSE(out[1].has_value());
  EXPECT_TRUE(out[2].has_value());
}

TEST(Imagination, ParallelMatchesSequential) {
  const GaussianScene s = room();
  const Observation obs = observe(s, anchor());
  const auto tri = sample_tri(tparams(), anchor());
  OracleConfig c;
  c.dropout = 0.2;
  c.position_noise_sigma = 0.02;
  c.seed = 99;
  const OracleWorldModel model(s, c);
  const auto seq = imagine_tri(obs, tri, model, k64(), false);
  const auto par = imagine_tri(obs, tri, model, k64(), true);
  for (std::size_t i = 0; i < 3; ++i) {
    ASSERT_TRUE(seq[i] && par[i]);
    EXPECT_EQ(seq[i]->scene, par[i]->scene);
    EXPECT_EQ(seq[i]->rendered_depths, par[i]->rendered_depths);
  }
}

TEST(Imagination, TrajectoriesRevealAtLeastTheAnchorView) {
  const GaussianScene s = room();
  const auto tri = sample_tri(tparams(), anchor());
  const Pose only_anchor[] = {anchor()};
  const auto base = visible_set(s, only_anchor, k64());
  std::set<std::size_t> all;
  for (const auto& t : tri)
    for (auto i : visible_set(s, t.poses, k64())) all.insert(i);
  for (auto i : base) EXPECT_TRUE(all.count(i));
  EXPECT_GT(all.size(), base.size());
  // The box behind the wall is reached by at least one sweep.
  bool box = false;
  for (auto i : all) box = box || s.gaussians[i].label == 11;
  EXPECT_TRUE(box);
}
