#include <gtest/gtest.h>

#include <cmath>

#include "occlunav/episode.hpp"
#include "occlunav/error.hpp"
#include "occlunav/scenario.hpp"
#include "occlunav/semantics.hpp"
#include "test_support.hpp"

using namespace occlunav;
using occlunav::testing::gaussian;

namespace {

Config small_config() {
  Config c;
  c.camera_width = 96;
  c.camera_height = 96;
  c.max_steps = 6;
  return c;
}

constexpr Scenario kFamilies[] = {Scenario::StaticOccluded, Scenario::DynamicTarget, Scenario::SuddenObstacle};

bool label_seen(const EpisodeSpec& spec, const Pose& cam, const Intrinsics& k) {
  const auto f = sense(spec.hidden_scene, cam, k);
  for (Label l : f.labels.data)
    if (l == spec.target_label) return true;
  return false;
}

double polyline(const Vec3& start, const std::vector<Vec3>& pts) {
  double total = 0.0;
  Vec3 prev = start;
  for (const auto& p : pts) {
    total += (p - prev).norm();
    prev = p;
  }
  return total;
}

// Floor, and a target cluster right in front of the camera.
EpisodeSpec target_in_front() {
  EpisodeSpec s;
  for (double x = -1.0; x <= 2.0; x += 0.2)
    for (double y = -1.0; y <= 1.0; y += 0.2) s.hidden_scene.gaussians.push_back(gaussian({x, y, 0}, 0.1, kFloorLabel));
  for (double z = 0.1; z <= 0.31; z += 0.1) s.hidden_scene.gaussians.push_back(gaussian({0.35, 0, z}, 0.06, 10));
  s.start_pose = level_camera({0, 0, 0.5}, 0.0);
  s.target_label = 10;
  s.max_steps = 5;
  return s;
}

}  // namespace

TEST(Scenario, Names) {
  for (auto f : kFamilies) EXPECT_EQ(scenario_from_string(to_string(f)), f);
  EXPECT_FALSE(scenario_from_string("nope").has_value());
}

TEST(Scenario, TargetHiddenFromStartInEveryHeading) {
  const Config cfg = small_config();
  const Intrinsics k = cfg.intrinsics();
  for (auto family : kFamilies) {
    for (const auto& spec : generate_scene_suite(family, 8, 11, cfg)) {
      EXPECT_FALSE(spec.hidden_scene.empty());
      EXPECT_FALSE(label_positions(spec.hidden_scene, spec.target_label).empty());
      const Vec3 p = spec.start_pose.translation;
      EXPECT_NEAR(p.z(), cfg.camera_mount_height, 1e-12);
      for (int i = 0; i < 48; ++i) EXPECT_FALSE(label_seen(spec, level_camera(p, i * kPi / 24), k)) << spec.id;
      EXPECT_TRUE(std::isfinite(geodesic_to_target(spec.hidden_scene, p, spec.target_label, cfg)));
    }
  }
}

TEST(Scenario, FamilySpecificFields) {
  const Config cfg = small_config();
  for (const auto& spec : generate_scene_suite(Scenario::DynamicTarget, 5, 3, cfg)) {
    EXPECT_EQ(spec.target_velocity.z(), 0.0);
    const double travel = spec.target_velocity.norm() * cfg.max_steps;
    EXPECT_GE(travel, 1.0 - 1e-9);
    EXPECT_LE(travel, 2.5 + 1e-9);
  }
  for (const auto& spec : generate_scene_suite(Scenario::SuddenObstacle, 5, 3, cfg)) {
    EXPECT_GE(spec.obstacle_insert_step, 1);
    EXPECT_LE(spec.obstacle_insert_step, std::min(4, cfg.max_steps));
    EXPECT_FALSE(spec.sudden_obstacle.empty());
    for (const auto& g : spec.sudden_obstacle.gaussians) EXPECT_EQ(g.label, kSuddenObstacleLabel);
  }
  for (const auto& spec : generate_scene_suite(Scenario::StaticOccluded, 3, 3, cfg)) {
    EXPECT_EQ(spec.target_velocity, Vec3::Zero());
    EXPECT_TRUE(spec.sudden_obstacle.empty());
  }
}

TEST(Scenario, GenerationIsDeterministic) {
  const Config cfg = small_config();
  for (auto family : kFamilies) {
    const auto a = generate_episode(family, 4, 77, cfg);
    const auto b = generate_episode(family, 4, 77, cfg);
    EXPECT_EQ(a.hidden_scene, b.hidden_scene);
    EXPECT_LT(pose_distance(a.start_pose, b.start_pose), 0.0 + 1e-300);
    EXPECT_EQ(a.target_velocity, b.target_velocity);
    EXPECT_NE(generate_episode(family, 5, 77, cfg).hidden_scene, a.hidden_scene);
  }
  EXPECT_THROW(generate_scene_suite(Scenario::StaticOccluded, 0, 1, cfg), Error);
}

TEST(Episode, ImmediateSuccessTakesNoSteps) {
  const auto r = run_episode(target_in_front(), nullptr, small_config());
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(r.path_length, 0.0);
  EXPECT_TRUE(r.target_visible_at_end);
  EXPECT_LT(r.dtg, 0.5);
  EXPECT_DOUBLE_EQ(spl_term(r.success, r.path_length, r.shortest_path), 1.0);
}

TEST(Episode, ZeroBudgetFails) {
  Config cfg = small_config();
  cfg.max_steps = 0;
  EpisodeSpec spec = generate_episode(Scenario::StaticOccluded, 0, 5, small_config());
  spec.max_steps = 0;
  const auto factory = make_oracle_factory(cfg.oracle());
  const auto r = run_episode(spec, &factory, cfg);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(r.path_length, 0.0);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_GT(r.dtg, 0.0);
}

TEST(Episode, PathLengthEqualsTraversedPolyline) {
  const Config cfg = small_config();
  const auto factory = make_oracle_factory(cfg.oracle());
  for (auto family : kFamilies) {
    for (int id = 0; id < 3; ++id) {
      const auto spec = generate_episode(family, id, 21, cfg);
      const auto r = run_episode(spec, &factory, cfg);
      const Vec3 start(spec.start_pose.translation.x(), spec.start_pose.translation.y(), 0.0);
      ASSERT_FALSE(r.positions.empty());
      EXPECT_EQ(r.positions.front(), start);
      EXPECT_NEAR(r.path_length, polyline(start, r.positions), 1e-9);
      EXPECT_LE(r.steps, spec.max_steps);
      EXPECT_LE(r.trace.size(), static_cast<std::size_t>(spec.max_steps) + 1);
      EXPECT_GE(r.dtg, 0.0);
      if (r.success) {
        EXPECT_TRUE(r.target_visible_at_end);
        EXPECT_LT(r.dtg, spec.success_dist);
        EXPECT_GT(r.shortest_path, 0.0);
      }
    }
  }
}

TEST(Episode, RunsAreDeterministic) {
  const Config cfg = small_config();
  const auto factory = make_oracle_factory(cfg.oracle());
  const auto spec = generate_episode(Scenario::DynamicTarget, 2, 9, cfg);
  const auto a = run_episode(spec, &factory, cfg);
  const auto b = run_episode(spec, &factory, cfg);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.positions, b.positions);
  EXPECT_EQ(a.success, b.success);
  EXPECT_EQ(a.dtg, b.dtg);
}

TEST(Episode, FullWeightOnObservationIgnoresTheWorldModel) {
  Config cfg = small_config();
  cfg.beta = 1.0;
  const auto factory = make_oracle_factory(cfg.oracle());
  for (int id = 0; id < 2; ++id) {
    const auto spec = generate_episode(Scenario::StaticOccluded, id, 13, cfg);
    const auto with = run_episode(spec, &factory, cfg);
    const auto without = run_episode(spec, nullptr, cfg);
    EXPECT_EQ(with.trace, without.trace);
    EXPECT_EQ(with.positions, without.positions);
    for (const auto& t : with.trace) EXPECT_EQ(t.n_hyp, 0u);
  }
}

TEST(Episode, ImaginationProposesTargetsBeforeTheyAreSeen) {
  const Config cfg = small_config();
  const auto factory = make_oracle_factory(cfg.oracle());
  int early = 0;
  for (int id = 0; id < 6; ++id) {
    const auto r = run_episode(generate_episode(Scenario::StaticOccluded, id, 1, cfg), &factory, cfg);
    for (const auto& t : r.trace) {
      if (t.n_real > 0) break;
      if (t.n_hyp > 0) {
        ++early;
        break;
      }
    }
  }
  EXPECT_GT(early, 0);
}

TEST(Episode, NavigableExcludesFloorNearObstacles) {
  GaussianScene s;
  s.gaussians = {gaussian({0, 0, 0}, 0.1, kFloorLabel), gaussian({1, 0, 0}, 0.1, kFloorLabel),
                 gaussian({1.2, 0, 0.5}, 0.1, kWallLabel), gaussian({0, 0.2, 1.5}, 0.1, kWallLabel)};
  EXPECT_EQ(navigable_indices(s, 0.3), (std::vector<std::size_t>{0}));
}

TEST(Episode, SnapshotRoundTrip) {
  MapSnapshot snap;
  snap.robot = Vec3(0.1, -2.0 / 3.0, 0);
  snap.cell = 0.1;
  snap.field.positions = {{1, 2, 0}, {0.3, 0.1, 0}};
  snap.field.m = {0.25, 1.0 / 3.0};
  snap.field.m_fa = {0.5, 0.75};
  snap.field.m_aff = {0.125, 1e-17};
  snap.field.selected = 1;
  std::stringstream ss;
  write_snapshot(ss, snap);
  const MapSnapshot back = read_snapshot(ss);
  EXPECT_EQ(back.robot, snap.robot);
  EXPECT_EQ(back.field.positions, snap.field.positions);
  EXPECT_EQ(back.field.m, snap.field.m);
  EXPECT_EQ(back.field.m_fa, snap.field.m_fa);
  EXPECT_EQ(back.field.m_aff, snap.field.m_aff);
  EXPECT_EQ(back.field.selected, 1u);
}

TEST(Metrics, Examples) {
  EXPECT_DOUBLE_EQ(spl_term(true, 10.0, 5.0), 0.5);
  EXPECT_DOUBLE_EQ(spl_term(true, 4.0, 5.0), 1.0);
  EXPECT_DOUBLE_EQ(spl_term(false, 5.0, 5.0), 0.0);
  std::vector<EpisodeResult> rs(4);
  rs[0].success = true;
  rs[0].path_length = 8;
  rs[0].shortest_path = 4;
  rs[0].dtg = 0.2;
  rs[1].success = true;
  rs[1].path_length = 3;
  rs[1].shortest_path = 3;
  rs[1].dtg = 0.4;
  rs[2].dtg = 3.0;
  rs[3].dtg = 1.0;
  const Metrics m = metrics(rs);
  EXPECT_DOUBLE_EQ(m.sr, 0.5);
  EXPECT_DOUBLE_EQ(m.spl, 0.375);
  EXPECT_DOUBLE_EQ(m.dtg, 1.15);
  try {
    metrics(std::span<const EpisodeResult>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyResults);
  }
}

TEST(Metrics, SplBoundedBySuccessRate) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::bernoulli_distribution ok(0.5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EpisodeResult> rs(10);
    for (auto& r : rs) {
      r.success = ok(rng);
      r.shortest_path = u(rng) + 0.1;
      r.path_length = u(rng);
    }
    const Metrics m = metrics(rs);
    EXPECT_LE(m.spl, m.sr + 1e-12);
    EXPECT_GE(m.spl, 0.0);
  }
}
