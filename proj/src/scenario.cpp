#include "occlunav/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "occlunav/error.hpp"
#include "occlunav/rng.hpp"
#include "occlunav/semantics.hpp"
#include "occlunav/spatial_index.hpp"

namespace occlunav {

std::string_view to_string(Scenario s) noexcept {
  switch (s) {
    case Scenario::StaticOccluded: return "static";
    case Scenario::DynamicTarget: return "dynamic";
    case Scenario::SuddenObstacle: return "sudden";
  }
  return "?";
}

std::optional<Scenario> scenario_from_string(std::string_view name) noexcept {
  if (name == "static") return Scenario::StaticOccluded;
  if (name == "dynamic") return Scenario::DynamicTarget;
  if (name == "sudden") return Scenario::SuddenObstacle;
  return std::nullopt;
}

std::vector<Vec3> label_positions(const GaussianScene& scene, Label label) {
  std::vector<Vec3> out;
  for (const auto& g : scene.gaussians) {
    if (g.label == label) out.push_back(g.position);
  }
  return out;
}

double planar_distance(const Vec3& p, std::span<const Vec3> targets) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& t : targets) best = std::min(best, std::hypot(t.x() - p.x(), t.y() - p.y()));
  return best;
}

OccupancyGrid world_grid(const GaussianScene& scene, Label ignore_label, const Config& cfg) {
  std::vector<Vec3> pts;
  pts.reserve(scene.size());
  for (const auto& g : scene.gaussians) pts.push_back(g.position);
  OccupancyGrid grid = OccupancyGrid::covering(pts, cfg.grid_cell, 0.5);
  for (const auto& g : scene.gaussians) {
    if (g.label != ignore_label) grid.add(g);
  }
  grid.inflate(cfg.robot_radius - 0.5 * cfg.grid_cell);
  return grid;
}

double geodesic_to_targets(const OccupancyGrid& grid, const Vec3& from, std::span<const Vec3> targets) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kFinalLeg = 1.0;
  if (targets.empty()) return kInf;
  double best = kInf;
  const Vec3 start(from.x(), from.y(), 0.0);
  auto nearest_target = [&](const Vec3& p) {
    double d = kInf;
    Vec3 q = Vec3::Zero();
    for (const Vec3& t : targets) {
      const double e = std::hypot(t.x() - p.x(), t.y() - p.y());
      if (e < d) {
        d = e;
        q = Vec3(t.x(), t.y(), 0.0);
      }
    }
    return std::pair{d, q};
  };
  {
    const auto [d, q] = nearest_target(start);
    if (d <= kFinalLeg && grid.segment_clear(start, q)) best = d;
  }
  const std::vector<double> dist = grid.distances_from(start);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (!std::isfinite(dist[i]) || dist[i] >= best) continue;
    const Vec3 c = grid.center(static_cast<int>(i));
    const auto [d, q] = nearest_target(c);
    if (d > kFinalLeg || dist[i] + d >= best) continue;
    if (grid.segment_clear(c, q)) best = dist[i] + d;
  }
  return best;
}

double geodesic_to_target(const GaussianScene& world, const Vec3& from, Label target_label, const Config& cfg) {
  const OccupancyGrid grid = world_grid(world, target_label, cfg);
  const std::vector<Vec3> targets = label_positions(world, target_label);
  return geodesic_to_targets(grid, from, targets);
}

// --- procedural rooms ------------------------------------------------------

namespace {

constexpr double kFloorSpacing = 0.2;
constexpr double kWallSpacing = 0.14;
constexpr double kWallHeight = 1.5;
// Large enough relative to the spacing that splats of a wall leave no pixel holes.
constexpr double kWallRadius = 0.12;
constexpr double kPartitionHeight = 1.2;
constexpr int kMaxAttempts = 100;

const Vec3 kFloorColor(0.55, 0.55, 0.55);
const Vec3 kWallColor(0.85, 0.8, 0.7);
const Vec3 kPartitionColor(0.45, 0.3, 0.2);
const Vec3 kObstacleColor(0.2, 0.4, 0.8);

Vec3 object_color(Label label) {
  switch (label % 3) {
    case 0: return {0.95, 0.4, 0.7};
    case 1: return {0.2, 0.8, 0.3};
    default: return {0.95, 0.8, 0.1};
  }
}

void add_floor(GaussianScene& s, double w, double d) {
  for (double y = kFloorSpacing / 2; y < d; y += kFloorSpacing) {
    for (double x = kFloorSpacing / 2; x < w; x += kFloorSpacing) {
      s.gaussians.push_back({Vec3(x, y, 0.0), kFloorColor, kFloorSpacing / 2, 1.0, kFloorLabel});
    }
  }
}

void add_wall(GaussianScene& s, const Vec2& a, const Vec2& b, double height, Label label, const Vec3& color) {
  const double len = (b - a).norm();
  const int cols = std::max(1, static_cast<int>(std::ceil(len / kWallSpacing))) + 1;
  for (int c = 0; c < cols; ++c) {
    const Vec2 p = a + (b - a) * (static_cast<double>(c) / (cols - 1));
    for (double z = kWallSpacing / 2; z < height; z += kWallSpacing) {
      s.gaussians.push_back({Vec3(p.x(), p.y(), z), color, kWallRadius, 1.0, label});
    }
  }
}

void add_cluster(GaussianScene& s, const Vec2& c, Label label, const Vec3& color) {
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      for (int k = 0; k < 3; ++k) {
        s.gaussians.push_back({Vec3(c.x() + 0.1 * i, c.y() + 0.1 * j, 0.1 + 0.1 * k), color, 0.06, 1.0, label});
      }
    }
  }
}

GaussianScene make_box(const Vec2& c, double half, double height) {
  GaussianScene box;
  const Vec2 corners[4] = {c + Vec2(-half, -half), c + Vec2(half, -half), c + Vec2(half, half), c + Vec2(-half, half)};
  for (int i = 0; i < 4; ++i) add_wall(box, corners[i], corners[(i + 1) % 4], height, kSuddenObstacleLabel, kObstacleColor);
  return box;
}

double clearance(const GaussianScene& s, const Vec2& p, Label ignore = kUnlabeled) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : s.gaussians) {
    if (!is_obstacle(g) || (ignore != kUnlabeled && g.label == ignore)) continue;
    best = std::min(best, std::hypot(g.position.x() - p.x(), g.position.y() - p.y()));
  }
  return best;
}

// Conservative check: the target is fattened so that headings between the
// sampled ones cannot catch an edge pixel.
bool target_visible_from(const GaussianScene& s, const Vec3& cam_pos, Label target, const Intrinsics& k) {
  GaussianScene probe = s;
  for (auto& g : probe.gaussians) {
    if (g.label == target) g.radius *= 1.3;
  }
  for (int h = 0; h < 16; ++h) {
    const RenderResult r = render(probe, level_camera(cam_pos, h * kPi / 8.0), k);
    if (std::find(r.labels.data.begin(), r.labels.data.end(), target) != r.labels.data.end()) return true;
  }
  return false;
}

std::optional<EpisodeSpec> try_generate(Scenario family, Rng& rng, const Config& cfg) {
  const double w = 5.0 + 0.2 * static_cast<double>(rng.uniform_int(0, 10));
  const double d = 5.0 + 0.2 * static_cast<double>(rng.uniform_int(0, 10));
  const Label target = kFirstObjectLabel + static_cast<Label>(rng.uniform_int(0, kObjectLabelCount - 1));
  const Label distractor = kFirstObjectLabel + (target - kFirstObjectLabel + 1 + static_cast<Label>(rng.uniform_int(0, 1))) % kObjectLabelCount;

  const Vec2 start(rng.uniform(0.7, w - 0.7), rng.uniform(0.7, d - 0.7));
  const Vec2 goal(rng.uniform(0.9, w - 0.9), rng.uniform(0.9, d - 0.9));
  if ((goal - start).norm() < 2.5) return std::nullopt;

  GaussianScene s;
  add_floor(s, w, d);
  add_wall(s, {0, 0}, {w, 0}, kWallHeight, kWallLabel, kWallColor);
  add_wall(s, {w, 0}, {w, d}, kWallHeight, kWallLabel, kWallColor);
  add_wall(s, {w, d}, {0, d}, kWallHeight, kWallLabel, kWallColor);
  add_wall(s, {0, d}, {0, 0}, kWallHeight, kWallLabel, kWallColor);

  // Main occluder between start and target, roughly perpendicular to the line of sight.
  const Vec2 u = (goal - start).normalized();
  const Vec2 perp(-u.y(), u.x());
  const Vec2 mid = goal - u * rng.uniform(0.6, 1.0);
  const double half_len = 0.5 * rng.uniform(1.6, 2.6);
  const double skew = rng.uniform(-0.3, 0.3);
  auto clip = [&](Vec2 p) { return Vec2(std::clamp(p.x(), 0.3, w - 0.3), std::clamp(p.y(), 0.3, d - 0.3)); };
  add_wall(s, clip(mid - perp * half_len * (1.0 + skew)), clip(mid + perp * half_len * (1.0 - skew)), kPartitionHeight,
           kPartitionLabel, kPartitionColor);

  const int extra = static_cast<int>(rng.uniform_int(0, 2));
  for (int i = 0; i < extra; ++i) {
    const Vec2 c(rng.uniform(0.8, w - 0.8), rng.uniform(0.8, d - 0.8));
    const double len = rng.uniform(1.0, 2.0);
    const Vec2 dir = rng.uniform() < 0.5 ? Vec2(1, 0) : Vec2(0, 1);
    const Vec2 a = clip(c - dir * len / 2), b = clip(c + dir * len / 2);
    GaussianScene seg;
    add_wall(seg, a, b, kPartitionHeight, kPartitionLabel, kPartitionColor);
    if (clearance(seg, start) < 0.8 || clearance(seg, goal) < 0.7) continue;
    s.gaussians.insert(s.gaussians.end(), seg.gaussians.begin(), seg.gaussians.end());
  }

  const Vec2 other(rng.uniform(0.8, w - 0.8), rng.uniform(0.8, d - 0.8));
  if ((other - goal).norm() > 1.5 && (other - start).norm() > 1.0 && clearance(s, other) > 0.5) {
    add_cluster(s, other, distractor, object_color(distractor));
  }

  if (clearance(s, start) < 0.5 || clearance(s, goal) < 0.5) return std::nullopt;
  add_cluster(s, goal, target, object_color(target));

  EpisodeSpec spec;
  spec.scenario = family;
  spec.target_label = target;
  spec.max_steps = cfg.max_steps;
  spec.success_dist = cfg.success_dist;
  const Vec3 cam(start.x(), start.y(), cfg.camera_mount_height);
  const double yaw = std::atan2(u.y(), u.x()) + rng.uniform(-0.4, 0.4);
  spec.start_pose = level_camera(cam, yaw);

  const Intrinsics k = cfg.intrinsics();
  if (target_visible_from(s, cam, target, k)) return std::nullopt;

  const Vec3 start3(start.x(), start.y(), 0.0);
  const OccupancyGrid grid = world_grid(s, target, cfg);
  const std::vector<Vec3> target_pts = label_positions(s, target);
  if (!std::isfinite(geodesic_to_targets(grid, start3, target_pts))) return std::nullopt;

  if (family == Scenario::DynamicTarget) {
    // Constant velocity covering 1-2.5 m over the step budget, clear of obstacles throughout.
    const double travel = rng.uniform(1.0, 2.5);
    const int horizon = std::max(1, cfg.max_steps);
    bool placed = false;
    for (int tries = 0; tries < 8 && !placed; ++tries) {
      const double ang = rng.uniform(0.0, 2.0 * kPi);
      const Vec3 v = (travel / horizon) * Vec3(std::cos(ang), std::sin(ang), 0.0);
      const Vec2 end = goal + Vec2(v.x(), v.y()) * horizon;
      if (end.x() < 0.6 || end.y() < 0.6 || end.x() > w - 0.6 || end.y() > d - 0.6) continue;
      bool clear = true;
      for (int t = 0; t <= 20 && clear; ++t) {
        const Vec2 p = goal + (end - goal) * (t / 20.0);
        clear = clearance(s, p, target) >= 0.5 && (p - start).norm() > 0.8;
      }
      if (clear) {
        spec.target_velocity = v;
        placed = true;
      }
    }
    if (!placed) return std::nullopt;
  }

  if (family == Scenario::SuddenObstacle) {
    // Block the initial shortest route part-way along.
    const auto s_idx = grid.index_of(start3);
    if (!s_idx) return std::nullopt;
    int goal_idx = -1;
    double best = std::numeric_limits<double>::infinity();
    const std::vector<double> dist = grid.distances_from(start3);
    for (std::size_t i = 0; i < dist.size(); ++i) {
      const Vec3 c = grid.center(static_cast<int>(i));
      if (std::isfinite(dist[i]) && planar_distance(c, target_pts) <= 0.6 && dist[i] < best) {
        best = dist[i];
        goal_idx = static_cast<int>(i);
      }
    }
    if (goal_idx < 0) return std::nullopt;
    const auto path = grid.astar(*s_idx, goal_idx);
    if (!path || path->size() < 8) return std::nullopt;
    const double frac = rng.uniform(0.35, 0.6);
    const Vec3 at = grid.center((*path)[static_cast<std::size_t>(frac * (path->size() - 1))]);
    const Vec2 c(at.x(), at.y());
    if ((c - start).norm() < 1.0 || (c - goal).norm() < 0.8) return std::nullopt;
    GaussianScene box = make_box(c, 0.3, 0.8);
    GaussianScene with_box = s;
    with_box.gaussians.insert(with_box.gaussians.end(), box.gaussians.begin(), box.gaussians.end());
    if (!std::isfinite(geodesic_to_target(with_box, start3, target, cfg))) return std::nullopt;
    spec.sudden_obstacle = std::move(box);
    spec.obstacle_insert_step = static_cast<int>(rng.uniform_int(1, std::max(1, std::min(4, cfg.max_steps))));
  }

  spec.hidden_scene = std::move(s);
  return spec;
}

}  // namespace

EpisodeSpec generate_episode(Scenario family, int id, std::uint64_t seed, const Config& cfg) {
  const std::uint64_t episode_seed = derive_seed(seed, {static_cast<std::uint64_t>(family), static_cast<std::uint64_t>(id)});
  Rng rng(episode_seed);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    if (auto spec = try_generate(family, rng, cfg)) {
      spec->id = id;
      spec->seed = episode_seed;
      return std::move(*spec);
    }
  }
  throw Error(Errc::GenerationFailed, "no valid " + std::string(to_string(family)) + " layout for episode " +
                                          std::to_string(id) + " within 100 attempts");
}

std::vector<EpisodeSpec> generate_scene_suite(Scenario family, int count, std::uint64_t seed, const Config& cfg) {
  if (count < 1) throw Error(Errc::InvalidParams, "suite size must be >= 1");
  std::vector<EpisodeSpec> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(generate_episode(family, i, seed, cfg));
  return out;
}

}  // namespace occlunav
