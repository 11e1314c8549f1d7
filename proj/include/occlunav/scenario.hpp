#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "occlunav/config.hpp"
#include "occlunav/grid.hpp"
#include "occlunav/gsscene.hpp"

namespace occlunav {

enum class Scenario { StaticOccluded, DynamicTarget, SuddenObstacle };

std::string_view to_string(Scenario s) noexcept;
/// Accepts "static", "dynamic", "sudden".
std::optional<Scenario> scenario_from_string(std::string_view name) noexcept;

struct EpisodeSpec {
  int id = 0;
  GaussianScene hidden_scene;  // World frame, metric, fully labeled
  Pose start_pose;             // camera pose at the start position
  Label target_label = kUnlabeled;
  Scenario scenario = Scenario::StaticOccluded;
  Vec3 target_velocity = Vec3::Zero();  // m per decision step (DynamicTarget)
  int obstacle_insert_step = -1;        // SuddenObstacle
  GaussianScene sudden_obstacle;        // inserted at obstacle_insert_step
  int max_steps = 500;
  double success_dist = 0.5;
  std::uint64_t seed = 0;
};

/// Procedural rooms: floor grid at 0.2 m, perimeter walls, 1-3 partitions, a
/// target cluster hidden from the start and one distractor object. The target
/// is never visible from the start position in any heading.
/// Throws Errc::GenerationFailed after 100 rejected attempts for an episode.
std::vector<EpisodeSpec> generate_scene_suite(Scenario family, int count, std::uint64_t seed, const Config& cfg);

EpisodeSpec generate_episode(Scenario family, int id, std::uint64_t seed, const Config& cfg);

/// Positions of the Gaussians carrying `label`.
std::vector<Vec3> label_positions(const GaussianScene& scene, Label label);

/// Planning grid of a fully known world. Gaussians with `ignore_label` (the
/// target) are left out so the target's surroundings stay reachable.
OccupancyGrid world_grid(const GaussianScene& scene, Label ignore_label, const Config& cfg);

/// Geodesic distance on `grid` from `from` to the nearest `targets` point:
/// shortest grid path to a cell within 1 m of a target plus a clear straight
/// final leg. +inf when no such path exists.
double geodesic_to_targets(const OccupancyGrid& grid, const Vec3& from, std::span<const Vec3> targets);

/// Same, computed on the fully known world.
double geodesic_to_target(const GaussianScene& world, const Vec3& from, Label target_label, const Config& cfg);

/// Horizontal distance from `p` to the closest point in `targets`.
double planar_distance(const Vec3& p, std::span<const Vec3> targets);

}  // namespace occlunav
