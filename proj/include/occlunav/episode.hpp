#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "occlunav/config.hpp"
#include "occlunav/grid.hpp"
#include "occlunav/gsscene.hpp"
#include "occlunav/imagination.hpp"
#include "occlunav/observation.hpp"
#include "occlunav/scenario.hpp"
#include "occlunav/valuemap.hpp"

namespace occlunav {

/// What the robot's sensors return at one pose. `labels` stands in for the
/// output of an external 2D segmenter.
struct SensorFrame {
  Observation obs;
  LabelImage labels;
};

SensorFrame sense(const GaussianScene& hidden, const Pose& camera_pose, const Intrinsics& k);

/// One decision record. Serialized as
/// step,qw,qx,qy,qz,tx,ty,tz,waypoint_index,wx,wy,wz,n_nav,n_sem,n_hyp,score
struct TraceRecord {
  int step = 0;
  Pose pose;
  std::size_t waypoint_index = 0;
  Vec3 waypoint = Vec3::Zero();
  std::size_t n_nav = 0;
  std::size_t n_sem = 0;
  std::size_t n_hyp = 0;
  std::size_t n_real = 0;  // kept in memory only
  double score = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

std::string format_trace_line(const TraceRecord& r);

/// Top-down affordance picture of one decision, consumed by render-map.
struct MapSnapshot {
  Vec3 robot = Vec3::Zero();
  double cell = 0.1;
  AffordanceField field;
};

void write_snapshot(std::ostream& out, const MapSnapshot& snap);
MapSnapshot read_snapshot(std::istream& in);

struct LandmarkCommand {
  std::string action = "approach";
  Label landmark = kUnlabeled;
  Vec3 preferred_direction = Vec3::UnitX();  // unit, horizontal
};

/// Mutable per-episode state of the navigator.
struct NavigationState {
  Vec3 robot = Vec3::Zero();  // floor position (z = 0)
  double yaw = 0.0;
  Vec3 last_motion_dir = Vec3::UnitX();

  GaussianScene observed;  // back-projected senses, World/metric
  std::vector<GaussianScene> imagined;  // latest aligned, labeled imagination
  GaussianScene merged;
  std::vector<std::uint32_t> merged_source;  // 0 = observed, >0 = imagined

  NavigableSet nav;
  std::vector<Vec3> nav_sem;
  TargetSets targets;
  std::vector<Vec3> f_new;
  std::vector<Vec3> frontiers;
  OccupancyGrid grid;
  bool has_grid = false;

  std::vector<Vec3> visited;
  std::vector<LandmarkCommand> plan;  // landmark stub outputs, one per step
  std::vector<TraceRecord> trace;
  std::optional<MapSnapshot> snapshot;
  std::vector<Vec3> positions;  // robot position after every motion sub-step
  double path_length = 0.0;
};

/// Deterministic stand-in for the language-model planner.
LandmarkCommand landmark_stub(const EpisodeSpec& spec, const NavigationState& state, const ValueWeights& w);

/// Heading of the camera for the next decision: toward the closest known
/// occupied cell within 3 m and 30 degrees of the preferred direction, or
/// along the preferred direction when there is none.
double anchor_yaw(const NavigationState& state, const Vec3& preferred);

/// Integrates an RGB-D frame into the observed scene: stale non-floor points
/// that the new depth sees through are removed, new pixels are back-projected
/// and voxel-merged at eps.
void integrate_observation(GaussianScene& observed, const SensorFrame& frame, const Intrinsics& k, double eps);

/// Navigable Gaussians: floor Gaussians with no obstacle Gaussian within
/// `radius` horizontally.
std::vector<std::size_t> navigable_indices(const GaussianScene& scene, double radius);

struct EpisodeResult {
  bool success = false;
  int steps = 0;
  double path_length = 0.0;    // L
  double shortest_path = 0.0;  // L*
  double dtg = 0.0;
  std::vector<TraceRecord> trace;
  std::vector<Vec3> positions;
  std::optional<MapSnapshot> snapshot;
  bool target_visible_at_end = false;
};

/// Runs one episode. `factory` may be null (no imagination). Imagination is
/// also skipped when beta == 1 since its contribution is multiplied by zero.
EpisodeResult run_episode(const EpisodeSpec& spec, const WorldModelFactory* factory, const Config& cfg);

struct Metrics {
  double sr = 0.0;
  double spl = 0.0;
  double dtg = 0.0;
};

/// Per-episode SPL contribution: S * L* / max(L, L*).
double spl_term(bool success, double path_length, double shortest_path);

/// Throws Errc::EmptyResults for an empty span.
Metrics metrics(std::span<const EpisodeResult> results);

}  // namespace occlunav
