#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "occlunav/gsscene.hpp"
#include "occlunav/observation.hpp"
#include "occlunav/trajectory.hpp"

namespace occlunav {

/// Output of a world model for one candidate trajectory, expressed in the
/// model's own non-metric local frame.
struct ImaginedScene {
  GaussianScene scene;  // frame = LocalImagined, metric = false
  std::vector<Pose> local_poses;
  std::vector<DepthImage> rendered_depths;
  /// Semantic segmentation of each imagined frame (what a 2D segmenter run
  /// on the imagined video would return). Empty when the backend has none.
  std::vector<LabelImage> rendered_labels;
};

/// Trajectory-conditioned scene predictor. Implementations must be callable
/// from several threads at once.
class WorldModel {
 public:
  virtual ~WorldModel() = default;

  /// Throws Errc::ImaginationFailed (or a backend specific Error) when the
  /// trajectory cannot be imagined.
  virtual ImaginedScene imagine(const Observation& obs, const CameraTrajectory& traj, const Intrinsics& k) const = 0;
};

/// Builds a model bound to the current ground-truth world and a per-call seed.
using WorldModelFactory = std::function<std::unique_ptr<WorldModel>(const GaussianScene& hidden, std::uint64_t seed)>;

struct OracleConfig {
  double scale_min = 0.5;
  double scale_max = 2.0;
  double dropout = 0.0;
  double position_noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Ground-truth stand-in for a generative backend: reveals every hidden
/// Gaussian that wins a pixel along the trajectory, perturbs it (dropout,
/// position noise), and re-expresses it in a local frame anchored at the
/// first camera with a random hidden scale 1/s_true. Labels are stripped.
/// Throws Errc::EmptyVisibleSet when nothing is visible.
ImaginedScene oracle_imagine(const GaussianScene& hidden, const Observation& obs, const CameraTrajectory& traj,
                             const Intrinsics& k, const OracleConfig& cfg);

/// Indices of hidden Gaussians winning at least one pixel from some pose.
std::vector<std::size_t> visible_set(const GaussianScene& hidden, std::span<const Pose> poses, const Intrinsics& k);

class OracleWorldModel final : public WorldModel {
 public:
  OracleWorldModel(const GaussianScene& hidden, OracleConfig cfg) : hidden_(hidden), cfg_(cfg) {}

  ImaginedScene imagine(const Observation& obs, const CameraTrajectory& traj, const Intrinsics& k) const override;

 private:
  OracleConfig config_for(TrajectoryKind kind) const;

  const GaussianScene& hidden_;
  OracleConfig cfg_;
};

WorldModelFactory make_oracle_factory(const OracleConfig& base);

/// Imagines each trajectory; entries whose model call failed are nullopt.
/// Results keep the input order regardless of `parallel`.
std::array<std::optional<ImaginedScene>, 3> imagine_tri(const Observation& obs,
                                                        const std::array<CameraTrajectory, 3>& trajectories,
                                                        const WorldModel& model, const Intrinsics& k,
                                                        bool parallel = false);

}  // namespace occlunav
