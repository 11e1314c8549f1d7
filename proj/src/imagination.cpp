#include "occlunav/imagination.hpp"

#include <future>

#include "occlunav/error.hpp"
#include "occlunav/rng.hpp"

namespace occlunav {

void OracleConfig::validate() const {
  if (!(scale_min > 0.0) || !(scale_min <= scale_max)) {
    throw Error(Errc::InvalidParams, "oracle scale range must satisfy 0 < min <= max");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw Error(Errc::InvalidParams, "oracle dropout must lie in [0, 1)");
  if (!(position_noise_sigma >= 0.0)) throw Error(Errc::InvalidParams, "oracle noise sigma must be >= 0");
}

std::vector<std::size_t> visible_set(const GaussianScene& hidden, std::span<const Pose> poses, const Intrinsics& k) {
  std::vector<char> seen(hidden.size(), 0);
  for (const Pose& pose : poses) {
    const RenderResult r = render_indexed(hidden, pose, k);
    for (std::int32_t w : r.winners) {
      if (w >= 0) seen[static_cast<std::size_t>(w)] = 1;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i]) out.push_back(i);
  }
  return out;
}

ImaginedScene oracle_imagine(const GaussianScene& hidden, const Observation& obs, const CameraTrajectory& traj,
                             const Intrinsics& k, const OracleConfig& cfg) {
  cfg.validate();
  if (traj.poses.empty()) throw Error(Errc::ImaginationFailed, "empty trajectory");
  if (pose_distance(traj.poses.front(), obs.pose) > 1e-6) {
    throw Error(Errc::ImaginationFailed, "trajectory does not start at the observation pose");
  }

  const std::vector<std::size_t> visible = visible_set(hidden, traj.poses, k);
  if (visible.empty()) throw Error(Errc::EmptyVisibleSet, "no hidden Gaussian is visible along the trajectory");

  Rng rng(cfg.seed);
  // Fixed draw order: dropout and noise per visible Gaussian, then the scale.
  std::vector<Gaussian9> kept;
  kept.reserve(visible.size());
  for (std::size_t idx : visible) {
    const bool drop = rng.uniform() < cfg.dropout;
    Gaussian9 g = hidden.gaussians[idx];
    if (cfg.position_noise_sigma > 0.0) {
      g.position += cfg.position_noise_sigma * Vec3(rng.normal(), rng.normal(), rng.normal());
    }
    if (!drop) kept.push_back(g);
  }
  const double s_true = rng.uniform(cfg.scale_min, cfg.scale_max);
  const double inv_s = 1.0 / s_true;

  // Local frame: origin and axes of the anchor camera, lengths divided by s_true.
  const Pose to_anchor = invert(traj.poses.front());
  GaussianScene local;
  local.frame = Frame::LocalImagined;
  local.metric = false;
  local.gaussians.reserve(kept.size());
  for (Gaussian9 g : kept) {
    g.position = inv_s * apply(to_anchor, g.position);
    g.radius *= inv_s;
    local.gaussians.push_back(g);
  }

  ImaginedScene out;
  out.local_poses.reserve(traj.poses.size());
  for (const Pose& p : traj.poses) {
    Pose lp = compose(to_anchor, p);
    lp.translation *= inv_s;
    out.local_poses.push_back(lp);
  }
  out.local_poses.front() = Pose::identity();

  for (const Pose& lp : out.local_poses) {
    RenderResult r = render(local, lp, k);
    out.rendered_depths.push_back(std::move(r.depth));
    out.rendered_labels.push_back(std::move(r.labels));
  }
  for (auto& g : local.gaussians) g.label = kUnlabeled;
  out.scene = std::move(local);
  return out;
}

OracleConfig OracleWorldModel::config_for(TrajectoryKind kind) const {
  OracleConfig c = cfg_;
  c.seed = derive_seed(cfg_.seed, {static_cast<std::uint64_t>(kind)});
  return c;
}

ImaginedScene OracleWorldModel::imagine(const Observation& obs, const CameraTrajectory& traj,
                                        const Intrinsics& k) const {
  return oracle_imagine(hidden_, obs, traj, k, config_for(traj.kind));
}

WorldModelFactory make_oracle_factory(const OracleConfig& base) {
  return [base](const GaussianScene& hidden, std::uint64_t seed) -> std::unique_ptr<WorldModel> {
    OracleConfig c = base;
    c.seed = derive_seed(base.seed, {seed});
    return std::make_unique<OracleWorldModel>(hidden, c);
  };
}

std::array<std::optional<ImaginedScene>, 3> imagine_tri(const Observation& obs,
                                                        const std::array<CameraTrajectory, 3>& trajectories,
                                                        const WorldModel& model, const Intrinsics& k,
                                                        bool parallel) {
  std::array<std::optional<ImaginedScene>, 3> out;
  auto run_one = [&](std::size_t i) -> std::optional<ImaginedScene> {
    try {
      return model.imagine(obs, trajectories[i], k);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  if (parallel) {
    std::array<std::future<std::optional<ImaginedScene>>, 3> futures;
    for (std::size_t i = 0; i < 3; ++i) futures[i] = std::async(std::launch::async, run_one, i);
    for (std::size_t i = 0; i < 3; ++i) out[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < 3; ++i) out[i] = run_one(i);
  }
  return out;
}

}  // namespace occlunav
