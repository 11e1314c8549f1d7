#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "occlunav/geometry.hpp"
#include "occlunav/grounding.hpp"
#include "occlunav/imagination.hpp"
#include "occlunav/trajectory.hpp"
#include "occlunav/valuemap.hpp"

namespace occlunav {

/// Every tunable of the pipeline and simulator.
struct Config {
  // value maps
  double alpha_sem = 0.5;
  double alpha_exp = 0.5;
  double beta = 0.5;
  double lambda_sem = 0.5;
  double r_vis = 0.6;
  double sigma_s = 1.0;
  double sigma_t = 1.0;
  // grounding
  double tau_d = 0.1;
  // trajectories
  int n_cameras = 24;
  double d_c = 2.0;
  double d_v = kPi;  // d_c * pi / 2
  // map fusion
  double eps_merge = 0.1;
  double eps_match = 0.1;
  int max_candidates = 20000;
  // camera
  int camera_width = 300;
  int camera_height = 300;
  double camera_hfov_deg = 90.0;
  double camera_mount_height = 0.5;
  // robot and planner
  double grid_cell = 0.1;
  double robot_radius = 0.3;
  double step_len = 0.25;
  int k_move = 5;
  int max_steps = 500;
  double success_dist = 0.5;
  // imagination backend: "oracle" or "none"
  std::string world_model = "oracle";
  double oracle_scale_min = 0.5;
  double oracle_scale_max = 2.0;
  double oracle_dropout = 0.0;
  double oracle_noise = 0.0;
  std::uint64_t seed = 0;

  ValueWeights weights() const;
  GroundingConfig grounding() const { return {tau_d}; }
  OracleConfig oracle() const;
  Intrinsics intrinsics() const;
  TrajectoryParams trajectory_params() const;

  /// Throws Errc::ConfigError on out-of-range values.
  void validate() const;

  bool operator==(const Config&) const = default;
};

/// Names of every accepted key, in dump order.
const std::vector<std::string_view>& config_keys();

/// Sets one key from its textual value. Throws Errc::ConfigError naming the
/// key when it is unknown or the value does not parse.
void set_config_value(Config& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines; '#' starts a comment; blank lines ignored.
/// Errors carry the 1-based line number. Keys not given keep their defaults.
Config parse_config(std::string_view text, Config base = {});
Config load_config(const std::filesystem::path& path, Config base = {});

/// Effective configuration as `key = value` lines, loadable by parse_config.
std::string dump_config(const Config& cfg);

}  // namespace occlunav
