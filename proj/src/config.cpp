#include "occlunav/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <variant>

#include "occlunav/error.hpp"

namespace occlunav {

namespace {

using Member = std::variant<double Config::*, int Config::*, std::uint64_t Config::*, std::string Config::*>;

struct Field {
  std::string_view key;
  Member member;
};

const std::array<Field, 30>& fields() {
  static const std::array<Field, 30> table{{
      {"alpha_sem", &Config::alpha_sem},
      {"alpha_exp", &Config::alpha_exp},
      {"beta", &Config::beta},
      {"lambda_sem", &Config::lambda_sem},
      {"r_vis", &Config::r_vis},
      {"sigma_s", &Config::sigma_s},
      {"sigma_t", &Config::sigma_t},
      {"tau_d", &Config::tau_d},
      {"n_cameras", &Config::n_cameras},
      {"d_c", &Config::d_c},
      {"d_v", &Config::d_v},
      {"eps_merge", &Config::eps_merge},
      {"eps_match", &Config::eps_match},
      {"max_candidates", &Config::max_candidates},
      {"camera.width", &Config::camera_width},
      {"camera.height", &Config::camera_height},
      {"camera.hfov_deg", &Config::camera_hfov_deg},
      {"camera.mount_height", &Config::camera_mount_height},
      {"grid_cell", &Config::grid_cell},
      {"robot_radius", &Config::robot_radius},
      {"step_len", &Config::step_len},
      {"k_move", &Config::k_move},
      {"max_steps", &Config::max_steps},
      {"success_dist", &Config::success_dist},
      {"world_model", &Config::world_model},
      {"oracle.scale_min", &Config::oracle_scale_min},
      {"oracle.scale_max", &Config::oracle_scale_max},
      {"oracle.dropout", &Config::oracle_dropout},
      {"oracle.noise", &Config::oracle_noise},
      {"seed", &Config::seed},
  }};
  return table;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw Error(Errc::ConfigError, "invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
  }
  return out;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

}  // namespace

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = [] {
    std::vector<std::string_view> k;
    for (const Field& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void set_config_value(Config& cfg, std::string_view key, std::string_view value) {
  for (const Field& f : fields()) {
    if (f.key != key) continue;
    std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<T, std::string>) {
            cfg.*member = std::string(value);
          } else {
            cfg.*member = parse_number<T>(key, value);
          }
        },
        f.member);
    return;
  }
  throw Error(Errc::ConfigError, "unknown config key '" + std::string(key) + "'");
}

Config parse_config(std::string_view text, Config base) {
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::ConfigError, "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    try {
      set_config_value(base, key, value);
    } catch (const Error& e) {
      throw Error(Errc::ConfigError, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  base.validate();
  return base;
}

Config load_config(const std::filesystem::path& path, Config base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string dump_config(const Config& cfg) {
  std::string out;
  for (const Field& f : fields()) {
    out += f.key;
    out += " = ";
    std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<T, std::string>) {
            out += cfg.*member;
          } else if constexpr (std::is_same_v<T, double>) {
            out += format_double(cfg.*member);
          } else {
            out += std::to_string(cfg.*member);
          }
        },
        f.member);
    out += '\n';
  }
  return out;
}

ValueWeights Config::weights() const {
  return {alpha_sem, alpha_exp, beta, lambda_sem, r_vis, sigma_s, sigma_t};
}

OracleConfig Config::oracle() const {
  return {oracle_scale_min, oracle_scale_max, oracle_dropout, oracle_noise, seed};
}

Intrinsics Config::intrinsics() const { return intrinsics_from_hfov(camera_width, camera_height, camera_hfov_deg); }

TrajectoryParams Config::trajectory_params() const { return {intrinsics(), n_cameras, d_c, d_v}; }

void Config::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::ConfigError, msg); };
  try {
    weights().validate();
    intrinsics().validate();
    trajectory_params().validate();
    oracle().validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  if (!(tau_d > 0.0)) fail("tau_d must be positive");
  if (!(eps_merge > 0.0) || !(eps_match >= 0.0)) fail("eps_merge must be positive, eps_match non-negative");
  if (max_candidates < 1) fail("max_candidates must be >= 1");
  if (!(camera_mount_height > 0.0)) fail("camera.mount_height must be positive");
  if (!(grid_cell > 0.0) || !(robot_radius > 0.0) || !(step_len > 0.0)) {
    fail("grid_cell, robot_radius and step_len must be positive");
  }
  if (k_move < 1) fail("k_move must be >= 1");
  if (max_steps < 0) fail("max_steps must be >= 0");
  if (!(success_dist > 0.0)) fail("success_dist must be positive");
  if (world_model != "oracle" && world_model != "none") fail("world_model must be 'oracle' or 'none'");
}

}  // namespace occlunav
