#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "occlunav/episode.hpp"
#include "occlunav/scenario.hpp"

namespace occlunav {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

struct ResultRow {
  int episode_id = 0;
  Scenario scenario = Scenario::StaticOccluded;
  bool success = false;
  int steps = 0;
  double L = 0.0;
  double Lstar = 0.0;
  double spl_term = 0.0;
  double dtg = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kResultsHeader = "episode_id,scenario,success,steps,L,Lstar,spl_term,dtg,seed";

ResultRow make_row(const EpisodeSpec& spec, const EpisodeResult& r);
std::string format_results(const std::vector<ResultRow>& rows);
/// Throws Errc::MalformedRow on a bad row and Errc::EmptyResults when there
/// are no data rows.
std::vector<ResultRow> parse_results(const std::string& text);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;
  int episodes = 1;
  std::string scenario = "all";
  std::vector<std::string> overrides;  // "key=value"
  int jobs = 1;
};

/// Resolves the effective configuration: file, then --seed, then --set.
/// Throws Errc::ConfigError / Errc::IoError.
Config effective_config(const RunOptions& opt);

/// Runs the episodes of one family, `jobs` at a time; results in spec order.
std::vector<EpisodeResult> run_suite(const std::vector<EpisodeSpec>& specs, const Config& cfg, int jobs);

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err);
int cmd_report(const std::filesystem::path& in_dir, std::ostream& out, std::ostream& err);
int cmd_render_map(const std::filesystem::path& snapshot, const std::filesystem::path& out_path, std::ostream& err);

/// P3 raster of a snapshot: m_aff on a 256-step ramp, robot white, waypoint black.
std::string render_map_ppm(const MapSnapshot& snap);
/// Color of ramp step `i` (0..255).
std::array<int, 3> ramp_color(int i);

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace occlunav
