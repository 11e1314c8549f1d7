#include "occlunav/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "occlunav/error.hpp"

namespace occlunav {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
T parse_field(std::string_view s, std::size_t line_no) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(Errc::MalformedRow, "results line " + std::to_string(line_no) + ": bad value '" + std::string(s) + "'");
  }
  return v;
}

std::string episode_stem(const EpisodeSpec& s) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", s.id);
  return std::string(to_string(s.scenario)) + "_" + buf;
}

}  // namespace

ResultRow make_row(const EpisodeSpec& spec, const EpisodeResult& r) {
  ResultRow row;
  row.episode_id = spec.id;
  row.scenario = spec.scenario;
  row.success = r.success;
  row.steps = r.steps;
  row.L = r.path_length;
  row.Lstar = r.shortest_path;
  row.spl_term = spl_term(r.success, r.path_length, r.shortest_path);
  row.dtg = r.dtg;
  row.seed = spec.seed;
  return row;
}

std::string format_results(const std::vector<ResultRow>& rows) {
  std::string s = std::string(kResultsHeader) + '\n';
  for (const auto& r : rows) {
    s += std::to_string(r.episode_id) + ',' + std::string(to_string(r.scenario)) + ',' + (r.success ? "1" : "0") + ',' +
         std::to_string(r.steps) + ',' + fmt(r.L) + ',' + fmt(r.Lstar) + ',' + fmt(r.spl_term) + ',' + fmt(r.dtg) +
         ',' + std::to_string(r.seed) + '\n';
  }
  return s;
}

std::vector<ResultRow> parse_results(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  std::vector<ResultRow> rows;
  bool header = false;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != kResultsHeader) throw Error(Errc::MalformedRow, "results.csv: unexpected header");
      header = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::string_view rest = line;
    for (;;) {
      const auto c = rest.find(',');
      f.push_back(rest.substr(0, c));
      if (c == std::string_view::npos) break;
      rest.remove_prefix(c + 1);
    }
    if (f.size() != 9) throw Error(Errc::MalformedRow, "results line " + std::to_string(n) + ": expected 9 fields");
    ResultRow r;
    r.episode_id = parse_field<int>(f[0], n);
    const auto sc = scenario_from_string(f[1]);
    if (!sc) throw Error(Errc::MalformedRow, "results line " + std::to_string(n) + ": unknown scenario");
    r.scenario = *sc;
    const int ok = parse_field<int>(f[2], n);
    if (ok != 0 && ok != 1) throw Error(Errc::MalformedRow, "results line " + std::to_string(n) + ": success must be 0/1");
    r.success = ok == 1;
    r.steps = parse_field<int>(f[3], n);
    r.L = parse_field<double>(f[4], n);
    r.Lstar = parse_field<double>(f[5], n);
    r.spl_term = parse_field<double>(f[6], n);
    r.dtg = parse_field<double>(f[7], n);
    r.seed = parse_field<std::uint64_t>(f[8], n);
    rows.push_back(r);
  }
  if (rows.empty()) throw Error(Errc::EmptyResults, "results.csv has no data rows");
  return rows;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(Errc::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(Errc::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

Config effective_config(const RunOptions& opt) {
  Config cfg = opt.config.empty() ? Config{} : load_config(opt.config);
  if (opt.seed) cfg.seed = *opt.seed;
  for (const auto& kv : opt.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(Errc::ConfigError, "--set expects key=value, got '" + kv + "'");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    set_config_value(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

std::vector<EpisodeResult> run_suite(const std::vector<EpisodeSpec>& specs, const Config& cfg, int jobs) {
  std::optional<WorldModelFactory> factory;
  if (cfg.world_model == "oracle") factory = make_oracle_factory(cfg.oracle());
  const WorldModelFactory* fp = factory ? &*factory : nullptr;

  std::vector<EpisodeResult> results(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        results[i] = run_episode(specs[i], fp, cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, specs.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  Config cfg;
  try {
    cfg = effective_config(opt);
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return e.code() == Errc::IoError ? kExitIo : kExitConfig;
  }
  std::vector<Scenario> families;
  if (opt.scenario == "all") {
    families = {Scenario::StaticOccluded, Scenario::DynamicTarget, Scenario::SuddenObstacle};
  } else if (const auto s = scenario_from_string(opt.scenario)) {
    families = {*s};
  } else {
    err << "config error: unknown scenario '" << opt.scenario << "'\n";
    return kExitConfig;
  }
  if (opt.episodes < 1) {
    err << "config error: --episodes must be >= 1\n";
    return kExitConfig;
  }

  try {
    fs::create_directories(opt.out / "traces");
    fs::create_directories(opt.out / "snapshots");
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }

  std::vector<ResultRow> rows;
  try {
    for (Scenario family : families) {
      const auto specs = generate_scene_suite(family, opt.episodes, cfg.seed, cfg);
      const auto results = run_suite(specs, cfg, opt.jobs);
      for (std::size_t i = 0; i < specs.size(); ++i) {
        const std::string stem = episode_stem(specs[i]);
        std::string trace;
        for (const auto& rec : results[i].trace) trace += format_trace_line(rec) + '\n';
        write_file_atomic(opt.out / "traces" / (stem + ".trace"), trace);
        if (results[i].snapshot) {
          std::ostringstream snap;
          write_snapshot(snap, *results[i].snapshot);
          write_file_atomic(opt.out / "snapshots" / (stem + ".csv"), snap.str());
        }
        rows.push_back(make_row(specs[i], results[i]));
      }
      out << to_string(family) << ": " << specs.size() << " episodes done\n";
    }
    write_file_atomic(opt.out / "effective_config.txt", dump_config(cfg));
    write_file_atomic(opt.out / "results.csv", format_results(rows));
  } catch (const Error& e) {
    err << (e.code() == Errc::IoError ? "i/o error: " : "error: ") << e.what() << '\n';
    return e.code() == Errc::IoError ? kExitIo : kExitFailure;
  }
  return kExitOk;
}

int cmd_report(const fs::path& in_dir, std::ostream& out, std::ostream& err) {
  std::vector<ResultRow> rows;
  try {
    rows = parse_results(read_file(in_dir / "results.csv"));
  } catch (const Error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
  std::map<Scenario, std::vector<EpisodeResult>> groups;
  std::vector<EpisodeResult> all;
  for (const auto& r : rows) {
    EpisodeResult e;
    e.success = r.success;
    e.steps = r.steps;
    e.path_length = r.L;
    e.shortest_path = r.Lstar;
    e.dtg = r.dtg;
    groups[r.scenario].push_back(e);
    all.push_back(e);
  }
  auto line = [&](std::string_view name, const std::vector<EpisodeResult>& rs) {
    const Metrics m = metrics(rs);
    out << std::left << std::setw(10) << name << std::right << std::setw(9) << rs.size() << std::fixed
        << std::setprecision(6) << std::setw(11) << m.sr << std::setw(11) << m.spl << std::setw(11) << m.dtg << '\n';
  };
  out << std::left << std::setw(10) << "scenario" << std::right << std::setw(9) << "episodes" << std::setw(11) << "SR"
      << std::setw(11) << "SPL" << std::setw(11) << "DTG" << '\n';
  for (const auto& [s, rs] : groups) line(to_string(s), rs);
  line("overall", all);
  return kExitOk;
}

std::array<int, 3> ramp_color(int i) {
  i = std::clamp(i, 0, 255);
  return {i, 255 - std::abs(2 * i - 255), 255 - i};
}

std::string render_map_ppm(const MapSnapshot& snap) {
  const auto& f = snap.field;
  double lo_x = snap.robot.x(), hi_x = snap.robot.x(), lo_y = snap.robot.y(), hi_y = snap.robot.y();
  double vmin = 0.0, vmax = 0.0;
  for (std::size_t i = 0; i < f.positions.size(); ++i) {
    lo_x = std::min(lo_x, f.positions[i].x());
    hi_x = std::max(hi_x, f.positions[i].x());
    lo_y = std::min(lo_y, f.positions[i].y());
    hi_y = std::max(hi_y, f.positions[i].y());
    vmin = i == 0 ? f.m_aff[i] : std::min(vmin, f.m_aff[i]);
    vmax = i == 0 ? f.m_aff[i] : std::max(vmax, f.m_aff[i]);
  }
  const double c = snap.cell;
  const double ox = std::floor(lo_x / c) * c, oy = std::floor(lo_y / c) * c;
  const int w = static_cast<int>(std::floor((hi_x - ox) / c)) + 1;
  const int h = static_cast<int>(std::floor((hi_y - oy) / c)) + 1;
  auto cell_of = [&](const Vec3& p) {
    const int x = std::clamp(static_cast<int>(std::floor((p.x() - ox) / c)), 0, w - 1);
    const int y = std::clamp(static_cast<int>(std::floor((p.y() - oy) / c)), 0, h - 1);
    return static_cast<std::size_t>(y) * w + x;
  };
  std::vector<int> level(static_cast<std::size_t>(w) * h, 0);
  const double span = vmax - vmin;
  for (std::size_t i = 0; i < f.positions.size(); ++i) {
    const double t = span > 0.0 ? (f.m_aff[i] - vmin) / span : 0.0;
    auto& l = level[cell_of(f.positions[i])];
    l = std::max(l, std::clamp(static_cast<int>(std::floor(t * 255.0 + 0.5)), 0, 255));
  }
  std::vector<std::array<int, 3>> px(level.size());
  for (std::size_t i = 0; i < level.size(); ++i) px[i] = ramp_color(level[i]);
  px[cell_of(snap.robot)] = {255, 255, 255};
  if (!f.positions.empty()) px[cell_of(f.positions[f.selected])] = {0, 0, 0};

  std::string s = "P3\n" + std::to_string(w) + ' ' + std::to_string(h) + "\n255\n";
  for (int y = h - 1; y >= 0; --y) {
    for (int x = 0; x < w; ++x) {
      const auto& p = px[static_cast<std::size_t>(y) * w + x];
      if (x) s += ' ';
      s += std::to_string(p[0]) + ' ' + std::to_string(p[1]) + ' ' + std::to_string(p[2]);
    }
    s += '\n';
  }
  return s;
}

int cmd_render_map(const fs::path& snapshot, const fs::path& out_path, std::ostream& err) {
  try {
    std::istringstream in(read_file(snapshot));
    write_file_atomic(out_path, render_map_ppm(read_snapshot(in)));
  } catch (const Error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Occlusion-aware object navigation simulator"};
  app.require_subcommand(1);

  RunOptions run;
  std::uint64_t seed = 0;
  auto* run_cmd = app.add_subcommand("run", "Run episode suites and write results");
  run_cmd->add_option("--config", run.config, "Config file (key = value lines)")->required();
  run_cmd->add_option("--out", run.out, "Output directory");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Base seed (overrides the config)");
  run_cmd->add_option("--episodes", run.episodes, "Episodes per scenario");
  run_cmd->add_option("--scenario", run.scenario, "static, dynamic, sudden or all");
  run_cmd->add_option("--set", run.overrides, "Override a config key (key=value)");
  run_cmd->add_option("--jobs", run.jobs, "Parallel episodes");

  fs::path report_in;
  auto* report_cmd = app.add_subcommand("report", "Summarize results.csv");
  report_cmd->add_option("--in", report_in, "Run output directory")->required();

  fs::path snap_in, ppm_out;
  auto* map_cmd = app.add_subcommand("render-map", "Render an affordance snapshot as PPM");
  map_cmd->add_option("--snapshot", snap_in, "Snapshot file")->required();
  map_cmd->add_option("--out", ppm_out, "Output .ppm")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }
  if (*seed_opt) run.seed = seed;

  if (*run_cmd) return cmd_run(run, out, err);
  if (*report_cmd) return cmd_report(report_in, out, err);
  return cmd_render_map(snap_in, ppm_out, err);
}

}  // namespace occlunav
