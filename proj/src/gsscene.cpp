#include "occlunav/gsscene.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "occlunav/error.hpp"
#include "voxel.hpp"

namespace occlunav {

void validate(const Gaussian9& g) {
  if (!g.position.allFinite()) throw Error(Errc::ConstraintViolation, "non-finite position");
  if (!(g.radius > 0.0) || !std::isfinite(g.radius)) throw Error(Errc::ConstraintViolation, "rad must be > 0");
  if (!(g.opacity >= 0.0 && g.opacity <= 1.0)) throw Error(Errc::ConstraintViolation, "opa must lie in [0, 1]");
  for (int c = 0; c < 3; ++c) {
    if (!(g.color[c] >= 0.0 && g.color[c] <= 1.0)) throw Error(Errc::ConstraintViolation, "color must lie in [0, 1]");
  }
}

// --- CSV -------------------------------------------------------------------

namespace {

void append_double(std::string& out, double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), end);
}

double parse_double(std::string_view field) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw Error(Errc::MalformedRow, "unparsable number '" + std::string(field) + "'");
  }
  return v;
}

Label parse_label(std::string_view field) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty() ||
      v > std::numeric_limits<Label>::max()) {
    throw Error(Errc::MalformedRow, "label must be a non-negative integer, got '" + std::string(field) + "'");
  }
  return static_cast<Label>(v);
}

}  // namespace

Gaussian9 parse_csv_row(const std::string& line) {
  std::array<std::string_view, 9> fields;
  std::size_t count = 0;
  std::size_t start = 0;
  std::string_view sv(line);
  if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
  while (true) {
    const std::size_t comma = sv.find(',', start);
    const std::string_view f = sv.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (count < fields.size()) fields[count] = f;
    ++count;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (count != 9) {
    throw Error(Errc::MalformedRow, "expected 9 columns, got " + std::to_string(count));
  }
  Gaussian9 g;
  g.position = {parse_double(fields[0]), parse_double(fields[1]), parse_double(fields[2])};
  g.color = {parse_double(fields[3]), parse_double(fields[4]), parse_double(fields[5])};
  g.radius = parse_double(fields[6]);
  g.opacity = parse_double(fields[7]);
  g.label = parse_label(fields[8]);
  validate(g);
  return g;
}

void write_csv(std::ostream& out, const GaussianScene& scene) {
  std::string buf;
  buf.reserve(64 * (scene.size() + 1));
  buf += kSceneCsvHeader;
  buf += '\n';
  for (const auto& g : scene.gaussians) {
    const std::array<double, 8> v{g.position.x(), g.position.y(), g.position.z(), g.color.x(),
                                  g.color.y(),    g.color.z(),    g.radius,       g.opacity};
    for (double x : v) {
      append_double(buf, x);
      buf += ',';
    }
    buf += std::to_string(g.label);
    buf += '\n';
  }
  out << buf;
}

GaussianScene read_csv(std::istream& in) {
  GaussianScene scene;
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::MalformedRow, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSceneCsvHeader) throw Error(Errc::MalformedRow, "unexpected header '" + line + "'");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    try {
      scene.gaussians.push_back(parse_csv_row(line));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return scene;
}

void save_csv(const GaussianScene& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  write_csv(out, scene);
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

GaussianScene load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return read_csv(in);
}

// --- transforms ------------------------------------------------------------

GaussianScene transform_scene(const GaussianScene& scene, const Pose& t, double s) {
  if (!(s > 0.0)) throw Error(Errc::NonPositiveScale, "scale must be positive");
  GaussianScene out = scene;
  for (auto& g : out.gaussians) {
    g.position = t.rotation * (s * g.position) + t.translation;
    g.radius *= s;
  }
  return out;
}

// --- rendering -------------------------------------------------------------

namespace {

RenderResult render_impl(const GaussianScene& scene, const Pose& camera_pose, const Intrinsics& k, bool with_index,
                         bool with_color) {
  const int w = k.width;
  const int h = k.height;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  RenderResult out;
  out.depth = DepthImage(w, h, kInf);
  out.labels = LabelImage(w, h, kUnlabeled);
  if (with_color) out.rgb = RgbImage(w, h, 0);
  std::vector<std::int32_t> winners(static_cast<std::size_t>(w) * h, -1);

  const Mat3 rt = camera_pose.rotation.transpose();
  const Vec3 tt = rt * camera_pose.translation;

  for (std::size_t gi = 0; gi < scene.gaussians.size(); ++gi) {
    const Gaussian9& g = scene.gaussians[gi];
    if (g.opacity < kOpacityThreshold) continue;
    const Vec3 pc = rt * g.position - tt;
    const double z = pc.z();
    if (!(z > 0.0)) continue;
    const double pu = k.fx * pc.x() / z + k.cx;
    const double pv = k.fy * pc.y() / z + k.cy;
    const double rho = std::max(1.0, k.fx * g.radius / z);
    const double rho2 = rho * rho;
    const double u_lo = std::ceil(pu - rho), u_hi = std::floor(pu + rho);
    const double v_lo = std::ceil(pv - rho), v_hi = std::floor(pv + rho);
    if (u_hi < 0.0 || v_hi < 0.0 || u_lo > w - 1 || v_lo > h - 1) continue;
    const int u0 = static_cast<int>(std::max(0.0, u_lo));
    const int u1 = static_cast<int>(std::min<double>(w - 1, u_hi));
    const int v0 = static_cast<int>(std::max(0.0, v_lo));
    const int v1 = static_cast<int>(std::min<double>(h - 1, v_hi));
    for (int v = v0; v <= v1; ++v) {
      const double dv = v - pv;
      const double dv2 = dv * dv;
      if (dv2 > rho2) continue;
      for (int u = u0; u <= u1; ++u) {
        const double du = u - pu;
        if (du * du + dv2 > rho2) continue;
        const std::size_t idx = static_cast<std::size_t>(v) * w + u;
        if (z < out.depth.data[idx]) {
          out.depth.data[idx] = z;
          winners[idx] = static_cast<std::int32_t>(gi);
        }
      }
    }
  }

  for (std::size_t idx = 0; idx < winners.size(); ++idx) {
    const std::int32_t gi = winners[idx];
    if (gi < 0) {
      out.depth.data[idx] = 0.0;
      continue;
    }
    const Gaussian9& g = scene.gaussians[static_cast<std::size_t>(gi)];
    out.labels.data[idx] = g.label;
    if (with_color) {
      for (int c = 0; c < 3; ++c) {
        out.rgb.data[idx * 3 + c] = static_cast<std::uint8_t>(std::lround(std::clamp(g.color[c], 0.0, 1.0) * 255.0));
      }
    }
  }
  if (with_index) out.winners = std::move(winners);
  return out;
}

}  // namespace

RenderResult render(const GaussianScene& scene, const Pose& camera_pose, const Intrinsics& k) {
  return render_impl(scene, camera_pose, k, false, true);
}

RenderResult render_indexed(const GaussianScene& scene, const Pose& camera_pose, const Intrinsics& k) {
  return render_impl(scene, camera_pose, k, true, true);
}

DepthImage render_depth(const GaussianScene& scene, const Pose& camera_pose, const Intrinsics& k) {
  return render_impl(scene, camera_pose, k, false, false).depth;
}

// --- merge / downsample ----------------------------------------------------

TaggedMerge merge_scenes_tagged(std::span<const GaussianScene> scenes, double eps_merge) {
  if (!(eps_merge > 0.0)) throw Error(Errc::NonPositiveVoxel, "eps_merge must be positive");
  std::size_t total = 0;
  for (const auto& s : scenes) {
    if (s.frame != Frame::World || !s.metric) {
      throw Error(Errc::FrameMismatch, "merge_scenes requires World-frame metric scenes");
    }
    total += s.size();
  }
  TaggedMerge out;
  out.scene.frame = Frame::World;
  out.scene.metric = true;
  out.scene.gaussians.reserve(total);
  out.source.reserve(total);
  std::unordered_set<detail::VoxelKey, detail::VoxelKeyHash> seen;
  seen.reserve(total);
  for (std::size_t si = 0; si < scenes.size(); ++si) {
    for (const auto& g : scenes[si].gaussians) {
      if (seen.insert(detail::voxel_of(g.position, eps_merge)).second) {
        out.scene.gaussians.push_back(g);
        out.source.push_back(static_cast<std::uint32_t>(si));
      }
    }
  }
  return out;
}

GaussianScene merge_scenes(std::span<const GaussianScene> scenes, double eps_merge) {
  return merge_scenes_tagged(scenes, eps_merge).scene;
}

GaussianScene downsample(const GaussianScene& scene, double voxel) {
  if (!(voxel > 0.0)) throw Error(Errc::NonPositiveVoxel, "voxel must be positive");
  GaussianScene out;
  out.frame = scene.frame;
  out.metric = scene.metric;
  std::unordered_set<detail::VoxelKey, detail::VoxelKeyHash> seen;
  seen.reserve(scene.size());
  for (const auto& g : scene.gaussians) {
    if (seen.insert(detail::voxel_of(g.position, voxel)).second) out.gaussians.push_back(g);
  }
  return out;
}

}  // namespace occlunav
