#include "occlunav/episode.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "occlunav/error.hpp"
#include "occlunav/grounding.hpp"
#include "occlunav/rng.hpp"
#include "occlunav/semantics.hpp"
#include "occlunav/spatial_index.hpp"
#include "occlunav/trajectory.hpp"
#include "voxel.hpp"

namespace occlunav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAnchorRange = 3.0;
constexpr double kAnchorCone = 30.0 * kPi / 180.0;
constexpr double kApproachRange = 1.5;
constexpr double kBodyRadius = 0.15;
constexpr double kBumpRadius = 0.5;
constexpr double kFrontierCell = 0.2;
constexpr double kCarveMargin = 0.15;

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Vec3 flat(const Vec3& p) { return {p.x(), p.y(), 0.0}; }

double planar(const Vec3& a, const Vec3& b) { return std::hypot(a.x() - b.x(), a.y() - b.y()); }

bool contains_label(const LabelImage& img, Label label) {
  return std::find(img.data.begin(), img.data.end(), label) != img.data.end();
}

Pose scaled_pose(Pose p, double s) {
  p.translation *= s;
  return p;
}

DepthImage scaled_depth(DepthImage d, double s) {
  for (double& v : d.data) {
    if (v > 0.0) v *= s;
  }
  return d;
}

// Hidden obstacles as a flat point index, used for contact checks.
struct ContactSensor {
  std::vector<std::size_t> ids;
  SpatialIndex index;

  explicit ContactSensor(const GaussianScene& hidden) {
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < hidden.gaussians.size(); ++i) {
      if (!is_obstacle(hidden.gaussians[i])) continue;
      ids.push_back(i);
      pts.push_back(flat(hidden.gaussians[i].position));
    }
    index = SpatialIndex(pts, 0.5);
  }

  bool touches(const Vec3& p) const { return index.count_within(flat(p), kBodyRadius) > 0; }
};

}  // namespace

SensorFrame sense(const GaussianScene& hidden, const Pose& camera_pose, const Intrinsics& k) {
  RenderResult r = render(hidden, camera_pose, k);
  SensorFrame f;
  f.obs.rgb = std::move(r.rgb);
  f.obs.depth = std::move(r.depth);
  f.obs.pose = camera_pose;
  f.labels = std::move(r.labels);
  return f;
}

std::string format_trace_line(const TraceRecord& r) {
  const Eigen::Quaterniond q = r.pose.quaternion();
  std::string s = std::to_string(r.step);
  for (double v : {q.w(), q.x(), q.y(), q.z(), r.pose.translation.x(), r.pose.translation.y(), r.pose.translation.z()}) {
    s += ',' + fmt(v);
  }
  s += ',' + std::to_string(r.waypoint_index);
  for (double v : {r.waypoint.x(), r.waypoint.y(), r.waypoint.z()}) s += ',' + fmt(v);
  s += ',' + std::to_string(r.n_nav) + ',' + std::to_string(r.n_sem) + ',' + std::to_string(r.n_hyp);
  s += ',' + fmt(r.score);
  return s;
}

// --- snapshots ---------------------------------------------------------------

void write_snapshot(std::ostream& out, const MapSnapshot& snap) {
  const auto& f = snap.field;
  out << "occlunav-snapshot 1\n";
  out << "robot," << fmt(snap.robot.x()) << ',' << fmt(snap.robot.y()) << ',' << fmt(snap.robot.z()) << '\n';
  out << "cell," << fmt(snap.cell) << '\n';
  out << "selected," << f.selected << '\n';
  out << "x,y,z,m,m_fa,m_aff\n";
  for (std::size_t i = 0; i < f.positions.size(); ++i) {
    const Vec3& p = f.positions[i];
    out << fmt(p.x()) << ',' << fmt(p.y()) << ',' << fmt(p.z()) << ',' << fmt(f.m[i]) << ',' << fmt(f.m_fa[i]) << ','
        << fmt(f.m_aff[i]) << '\n';
  }
}

namespace {

std::vector<double> parse_numbers(const std::string& line, std::size_t expected, std::size_t line_no) {
  std::vector<double> v;
  const char* p = line.data();
  const char* end = line.data() + line.size();
  while (p <= end) {
    const char* comma = std::find(p, end, ',');
    double x = 0.0;
    const auto res = std::from_chars(p, comma, x);
    if (res.ec != std::errc() || res.ptr != comma) {
      throw Error(Errc::MalformedRow, "snapshot line " + std::to_string(line_no) + ": bad number");
    }
    v.push_back(x);
    if (comma == end) break;
    p = comma + 1;
  }
  if (v.size() != expected) {
    throw Error(Errc::MalformedRow, "snapshot line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(expected) + " fields");
  }
  return v;
}

std::string after_tag(const std::string& line, std::string_view tag, std::size_t line_no) {
  if (line.rfind(tag, 0) != 0 || line.size() <= tag.size() || line[tag.size()] != ',') {
    throw Error(Errc::MalformedRow, "snapshot line " + std::to_string(line_no) + ": expected '" + std::string(tag) + "'");
  }
  return line.substr(tag.size() + 1);
}

}  // namespace

MapSnapshot read_snapshot(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  auto next = [&]() {
    if (!std::getline(in, line)) throw Error(Errc::MalformedRow, "snapshot truncated");
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  if (next() != "occlunav-snapshot 1") throw Error(Errc::MalformedRow, "not a snapshot file");
  MapSnapshot s;
  const auto r = parse_numbers(after_tag(next(), "robot", n), 3, n);
  s.robot = {r[0], r[1], r[2]};
  s.cell = parse_numbers(after_tag(next(), "cell", n), 1, n)[0];
  if (!(s.cell > 0.0)) throw Error(Errc::MalformedRow, "snapshot cell must be positive");
  const double sel = parse_numbers(after_tag(next(), "selected", n), 1, n)[0];
  if (next() != "x,y,z,m,m_fa,m_aff") throw Error(Errc::MalformedRow, "snapshot header missing");
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto v = parse_numbers(line, 6, n);
    s.field.positions.emplace_back(v[0], v[1], v[2]);
    s.field.m.push_back(v[3]);
    s.field.m_fa.push_back(v[4]);
    s.field.m_aff.push_back(v[5]);
  }
  if (!(sel >= 0.0) || static_cast<std::size_t>(sel) >= std::max<std::size_t>(1, s.field.positions.size())) {
    throw Error(Errc::MalformedRow, "snapshot selected index out of range");
  }
  s.field.selected = static_cast<std::size_t>(sel);
  return s;
}

// --- navigator ---------------------------------------------------------------

LandmarkCommand landmark_stub(const EpisodeSpec& spec, const NavigationState& state, const ValueWeights& w) {
  LandmarkCommand cmd;
  cmd.landmark = spec.target_label;
  cmd.preferred_direction = state.last_motion_dir;
  const auto& t = state.targets;
  if (t.t_real.empty() && t.t_hyp.empty()) return cmd;

  Vec3 goal = Vec3::Zero();
  bool have_goal = false;
  if (!t.t_real.empty()) {
    double best = kInf;
    for (const Vec3& p : t.t_real) {
      const double d = planar(p, state.robot);
      if (d < best) {
        best = d;
        goal = p;
      }
    }
    have_goal = best <= kApproachRange;
  }
  if (!have_goal && !state.nav.empty()) {
    const auto& pos = state.nav.positions();
    std::size_t best = 0;
    double best_s = -kInf;
    double best_d = kInf;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      const double s = semantic_score(pos[i], t, w);
      const double d = (pos[i] - state.robot).norm();
      if (s > best_s || (s == best_s && d < best_d)) {
        best = i;
        best_s = s;
        best_d = d;
      }
    }
    goal = pos[best];
    have_goal = true;
  }
  if (!have_goal) return cmd;
  const Vec3 dir = flat(goal - state.robot);
  if (dir.norm() > 1e-9) cmd.preferred_direction = dir.normalized();
  return cmd;
}

double anchor_yaw(const NavigationState& state, const Vec3& preferred) {
  const Vec3 pref = flat(preferred).normalized();
  const double pref_yaw = std::atan2(pref.y(), pref.x());
  if (!state.has_grid) return pref_yaw;
  const OccupancyGrid& g = state.grid;
  double best = kInf;
  Vec3 pick = Vec3::Zero();
  for (int i = 0; i < static_cast<int>(g.size()); ++i) {
    if (g.state(i) != CellState::Occupied) continue;
    const Vec3 d = flat(g.center(i) - state.robot);
    const double r = d.norm();
    if (r < 1e-9 || r > kAnchorRange || r >= best) continue;
    if (std::acos(std::clamp(d.dot(pref) / r, -1.0, 1.0)) > kAnchorCone) continue;
    best = r;
    pick = d;
  }
  return std::isfinite(best) ? std::atan2(pick.y(), pick.x()) : pref_yaw;
}

void integrate_observation(GaussianScene& observed, const SensorFrame& frame, const Intrinsics& k, double eps) {
  const Pose& pose = frame.obs.pose;
  const Pose inv = invert(pose);
  const DepthImage& depth = frame.obs.depth;

  GaussianScene kept;
  kept.gaussians.reserve(observed.gaussians.size());
  for (const auto& g : observed.gaussians) {
    // Only object points can go stale: everything else in the worlds is static.
    if (g.label < kFirstObjectLabel) {
      kept.gaussians.push_back(g);
      continue;
    }
    const Vec3 pc = apply(inv, g.position);
    if (pc.z() <= 1e-6) {
      kept.gaussians.push_back(g);
      continue;
    }
    const Vec2 uv = project(pc, k);
    const int u = static_cast<int>(std::floor(uv.x() + 0.5));
    const int v = static_cast<int>(std::floor(uv.y() + 0.5));
    if (!depth.in_bounds(u, v)) {
      kept.gaussians.push_back(g);
      continue;
    }
    const double d = depth.at(u, v);
    if (d > 0.0 && d <= pc.z() + kCarveMargin) kept.gaussians.push_back(g);
  }

  GaussianScene fresh;
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const double d = depth.at(u, v);
      if (!(d > 0.0)) continue;
      Gaussian9 g;
      g.position = apply(pose, unproject(u, v, d, k));
      g.color = Vec3(frame.obs.rgb.at(u, v, 0), frame.obs.rgb.at(u, v, 1), frame.obs.rgb.at(u, v, 2)) / 255.0;
      g.radius = 0.5 * eps;
      g.opacity = 1.0;
      g.label = frame.labels.at(u, v);
      fresh.gaussians.push_back(g);
    }
  }
  const GaussianScene parts[2] = {std::move(kept), downsample(fresh, eps)};
  observed = merge_scenes(parts, eps);
}

std::vector<std::size_t> navigable_indices(const GaussianScene& scene, double radius) {
  std::vector<Vec3> obstacles;
  for (const auto& g : scene.gaussians) {
    if (is_obstacle(g)) obstacles.push_back(flat(g.position));
  }
  const SpatialIndex index(obstacles, std::max(radius, 0.05));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < scene.gaussians.size(); ++i) {
    const auto& g = scene.gaussians[i];
    if (is_floor(g) && index.count_within(flat(g.position), radius) == 0) out.push_back(i);
  }
  return out;
}

namespace {

class Navigator {
 public:
  Navigator(const EpisodeSpec& spec, const WorldModelFactory* factory, const Config& cfg)
      : spec_(spec), factory_(factory), cfg_(cfg), k_(cfg.intrinsics()), w_(cfg.weights()), hidden_(spec.hidden_scene) {
    const Vec3 f = spec.start_pose.forward();
    st_.robot = flat(spec.start_pose.translation);
    st_.yaw = std::atan2(f.y(), f.x());
    const Vec3 ff = flat(f);
    st_.last_motion_dir = ff.norm() > 1e-9 ? Vec3(ff.normalized()) : Vec3(Vec3::UnitX());
    st_.positions.push_back(st_.robot);
    imagine_ = factory_ != nullptr && static_cast<bool>(*factory_) && w_.beta < 1.0;
  }

  EpisodeResult run() {
    EpisodeResult res;
    int steps = 0;
    for (;;) {
      const LandmarkCommand cmd = landmark_stub(spec_, st_, w_);
      st_.plan.push_back(cmd);
      st_.yaw = anchor_yaw(st_, cmd.preferred_direction);
      const Pose cam = level_camera(Vec3(st_.robot.x(), st_.robot.y(), cfg_.camera_mount_height), st_.yaw);
      const SensorFrame frame = sense(hidden_, cam, k_);
      integrate_observation(st_.observed, frame, k_, cfg_.eps_merge);

      res.target_visible_at_end = contains_label(frame.labels, spec_.target_label);
      const auto targets = label_positions(hidden_, spec_.target_label);
      if (res.target_visible_at_end && planar_distance(st_.robot, targets) < spec_.success_dist) {
        res.success = true;
        break;
      }
      if (steps >= spec_.max_steps) break;
      if (!act(frame, cam, cmd, steps)) break;
      ++steps;
      apply_dynamics(steps);
    }

    res.steps = steps;
    res.path_length = st_.path_length;
    const Vec3 start = flat(spec_.start_pose.translation);
    const auto targets = label_positions(hidden_, spec_.target_label);
    res.shortest_path = geodesic_to_target(hidden_, start, spec_.target_label, cfg_);
    if (!std::isfinite(res.shortest_path)) res.shortest_path = planar_distance(start, targets);
    if (res.success) {
      res.dtg = planar_distance(st_.robot, targets);
    } else {
      res.dtg = geodesic_to_target(hidden_, st_.robot, spec_.target_label, cfg_);
      if (!std::isfinite(res.dtg)) res.dtg = planar_distance(st_.robot, targets);
    }
    res.trace = std::move(st_.trace);
    res.positions = std::move(st_.positions);
    res.snapshot = std::move(st_.snapshot);
    return res;
  }

 private:
  void imagine(const SensorFrame& frame, const Pose& cam, int step) {
    const auto model = (*factory_)(hidden_, derive_seed(spec_.seed, {0x1a9e, static_cast<std::uint64_t>(step)}));
    if (!model) return;
    const auto trajectories = sample_tri(cfg_.trajectory_params(), cam);
    const auto imagined = imagine_tri(frame.obs, trajectories, *model, k_);
    std::vector<GaussianScene> layer;
    for (const auto& im : imagined) {
      if (!im || im->local_poses.empty() || im->rendered_depths.empty()) continue;
      try {
        const double s = global_scale(frame.obs.depth, im->rendered_depths[0]).s;
        GaussianScene aligned = align_imagined(im->scene, im->local_poses[0], cam, s);
        const Pose to_world = coord_transform(cam, scaled_pose(im->local_poses[0], s));
        std::vector<LabelAssignment> votes;
        for (std::size_t i = 0; i < im->local_poses.size(); ++i) {
          const bool anchor = i == 0;
          if (!anchor && (i >= im->rendered_labels.size() || i >= im->rendered_depths.size())) break;
          const Pose world_cam = anchor ? cam : compose(to_world, scaled_pose(im->local_poses[i], s));
          const LabelImage& sem = anchor ? frame.labels : im->rendered_labels[i];
          const DepthImage d_gt = anchor ? frame.obs.depth : scaled_depth(im->rendered_depths[i], s);
          const DepthImage d_render = render_depth(aligned, world_cam, k_);
          auto a = transfer_labels(aligned, world_cam, k_, sem, d_gt, d_render, cfg_.grounding(), static_cast<int>(i));
          keep_front_most(a, aligned, world_cam, d_render);
          votes.insert(votes.end(), a.begin(), a.end());
        }
        for (const auto& [idx, label] : vote_labels(votes)) aligned.gaussians[idx].label = label;
        layer.push_back(std::move(aligned));
      } catch (const Error&) {
        // An unalignable hypothesis is dropped; the others still count.
      }
    }
    if (!layer.empty()) st_.imagined = std::move(layer);
  }

  // Drops assignments of Gaussians hidden behind whatever wins their pixel;
  // the pixel label belongs to the front surface.
  void keep_front_most(std::vector<LabelAssignment>& a, const GaussianScene& scene, const Pose& cam,
                       const DepthImage& d_render) const {
    const Pose inv = invert(cam);
    std::erase_if(a, [&](const LabelAssignment& x) {
      const Vec3 pc = apply(inv, scene.gaussians[x.gaussian_index].position);
      const Vec2 uv = project(pc, k_);
      const int u = static_cast<int>(std::floor(uv.x() + 0.5));
      const int v = static_cast<int>(std::floor(uv.y() + 0.5));
      return std::abs(d_render.at(u, v) - pc.z()) >= cfg_.tau_d;
    });
  }

  void rebuild_maps() {
    std::vector<GaussianScene> parts;
    parts.reserve(1 + st_.imagined.size());
    parts.push_back(st_.observed);
    for (const auto& s : st_.imagined) parts.push_back(s);
    TaggedMerge tm = merge_scenes_tagged(parts, cfg_.eps_merge);
    st_.merged = std::move(tm.scene);
    st_.merged_source = std::move(tm.source);
    const auto& gs = st_.merged.gaussians;

    std::vector<std::size_t> nav_ids = navigable_indices(st_.merged, cfg_.robot_radius);
    const std::size_t cap = static_cast<std::size_t>(cfg_.max_candidates);
    for (double voxel = 2.0 * cfg_.eps_merge; nav_ids.size() > cap; voxel *= 1.5) {
      std::unordered_set<detail::VoxelKey, detail::VoxelKeyHash> taken;
      std::vector<std::size_t> coarse;
      for (std::size_t i : nav_ids) {
        if (taken.insert(detail::voxel_of(gs[i].position, voxel)).second) coarse.push_back(i);
      }
      nav_ids = std::move(coarse);
    }
    std::vector<NavEntry> entries;
    std::vector<Vec3> observed_nav;
    entries.reserve(nav_ids.size());
    for (std::size_t i : nav_ids) {
      const Source src = st_.merged_source[i] == 0 ? Source::Observed : Source::Imagined;
      entries.push_back({gs[i].position, src});
      if (src == Source::Observed) observed_nav.push_back(gs[i].position);
    }
    st_.nav = NavigableSet(std::move(entries));

    st_.nav_sem.clear();
    st_.targets = {};
    for (std::size_t i = 0; i < gs.size(); ++i) {
      const Label l = gs[i].label;
      if (l == kUnlabeled || l == kFloorLabel) continue;
      st_.nav_sem.push_back(gs[i].position);
      if (l != spec_.target_label) continue;
      (st_.merged_source[i] == 0 ? st_.targets.t_real : st_.targets.t_hyp).push_back(gs[i].position);
    }

    const SpatialIndex observed_index(observed_nav, 0.5);
    st_.f_new.clear();
    for (const auto& e : st_.nav.entries()) {
      if (e.source == Source::Imagined && observed_index.nearest_distance(e.position) > cfg_.eps_match) {
        st_.f_new.push_back(e.position);
      }
    }

    // Frontiers: observed navigable points next to a coarse cell nothing was seen in.
    std::unordered_set<detail::VoxelKey, detail::VoxelKeyHash> seen;
    for (const auto& g : st_.observed.gaussians) seen.insert(detail::voxel_of(flat(g.position), kFrontierCell));
    st_.frontiers.clear();
    for (const Vec3& p : observed_nav) {
      const auto c = detail::voxel_of(flat(p), kFrontierCell);
      const bool open = !seen.count({c.x + 1, c.y, c.z}) || !seen.count({c.x - 1, c.y, c.z}) ||
                        !seen.count({c.x, c.y + 1, c.z}) || !seen.count({c.x, c.y - 1, c.z});
      if (open) st_.frontiers.push_back(p);
    }

    std::vector<Vec3> extent;
    extent.reserve(gs.size() + 1);
    for (const auto& g : gs) extent.push_back(g.position);
    extent.push_back(st_.robot);
    st_.grid = OccupancyGrid::covering(extent, cfg_.grid_cell, 1.0);
    st_.grid.add_all(gs);
    st_.grid.inflate(cfg_.robot_radius - 0.5 * cfg_.grid_cell);
    if (const auto c = st_.grid.index_of(st_.robot); c && st_.grid.blocked(*c)) {
      st_.grid.unblock_disk(st_.robot, cfg_.robot_radius);
    }
    st_.has_grid = true;
  }

  // One decision after sensing. Returns false when no candidate is reachable.
  bool act(const SensorFrame& frame, const Pose& cam, const LandmarkCommand& cmd, int step) {
    if (imagine_) imagine(frame, cam, step);
    rebuild_maps();
    const Vec3 robot = st_.robot;
    st_.visited.push_back(robot);

    TraceRecord rec;
    rec.step = step;
    rec.pose = cam;
    rec.n_nav = st_.nav.size();
    rec.n_sem = st_.nav_sem.size();
    rec.n_hyp = st_.targets.t_hyp.size();
    rec.n_real = st_.targets.t_real.size();

    if (st_.nav.empty()) {
      // Nothing to stand on yet: turn a quarter and look again.
      st_.last_motion_dir = Vec3(-st_.last_motion_dir.y(), st_.last_motion_dir.x(), 0.0);
      rec.waypoint = robot;
      st_.trace.push_back(rec);
      return true;
    }

    MultiSourceInputs in;
    in.robot = robot;
    in.preferred_direction = cmd.preferred_direction;
    in.landmark_points = st_.targets.t_real;
    in.visited = st_.visited;
    in.frontiers = st_.frontiers;
    AffordanceField field;
    field.positions = st_.nav.positions();
    field.m = multi_source_map(st_.nav, in, w_);
    field.m_fa = future_aware_map(st_.nav, st_.targets, st_.f_new, w_);
    field.m_aff = fuse_affordance(field.m, field.m_fa, w_.beta);
    field.selected = select_waypoint(field, robot);

    // Retry with body-only clearance when the inflated margins seal the robot in.
    const OccupancyGrid* grid = &st_.grid;
    OccupancyGrid tight;
    std::size_t chosen = choose_reachable(field, robot, *grid);
    if (chosen == field.positions.size()) {
      tight = st_.grid;
      tight.inflate(kBodyRadius);
      grid = &tight;
      chosen = choose_reachable(field, robot, *grid);
    }
    if (chosen == field.positions.size()) {
      st_.snapshot = MapSnapshot{robot, cfg_.grid_cell, std::move(field)};
      return false;
    }
    rec.waypoint_index = chosen;
    rec.waypoint = field.positions[chosen];
    rec.score = field.m_aff[chosen];
    st_.trace.push_back(rec);

    const auto start_cell = grid->index_of(robot);
    const auto goal_cell = grid->index_of(field.positions[chosen]);
    const auto path = grid->astar(*start_cell, *goal_cell);
    std::vector<Vec3> polyline{robot};
    if (path) {
      for (std::size_t i = 1; i + 1 < path->size(); ++i) polyline.push_back(grid->center((*path)[i]));
    }
    polyline.push_back(flat(field.positions[chosen]));
    st_.snapshot = MapSnapshot{robot, cfg_.grid_cell, std::move(field)};
    move_along(polyline);
    return true;
  }

  // The selected waypoint when it can be reached, else the next best reachable
  // candidate. Candidates under the robot are skipped. Returns size() if none.
  std::size_t choose_reachable(const AffordanceField& field, const Vec3& robot, const OccupancyGrid& grid) const {
    const std::size_t n = field.positions.size();
    const std::vector<double> dist = grid.distances_from(robot);
    auto usable = [&](std::size_t i) {
      if (planar(field.positions[i], robot) <= cfg_.robot_radius) return false;
      const auto c = grid.index_of(field.positions[i]);
      return c && std::isfinite(dist[static_cast<std::size_t>(*c)]) && !grid.blocked(*c);
    };
    if (usable(field.selected)) return field.selected;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> range(n);
    for (std::size_t i = 0; i < n; ++i) range[i] = (field.positions[i] - robot).norm();
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (field.m_aff[a] != field.m_aff[b]) return field.m_aff[a] > field.m_aff[b];
      if (range[a] != range[b]) return range[a] < range[b];
      return a < b;
    });
    for (std::size_t i : order) {
      if (usable(i)) return i;
    }
    return n;
  }

  void move_along(const std::vector<Vec3>& polyline) {
    const ContactSensor contact(hidden_);
    const Vec3 origin = st_.robot;
    Vec3 cur = st_.robot;
    std::size_t seg = 1;
    for (int sub = 0; sub < cfg_.k_move && seg < polyline.size(); ++sub) {
      // Walk step_len of arc length along the remaining polyline.
      double budget = cfg_.step_len;
      Vec3 next = cur;
      while (seg < polyline.size() && budget > 1e-12) {
        const Vec3 d = polyline[seg] - next;
        const double len = d.norm();
        if (len <= budget) {
          next = polyline[seg++];
          budget -= len;
        } else {
          next += d * (budget / len);
          budget = 0.0;
        }
      }
      // Sample the straight sub-step; stop short at first contact.
      const Vec3 delta = next - cur;
      const int samples = std::max(1, static_cast<int>(std::ceil(delta.norm() / 0.05)));
      Vec3 safe = cur;
      bool bumped = false;
      for (int i = 1; i <= samples; ++i) {
        const Vec3 p = cur + delta * (static_cast<double>(i) / samples);
        if (contact.touches(p)) {
          bumped = true;
          break;
        }
        safe = p;
      }
      st_.path_length += (safe - cur).norm();
      cur = safe;
      st_.positions.push_back(cur);
      if (bumped) {
        bump(contact, cur);
        break;
      }
    }
    st_.robot = cur;
    const Vec3 moved = flat(cur - origin);
    if (moved.norm() > 1e-9) st_.last_motion_dir = moved.normalized();
  }

  // Contact reveals the hidden obstacle points around the robot.
  void bump(const ContactSensor& contact, const Vec3& at) {
    GaussianScene touched;
    for (std::size_t j : contact.index.radius_query(flat(at), kBumpRadius)) {
      touched.gaussians.push_back(hidden_.gaussians[contact.ids[j]]);
    }
    const GaussianScene parts[2] = {std::move(st_.observed), std::move(touched)};
    st_.observed = merge_scenes(parts, cfg_.eps_merge);
  }

  void apply_dynamics(int steps) {
    if (spec_.target_velocity.squaredNorm() > 0.0) {
      for (auto& g : hidden_.gaussians) {
        if (g.label == spec_.target_label) g.position += spec_.target_velocity;
      }
    }
    if (spec_.obstacle_insert_step >= 0 && steps == spec_.obstacle_insert_step) {
      hidden_.gaussians.insert(hidden_.gaussians.end(), spec_.sudden_obstacle.gaussians.begin(),
                               spec_.sudden_obstacle.gaussians.end());
    }
  }

  const EpisodeSpec& spec_;
  const WorldModelFactory* factory_;
  const Config& cfg_;
  Intrinsics k_;
  ValueWeights w_;
  GaussianScene hidden_;
  NavigationState st_;
  bool imagine_ = false;
};

}  // namespace

EpisodeResult run_episode(const EpisodeSpec& spec, const WorldModelFactory* factory, const Config& cfg) {
  cfg.validate();
  return Navigator(spec, factory, cfg).run();
}

double spl_term(bool success, double path_length, double shortest_path) {
  if (!success) return 0.0;
  const double denom = std::max(path_length, shortest_path);
  return denom > 0.0 ? shortest_path / denom : 1.0;
}

Metrics metrics(std::span<const EpisodeResult> results) {
  if (results.empty()) throw Error(Errc::EmptyResults, "metrics need at least one episode");
  Metrics m;
  for (const auto& r : results) {
    m.sr += r.success ? 1.0 : 0.0;
    m.spl += spl_term(r.success, r.path_length, r.shortest_path);
    m.dtg += r.dtg;
  }
  const double n = static_cast<double>(results.size());
  m.sr /= n;
  m.spl /= n;
  m.dtg /= n;
  return m;
}

}  // namespace occlunav
