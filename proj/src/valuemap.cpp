#include "occlunav/valuemap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "occlunav/error.hpp"

namespace occlunav {

NavigableSet::NavigableSet(std::vector<NavEntry> entries, double index_cell) : entries_(std::move(entries)) {
  positions_.reserve(entries_.size());
  for (const auto& e : entries_) positions_.push_back(e.position);
  index_ = SpatialIndex(positions_, index_cell);
}

void ValueWeights::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(alpha_sem) || !unit(alpha_exp) || !unit(beta) || !unit(lambda_sem)) {
    throw Error(Errc::InvalidParams, "alpha_sem, alpha_exp, beta and lambda_sem must lie in [0, 1]");
  }
  if (!(r_vis > 0.0) || !(sigma_s > 0.0) || !(sigma_t > 0.0)) {
    throw Error(Errc::InvalidParams, "r_vis, sigma_s and sigma_t must be positive");
  }
}

double min_dist(const Vec3& g, std::span<const Vec3> set) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& p : set) best = std::min(best, (p - g).norm());
  return best;
}

namespace {

// exp(-d / sigma) with d = +inf mapping to exactly 0.
double decay(double d, double sigma) { return std::isinf(d) ? 0.0 : std::exp(-d / sigma); }

double semantic_from_distances(double d_real, double d_hyp, const ValueWeights& w) {
  return std::max(decay(d_real, w.sigma_s), w.lambda_sem * decay(d_hyp, w.sigma_s));
}

}  // namespace

double semantic_score(const Vec3& g, const TargetSets& targets, const ValueWeights& w) {
  return semantic_from_distances(min_dist(g, targets.t_real), min_dist(g, targets.t_hyp), w);
}

std::size_t exploration_raw(const Vec3& g, std::span<const Vec3> f_new, double r_vis) {
  std::size_t n = 0;
  for (const Vec3& p : f_new) {
    if ((p - g).norm() <= r_vis) ++n;
  }
  return n;
}

std::vector<double> exploration_normalize(std::span<const std::size_t> counts) {
  std::vector<double> out(counts.size(), 0.0);
  const std::size_t top = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
  if (top == 0) return out;
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]) / static_cast<double>(top);
  return out;
}

void normalize_by_max(std::vector<double>& values) {
  if (values.empty()) return;
  const double top = *std::max_element(values.begin(), values.end());
  if (!(top > 0.0)) {
    std::fill(values.begin(), values.end(), 0.0);
    return;
  }
  for (double& v : values) v /= top;
}

std::vector<double> future_aware_map(const NavigableSet& candidates, const TargetSets& targets,
                                     std::span<const Vec3> f_new, const ValueWeights& w) {
  const SpatialIndex real(targets.t_real, w.sigma_s);
  const SpatialIndex hyp(targets.t_hyp, w.sigma_s);
  const SpatialIndex fresh(f_new, w.r_vis);
  const auto& pos = candidates.positions();

  std::vector<std::size_t> counts(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) counts[i] = fresh.count_within(pos[i], w.r_vis);
  const std::vector<double> e = exploration_normalize(counts);

  std::vector<double> out(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const double s = semantic_from_distances(real.nearest_distance(pos[i]), hyp.nearest_distance(pos[i]), w);
    out[i] = w.alpha_sem * s + w.alpha_exp * e[i];
  }
  return out;
}

MultiSourceMap multi_source_components(const NavigableSet& candidates, const MultiSourceInputs& in,
                                       const ValueWeights& w) {
  const auto& pos = candidates.positions();
  const std::size_t n = pos.size();
  MultiSourceMap out;
  out.action.resize(n);
  out.semantic.resize(n);
  out.trajectory.resize(n);
  out.heuristic.resize(n);
  out.total.resize(n);

  const SpatialIndex landmark(in.landmark_points, w.sigma_s);
  const SpatialIndex visited(in.visited, w.sigma_t);
  const SpatialIndex frontier(in.frontiers, w.sigma_s);

  Vec2 pref(in.preferred_direction.x(), in.preferred_direction.y());
  const double pref_norm = pref.norm();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d(pos[i].x() - in.robot.x(), pos[i].y() - in.robot.y());
    const double dn = d.norm();
    double cosine = 0.0;
    if (dn > 0.0 && pref_norm > 0.0) cosine = std::clamp(d.dot(pref) / (dn * pref_norm), -1.0, 1.0);
    out.action[i] = 0.5 * (1.0 + cosine);
    out.semantic[i] = decay(landmark.nearest_distance(pos[i]), w.sigma_s);
    out.trajectory[i] = 1.0 - decay(visited.nearest_distance(pos[i]), w.sigma_t);
    out.heuristic[i] = decay(frontier.nearest_distance(pos[i]), w.sigma_s);
  }
  normalize_by_max(out.action);
  normalize_by_max(out.semantic);
  normalize_by_max(out.trajectory);
  normalize_by_max(out.heuristic);
  for (std::size_t i = 0; i < n; ++i) {
    out.total[i] = out.action[i] + out.semantic[i] + out.trajectory[i] + out.heuristic[i];
  }
  return out;
}

std::vector<double> multi_source_map(const NavigableSet& candidates, const MultiSourceInputs& in,
                                     const ValueWeights& w) {
  return multi_source_components(candidates, in, w).total;
}

std::vector<double> fuse_affordance(std::span<const double> m, std::span<const double> m_fa, double beta) {
  if (m.size() != m_fa.size()) throw Error(Errc::LengthMismatch, "m and m_fa differ in length");
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = beta * m[i] + (1.0 - beta) * m_fa[i];
  return out;
}

std::size_t select_waypoint(const AffordanceField& field, const Vec3& robot) {
  if (field.m_aff.empty()) throw Error(Errc::EmptyField, "no candidates to select from");
  if (field.positions.size() != field.m_aff.size()) throw Error(Errc::LengthMismatch, "positions vs m_aff");
  std::size_t best = 0;
  double best_score = field.m_aff[0];
  double best_dist = (field.positions[0] - robot).norm();
  for (std::size_t i = 1; i < field.m_aff.size(); ++i) {
    const double s = field.m_aff[i];
    if (s < best_score) continue;
    const double d = (field.positions[i] - robot).norm();
    if (s > best_score || d < best_dist) {
      best = i;
      best_score = s;
      best_dist = d;
    }
  }
  return best;
}

}  // namespace occlunav
