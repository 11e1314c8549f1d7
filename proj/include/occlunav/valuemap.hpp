#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "occlunav/geometry.hpp"
#include "occlunav/spatial_index.hpp"

namespace occlunav {

enum class Source { Observed, Imagined };

struct NavEntry {
  Vec3 position = Vec3::Zero();
  Source source = Source::Observed;
};

/// Navigable Gaussians (candidate waypoints) with a radius-query index.
class NavigableSet {
 public:
  NavigableSet() = default;
  explicit NavigableSet(std::vector<NavEntry> entries, double index_cell = 0.5);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<NavEntry>& entries() const { return entries_; }
  const std::vector<Vec3>& positions() const { return positions_; }
  const SpatialIndex& index() const { return index_; }

 private:
  std::vector<NavEntry> entries_;
  std::vector<Vec3> positions_;
  SpatialIndex index_;
};

/// Target-labeled positions from direct observation vs. imagination.
struct TargetSets {
  std::vector<Vec3> t_real;
  std::vector<Vec3> t_hyp;
};

struct ValueWeights {
  double alpha_sem = 0.5;
  double alpha_exp = 0.5;
  double beta = 0.5;
  double lambda_sem = 0.5;
  double r_vis = 0.6;    // [m]
  double sigma_s = 1.0;  // semantic length scale [m]
  double sigma_t = 1.0;  // trajectory-suppression length scale [m]

  void validate() const;
};

struct AffordanceField {
  std::vector<Vec3> positions;
  std::vector<double> m;
  std::vector<double> m_fa;
  std::vector<double> m_aff;
  std::size_t selected = 0;
};

/// Euclidean distance to the closest member of `set`; +inf for an empty set.
double min_dist(const Vec3& g, std::span<const Vec3> set);

/// max(exp(-d_real / sigma_s), lambda_sem * exp(-d_hyp / sigma_s)); empty
/// sets contribute 0.
double semantic_score(const Vec3& g, const TargetSets& targets, const ValueWeights& w);

/// Number of `f_new` members within r_vis (inclusive) of g.
std::size_t exploration_raw(const Vec3& g, std::span<const Vec3> f_new, double r_vis);

/// Divides by the maximum count; all-zero input maps to all zeros.
std::vector<double> exploration_normalize(std::span<const std::size_t> counts);

/// alpha_sem * S(g) + alpha_exp * E(g) per candidate.
std::vector<double> future_aware_map(const NavigableSet& candidates, const TargetSets& targets,
                                     std::span<const Vec3> f_new, const ValueWeights& w);

/// Inputs of the observation-only value map.
struct MultiSourceInputs {
  Vec3 robot = Vec3::Zero();
  Vec3 preferred_direction = Vec3::UnitX();  // only x, y are used
  std::vector<Vec3> landmark_points;         // observed Gaussians with the current landmark label
  std::vector<Vec3> visited;                 // previously visited robot positions
  std::vector<Vec3> frontiers;               // observed navigable Gaussians next to unknown space
};

struct MultiSourceMap {
  std::vector<double> action;      // m_a
  std::vector<double> semantic;    // m_s
  std::vector<double> trajectory;  // m_t
  std::vector<double> heuristic;   // m_i
  std::vector<double> total;       // m
};

/// m = m_a + m_s + m_t + m_i, each component divided by its maximum over the
/// candidates first (all-zero components stay zero).
///  m_a = (1 + cos angle(candidate - robot, preferred)) / 2 in the xy plane
///  m_s = exp(-d(g, landmark) / sigma_s)
///  m_t = 1 - exp(-d(g, visited) / sigma_t)
///  m_i = exp(-d(g, frontier) / sigma_s)
MultiSourceMap multi_source_components(const NavigableSet& candidates, const MultiSourceInputs& in,
                                       const ValueWeights& w);
std::vector<double> multi_source_map(const NavigableSet& candidates, const MultiSourceInputs& in,
                                     const ValueWeights& w);

/// beta * m + (1 - beta) * m_fa. Throws Errc::LengthMismatch.
std::vector<double> fuse_affordance(std::span<const double> m, std::span<const double> m_fa, double beta);

/// argmax of m_aff; ties prefer the candidate nearer the robot, then the
/// lower index. Throws Errc::EmptyField / Errc::LengthMismatch.
std::size_t select_waypoint(const AffordanceField& field, const Vec3& robot);

/// Divides every entry by the maximum (in place); zero maximum leaves zeros.
void normalize_by_max(std::vector<double>& values);

}  // namespace occlunav
