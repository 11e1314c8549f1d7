#include "occlunav/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "occlunav/error.hpp"

namespace occlunav {

std::size_t SpatialIndex::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t h = std::hash<long long>()(k.x);
  h = h * 1000003u ^ std::hash<long long>()(k.y);
  h = h * 1000003u ^ std::hash<long long>()(k.z);
  return h;
}

SpatialIndex::Key SpatialIndex::key_of(const Vec3& p) const {
  return {static_cast<long long>(std::floor(p.x() / cell_)), static_cast<long long>(std::floor(p.y() / cell_)),
          static_cast<long long>(std::floor(p.z() / cell_))};
}

SpatialIndex::SpatialIndex(std::span<const Vec3> points, double cell) : points_(points.begin(), points.end()), cell_(cell) {
  if (!(cell > 0.0)) throw Error(Errc::InvalidParams, "index cell must be positive");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Key k = key_of(points_[i]);
    if (i == 0) {
      lo_ = hi_ = k;
    } else {
      lo_ = {std::min(lo_.x, k.x), std::min(lo_.y, k.y), std::min(lo_.z, k.z)};
      hi_ = {std::max(hi_.x, k.x), std::max(hi_.y, k.y), std::max(hi_.z, k.z)};
    }
    cells_[k].push_back(i);
  }
}

std::vector<std::size_t> SpatialIndex::radius_query(const Vec3& center, double radius) const {
  std::vector<std::size_t> out;
  if (points_.empty() || !(radius >= 0.0)) return out;
  const Key a = key_of(center - Vec3::Constant(radius));
  const Key b = key_of(center + Vec3::Constant(radius));
  for (long long x = std::max(a.x, lo_.x); x <= std::min(b.x, hi_.x); ++x) {
    for (long long y = std::max(a.y, lo_.y); y <= std::min(b.y, hi_.y); ++y) {
      for (long long z = std::max(a.z, lo_.z); z <= std::min(b.z, hi_.z); ++z) {
        const auto it = cells_.find({x, y, z});
        if (it == cells_.end()) continue;
        for (std::size_t i : it->second) {
          if ((points_[i] - center).norm() <= radius) out.push_back(i);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t SpatialIndex::count_within(const Vec3& center, double radius) const {
  return radius_query(center, radius).size();
}

double SpatialIndex::nearest_distance(const Vec3& center) const {
  double best = std::numeric_limits<double>::infinity();
  if (points_.empty()) return best;
  const Key c = key_of(center);
  // Ring r holds cells at Chebyshev distance r from the center cell; any point
  // outside rings 0..r is at least r * cell_ away.
  const long long max_ring = std::max({std::abs(c.x - lo_.x), std::abs(c.x - hi_.x), std::abs(c.y - lo_.y),
                                       std::abs(c.y - hi_.y), std::abs(c.z - lo_.z), std::abs(c.z - hi_.z)});
  for (long long r = 0; r <= max_ring; ++r) {
    for (long long x = c.x - r; x <= c.x + r; ++x) {
      if (x < lo_.x || x > hi_.x) continue;
      for (long long y = c.y - r; y <= c.y + r; ++y) {
        if (y < lo_.y || y > hi_.y) continue;
        const bool edge_xy = std::abs(x - c.x) == r || std::abs(y - c.y) == r;
        for (long long z = c.z - r; z <= c.z + r; ++z) {
          if (z < lo_.z || z > hi_.z) continue;
          if (!edge_xy && std::abs(z - c.z) != r) {
            // interior of the ring cube; jump to the far face
            z = c.z + r - 1;
            continue;
          }
          const auto it = cells_.find({x, y, z});
          if (it == cells_.end()) continue;
          for (std::size_t i : it->second) best = std::min(best, (points_[i] - center).norm());
        }
      }
    }
    if (best <= static_cast<double>(r) * cell_) break;
  }
  return best;
}

}  // namespace occlunav
