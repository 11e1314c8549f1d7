#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "occlunav/geometry.hpp"

namespace occlunav {

/// Uniform-grid hash over 3D points for radius and nearest-distance queries.
/// Results are exactly those of a linear scan with the same distance formula.
class SpatialIndex {
 public:
  SpatialIndex() = default;
  SpatialIndex(std::span<const Vec3> points, double cell);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Indices with ||p - center|| <= radius, ascending.
  std::vector<std::size_t> radius_query(const Vec3& center, double radius) const;
  std::size_t count_within(const Vec3& center, double radius) const;

  /// Distance to the closest point, +inf when empty.
  double nearest_distance(const Vec3& center) const;

 private:
  struct Key {
    long long x, y, z;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  Key key_of(const Vec3& p) const;

  std::vector<Vec3> points_;
  double cell_ = 1.0;
  Key lo_{0, 0, 0};
  Key hi_{0, 0, 0};
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> cells_;
};

}  // namespace occlunav
