#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>

#include "occlunav/geometry.hpp"

namespace occlunav::detail {

struct VoxelKey {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

inline VoxelKey voxel_of(const Vec3& p, double edge) {
  return {static_cast<std::int64_t>(std::floor(p.x() / edge)),
          static_cast<std::int64_t>(std::floor(p.y() / edge)),
          static_cast<std::int64_t>(std::floor(p.z() / edge))};
}

}  // namespace occlunav::detail
