#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "occlunav/geometry.hpp"
#include "occlunav/gsscene.hpp"

namespace occlunav {

enum class CellState : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

/// 2D top-down grid over the xy plane. A cell is Occupied when it holds an
/// obstacle Gaussian (see is_obstacle), Free when it holds only floor, and
/// Unknown otherwise. Planning treats Unknown as traversable.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(double min_x, double min_y, double max_x, double max_y, double cell);

  /// Grid covering the xy extent of `points` grown by `margin`.
  static OccupancyGrid covering(std::span<const Vec3> points, double cell, double margin);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double cell() const { return cell_; }
  std::size_t size() const { return state_.size(); }

  std::optional<int> index_of(const Vec3& p) const;
  int index(int ix, int iy) const { return iy * nx_ + ix; }
  int ix(int idx) const { return idx % nx_; }
  int iy(int idx) const { return idx / nx_; }
  Vec3 center(int idx) const;

  CellState state(int idx) const { return static_cast<CellState>(state_[static_cast<std::size_t>(idx)]); }
  void add(const Gaussian9& g);
  void add_all(std::span<const Gaussian9> gs) {
    for (const auto& g : gs) add(g);
  }
  void mark_occupied(int idx) { state_[static_cast<std::size_t>(idx)] = static_cast<std::uint8_t>(CellState::Occupied); }

  /// Blocks every cell whose center is within `radius` of an occupied cell
  /// center. Must be called after the last add().
  void inflate(double radius);
  bool blocked(int idx) const { return blocked_[static_cast<std::size_t>(idx)] != 0; }

  /// Unblocks the non-occupied cells whose centers lie within `radius` of p,
  /// so a robot standing inside an inflated margin can leave it.
  void unblock_disk(const Vec3& p, double radius);

  /// 8-connected A* with octile costs and no corner cutting; the start cell
  /// is always enterable. Returns the cell sequence start..goal.
  std::optional<std::vector<int>> astar(int start, int goal) const;

  /// Shortest 8-connected path length from `start` (exact position) to every
  /// cell center; +inf where unreachable.
  std::vector<double> distances_from(const Vec3& start) const;

  /// True when the straight xy segment a-b crosses no blocked cell (the
  /// cells containing a and b are exempt).
  bool segment_clear(const Vec3& a, const Vec3& b) const;

 private:
  template <typename Visit>
  void for_neighbors(int idx, Visit&& visit) const;

  double min_x_ = 0.0;
  double min_y_ = 0.0;
  double cell_ = 0.1;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::uint8_t> state_;
  std::vector<std::uint8_t> blocked_;
};

}  // namespace occlunav
