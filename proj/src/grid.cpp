#include "occlunav/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "occlunav/error.hpp"
#include "occlunav/semantics.hpp"

namespace occlunav {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr std::array<std::array<int, 2>, 8> kSteps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
}  // namespace

OccupancyGrid::OccupancyGrid(double min_x, double min_y, double max_x, double max_y, double cell)
    : min_x_(min_x), min_y_(min_y), cell_(cell) {
  if (!(cell > 0.0)) throw Error(Errc::InvalidParams, "grid cell must be positive");
  nx_ = std::max(1, static_cast<int>(std::ceil((max_x - min_x) / cell)));
  ny_ = std::max(1, static_cast<int>(std::ceil((max_y - min_y) / cell)));
  state_.assign(static_cast<std::size_t>(nx_) * ny_, static_cast<std::uint8_t>(CellState::Unknown));
  blocked_.assign(state_.size(), 0);
}

OccupancyGrid OccupancyGrid::covering(std::span<const Vec3> points, double cell, double margin) {
  double lo_x = 0.0, lo_y = 0.0, hi_x = 0.0, hi_y = 0.0;
  bool first = true;
  for (const Vec3& p : points) {
    if (first) {
      lo_x = hi_x = p.x();
      lo_y = hi_y = p.y();
      first = false;
      continue;
    }
    lo_x = std::min(lo_x, p.x());
    lo_y = std::min(lo_y, p.y());
    hi_x = std::max(hi_x, p.x());
    hi_y = std::max(hi_y, p.y());
  }
  // Snap the origin to the cell lattice so grids built at different times agree.
  const double ox = std::floor((lo_x - margin) / cell) * cell;
  const double oy = std::floor((lo_y - margin) / cell) * cell;
  return OccupancyGrid(ox, oy, hi_x + margin, hi_y + margin, cell);
}

std::optional<int> OccupancyGrid::index_of(const Vec3& p) const {
  const double fx = std::floor((p.x() - min_x_) / cell_);
  const double fy = std::floor((p.y() - min_y_) / cell_);
  if (fx < 0.0 || fy < 0.0 || fx >= nx_ || fy >= ny_) return std::nullopt;
  return index(static_cast<int>(fx), static_cast<int>(fy));
}

Vec3 OccupancyGrid::center(int idx) const {
  return {min_x_ + (ix(idx) + 0.5) * cell_, min_y_ + (iy(idx) + 0.5) * cell_, 0.0};
}

void OccupancyGrid::add(const Gaussian9& g) {
  const auto idx = index_of(g.position);
  if (!idx) return;
  auto& s = state_[static_cast<std::size_t>(*idx)];
  if (is_obstacle(g)) {
    s = static_cast<std::uint8_t>(CellState::Occupied);
  } else if (is_floor(g) && s == static_cast<std::uint8_t>(CellState::Unknown)) {
    s = static_cast<std::uint8_t>(CellState::Free);
  }
}

void OccupancyGrid::inflate(double radius) {
  std::fill(blocked_.begin(), blocked_.end(), 0);
  const int r = static_cast<int>(std::floor(radius / cell_ + 1e-9));
  const double r2 = (radius / cell_) * (radius / cell_) + 1e-9;
  for (int y = 0; y < ny_; ++y) {
    for (int x = 0; x < nx_; ++x) {
      if (state(index(x, y)) != CellState::Occupied) continue;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          if (dx * dx + dy * dy > r2) continue;
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= nx_ || yy >= ny_) continue;
          blocked_[static_cast<std::size_t>(index(xx, yy))] = 1;
        }
      }
    }
  }
}

template <typename Visit>
void OccupancyGrid::for_neighbors(int idx, Visit&& visit) const {
  const int x = ix(idx), y = iy(idx);
  for (const auto& s : kSteps) {
    const int xx = x + s[0], yy = y + s[1];
    if (xx < 0 || yy < 0 || xx >= nx_ || yy >= ny_) continue;
    const int n = index(xx, yy);
    if (blocked(n)) continue;
    const bool diagonal = s[0] != 0 && s[1] != 0;
    if (diagonal && (blocked(index(x + s[0], y)) || blocked(index(x, y + s[1])))) continue;
    visit(n, diagonal ? kSqrt2 * cell_ : cell_);
  }
}

std::optional<std::vector<int>> OccupancyGrid::astar(int start, int goal) const {
  const std::size_t n = state_.size();
  if (start < 0 || goal < 0 || static_cast<std::size_t>(start) >= n || static_cast<std::size_t>(goal) >= n) {
    return std::nullopt;
  }
  if (start != goal && blocked(goal)) return std::nullopt;
  const int gx = ix(goal), gy = iy(goal);
  auto heuristic = [&](int idx) {
    const double dx = std::abs(ix(idx) - gx), dy = std::abs(iy(idx) - gy);
    return cell_ * ((dx + dy) + (kSqrt2 - 2.0) * std::min(dx, dy));
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> g(n, kInf);
  std::vector<int> parent(n, -1);
  std::vector<char> closed(n, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  g[static_cast<std::size_t>(start)] = 0.0;
  open.emplace(heuristic(start), start);
  while (!open.empty()) {
    const auto [f, cur] = open.top();
    open.pop();
    if (closed[static_cast<std::size_t>(cur)]) continue;
    closed[static_cast<std::size_t>(cur)] = 1;
    if (cur == goal) break;
    for_neighbors(cur, [&](int nb, double cost) {
      const double cand = g[static_cast<std::size_t>(cur)] + cost;
      if (cand < g[static_cast<std::size_t>(nb)]) {
        g[static_cast<std::size_t>(nb)] = cand;
        parent[static_cast<std::size_t>(nb)] = cur;
        open.emplace(cand + heuristic(nb), nb);
      }
    });
  }
  if (!closed[static_cast<std::size_t>(goal)]) return std::nullopt;
  std::vector<int> path;
  for (int c = goal; c != -1; c = parent[static_cast<std::size_t>(c)]) path.push_back(c);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<double> OccupancyGrid::distances_from(const Vec3& start) const {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(state_.size(), kInf);
  const auto s = index_of(start);
  if (!s) return dist;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  const Vec3 c = center(*s);
  dist[static_cast<std::size_t>(*s)] = std::hypot(start.x() - c.x(), start.y() - c.y());
  open.emplace(dist[static_cast<std::size_t>(*s)], *s);
  while (!open.empty()) {
    const auto [d, cur] = open.top();
    open.pop();
    if (d > dist[static_cast<std::size_t>(cur)]) continue;
    for_neighbors(cur, [&](int nb, double cost) {
      const double cand = d + cost;
      if (cand < dist[static_cast<std::size_t>(nb)]) {
        dist[static_cast<std::size_t>(nb)] = cand;
        open.emplace(cand, nb);
      }
    });
  }
  return dist;
}

void OccupancyGrid::unblock_disk(const Vec3& p, double radius) {
  const auto c = index_of(p);
  if (!c) return;
  const int r = static_cast<int>(std::ceil(radius / cell_)) + 1;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const int x = ix(*c) + dx, y = iy(*c) + dy;
      if (x < 0 || y < 0 || x >= nx_ || y >= ny_) continue;
      const int idx = index(x, y);
      const Vec3 m = center(idx);
      if (state(idx) == CellState::Occupied || std::hypot(m.x() - p.x(), m.y() - p.y()) > radius) continue;
      blocked_[static_cast<std::size_t>(idx)] = 0;
    }
  }
}

bool OccupancyGrid::segment_clear(const Vec3& a, const Vec3& b) const {
  const auto ia = index_of(a);
  const auto ib = index_of(b);
  const double len = std::hypot(b.x() - a.x(), b.y() - a.y());
  const int steps = std::max(1, static_cast<int>(std::ceil(len / (0.25 * cell_))));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const Vec3 p = a + t * (b - a);
    const auto idx = index_of(p);
    if (!idx || idx == ia || idx == ib) continue;
    if (blocked(*idx)) return false;
  }
  return true;
}

}  // namespace occlunav
