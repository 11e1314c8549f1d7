#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "occlunav/grid.hpp"
#include "test_support.hpp"

using namespace occlunav;
using occlunav::testing::gaussian;

namespace {

// Dense Bellman-Ford style relaxation over the same move set.
std::vector<double> brute_costs(const OccupancyGrid& g, int start) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(g.size(), inf);
  d[static_cast<std::size_t>(start)] = 0.0;
  auto free = [&](int x, int y) { return x >= 0 && y >= 0 && x < g.nx() && y < g.ny() && !g.blocked(g.index(x, y)); };
  for (bool changed = true; changed;) {
    changed = false;
    for (int i = 0; i < static_cast<int>(g.size()); ++i) {
      if (std::isinf(d[static_cast<std::size_t>(i)])) continue;
      const int x = g.ix(i), y = g.iy(i);
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
          if (!dx && !dy) continue;
          if (!free(x + dx, y + dy)) continue;
          if (dx && dy && (!free(x + dx, y) || !free(x, y + dy))) continue;
          const double c = d[static_cast<std::size_t>(i)] + (dx && dy ? std::sqrt(2.0) : 1.0) * g.cell();
          auto& t = d[static_cast<std::size_t>(g.index(x + dx, y + dy))];
          if (c < t - 1e-12) {
            t = c;
            changed = true;
          }
        }
    }
  }
  return d;
}

double path_cost(const OccupancyGrid& g, const std::vector<int>& path) {
  double c = 0;
  for (std::size_t i = 1; i < path.size(); ++i) c += (g.center(path[i]) - g.center(path[i - 1])).norm();
  return c;
}

OccupancyGrid random_grid(std::mt19937_64& rng) {
  OccupancyGrid g(0, 0, 2.0, 1.5, 0.1);
  std::bernoulli_distribution wall(0.25);
  for (int i = 0; i < static_cast<int>(g.size()); ++i)
    if (wall(rng)) g.mark_occupied(i);
  g.inflate(0.0);
  return g;
}

}  // namespace

TEST(Grid, AstarIsOptimalAgainstBruteForce) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const OccupancyGrid g = random_grid(rng);
    std::uniform_int_distribution<int> cell(0, static_cast<int>(g.size()) - 1);
    const int s = cell(rng);
    const auto d = brute_costs(g, s);
    for (int q = 0; q < 10; ++q) {
      const int t = cell(rng);
      const auto path = g.astar(s, t);
      if (g.blocked(t) || std::isinf(d[static_cast<std::size_t>(t)])) {
        EXPECT_FALSE(path.has_value());
        continue;
      }
      ASSERT_TRUE(path.has_value());
      EXPECT_EQ(path->front(), s);
      EXPECT_EQ(path->back(), t);
      EXPECT_NEAR(path_cost(g, *path), d[static_cast<std::size_t>(t)], 1e-9);
    }
  }
}

TEST(Grid, NoCornerCutting) {
  OccupancyGrid g(0, 0, 0.3, 0.3, 0.1);
  g.mark_occupied(g.index(1, 0));
  g.mark_occupied(g.index(0, 1));
  g.inflate(0.0);
  EXPECT_FALSE(g.astar(g.index(0, 0), g.index(1, 1)).has_value());
  OccupancyGrid h(0, 0, 0.3, 0.3, 0.1);
  h.mark_occupied(h.index(1, 0));
  h.inflate(0.0);
  const auto p = h.astar(h.index(0, 0), h.index(1, 1));
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->size(), 3u);  // must go around through (0, 1)
}

TEST(Grid, CellStatesFromGaussians) {
  OccupancyGrid g(0, 0, 1, 1, 0.1);
  g.add(gaussian({0.05, 0.05, 0.0}, 0.1, 1));
  g.add(gaussian({0.55, 0.55, 0.5}, 0.1, 2));
  g.add(gaussian({0.55, 0.55, 0.0}, 0.1, 1));
  EXPECT_EQ(g.state(*g.index_of({0.05, 0.05, 0})), CellState::Free);
  EXPECT_EQ(g.state(*g.index_of({0.55, 0.55, 0})), CellState::Occupied);
  EXPECT_EQ(g.state(*g.index_of({0.95, 0.05, 0})), CellState::Unknown);
  EXPECT_FALSE(g.index_of({-0.5, 0.5, 0}).has_value());
}

TEST(Grid, InflationAndUnblock) {
  OccupancyGrid g(0, 0, 1, 1, 0.1);
  g.mark_occupied(g.index(5, 5));
  g.inflate(0.2);
  EXPECT_TRUE(g.blocked(g.index(5, 7)));
  EXPECT_TRUE(g.blocked(g.index(6, 6)));
  EXPECT_FALSE(g.blocked(g.index(7, 7)));  // 0.283 from the obstacle center
  g.unblock_disk(g.center(g.index(5, 7)), 0.05);
  EXPECT_FALSE(g.blocked(g.index(5, 7)));
  g.unblock_disk(g.center(g.index(5, 5)), 0.05);
  EXPECT_TRUE(g.blocked(g.index(5, 5)));  // occupied cells stay blocked
}

TEST(Grid, DistancesMatchAstar) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const OccupancyGrid g = random_grid(rng);
    std::uniform_int_distribution<int> cell(0, static_cast<int>(g.size()) - 1);
    int s = cell(rng);
    while (g.blocked(s)) s = cell(rng);
    const auto dist = g.distances_from(g.center(s));
    const auto brute = brute_costs(g, s);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (std::isinf(brute[i])) {
        EXPECT_TRUE(std::isinf(dist[i]));
      } else {
        EXPECT_NEAR(dist[i], brute[i], 1e-9);
      }
    }
  }
}

TEST(Grid, SegmentClear) {
  OccupancyGrid g(0, 0, 1, 1, 0.1);
  for (int y = 0; y < 10; ++y)
    if (y != 9) g.mark_occupied(g.index(5, y));
  g.inflate(0.0);
  EXPECT_FALSE(g.segment_clear({0.15, 0.15, 0}, {0.85, 0.15, 0}));
  EXPECT_TRUE(g.segment_clear({0.15, 0.95, 0}, {0.85, 0.95, 0}));
  EXPECT_TRUE(g.segment_clear({0.15, 0.15, 0}, {0.15, 0.85, 0}));
}
