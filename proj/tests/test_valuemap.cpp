#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "occlunav/error.hpp"
#include "occlunav/spatial_index.hpp"
#include "occlunav/valuemap.hpp"

using namespace occlunav;

namespace {

std::vector<Vec3> random_points(std::mt19937_64& rng, int n, double extent = 4.0) {
  std::uniform_real_distribution<double> u(-extent, extent);
  std::vector<Vec3> out;
  for (int i = 0; i < n; ++i) out.emplace_back(u(rng), u(rng), 0.2 * u(rng));
  return out;
}

NavigableSet nav_of(const std::vector<Vec3>& pts) {
  std::vector<NavEntry> e;
  for (const auto& p : pts) e.push_back({p, Source::Observed});
  return NavigableSet(std::move(e));
}

double brute_min(const Vec3& g, const std::vector<Vec3>& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : set) best = std::min(best, (g - p).norm());
  return best;
}

double brute_score(const Vec3& g, const TargetSets& t, const ValueWeights& w) {
  const double real = t.t_real.empty() ? 0.0 : std::exp(-brute_min(g, t.t_real) / w.sigma_s);
  const double hyp = t.t_hyp.empty() ? 0.0 : w.lambda_sem * std::exp(-brute_min(g, t.t_hyp) / w.sigma_s);
  return std::max(real, hyp);
}

}  // namespace

TEST(SemanticScore, Examples) {
  ValueWeights w;
  TargetSets t;
  EXPECT_EQ(semantic_score(Vec3::Zero(), t, w), 0.0);
  t.t_real = {Vec3(1, 0, 0)};
  EXPECT_NEAR(semantic_score(Vec3::Zero(), t, w), std::exp(-1.0), 1e-15);
  t.t_real.clear();
  t.t_hyp = {Vec3::Zero()};
  EXPECT_NEAR(semantic_score(Vec3::Zero(), t, w), 0.5, 1e-15);
  t.t_real = {Vec3(3, 0, 0)};
  // exp(-3) < 0.5, the hypothesis dominates.
  EXPECT_NEAR(semantic_score(Vec3::Zero(), t, w), 0.5, 1e-15);
}

TEST(SemanticScore, RealTargetsDominateAtEqualDistance) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto pts = random_points(rng, 5);
    ValueWeights w;
    w.lambda_sem = lam(rng);
    TargetSets real{pts, {}}, hyp{{}, pts};
    const Vec3 g = random_points(rng, 1)[0];
    EXPECT_GE(semantic_score(g, real, w), semantic_score(g, hyp, w));
    EXPECT_LE(semantic_score(g, real, w), 1.0);
  }
}

TEST(Exploration, CountsAndNormalization) {
  const std::vector<Vec3> f{{0, 0, 0}, {0.6, 0, 0}, {0.61, 0, 0}, {5, 5, 0}};
  EXPECT_EQ(exploration_raw(Vec3::Zero(), f, 0.6), 2u);  // boundary is inclusive
  EXPECT_EQ(exploration_raw(Vec3(10, 10, 10), f, 0.6), 0u);
  const std::vector<std::size_t> counts{0, 2, 4};
  EXPECT_EQ(exploration_normalize(counts), (std::vector<double>{0.0, 0.5, 1.0}));
  const std::vector<std::size_t> zeros{0, 0};
  EXPECT_EQ(exploration_normalize(zeros), (std::vector<double>{0.0, 0.0}));
}

TEST(FutureAwareMap, MatchesBruteForceOracle) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> a(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cand = random_points(rng, 60);
    const auto f_new = random_points(rng, 40);
    TargetSets t{random_points(rng, 3), random_points(rng, 4)};
    ValueWeights w;
    w.alpha_sem = a(rng);
    w.alpha_exp = a(rng);
    w.lambda_sem = a(rng);
    const auto got = future_aware_map(nav_of(cand), t, f_new, w);
    std::vector<double> counts;
    for (const auto& g : cand) {
      double c = 0;
      for (const auto& f : f_new) c += (g - f).norm() <= w.r_vis ? 1 : 0;
      counts.push_back(c);
    }
    const double mx = *std::max_element(counts.begin(), counts.end());
    ASSERT_EQ(got.size(), cand.size());
    for (std::size_t i = 0; i < cand.size(); ++i) {
      const double e = mx > 0 ? counts[i] / mx : 0.0;
      EXPECT_NEAR(got[i], w.alpha_sem * brute_score(cand[i], t, w) + w.alpha_exp * e, 1e-12);
    }
  }
}

TEST(FutureAwareMap, EmptyInputsGiveZero) {
  const auto cand = std::vector<Vec3>{{0, 0, 0}, {1, 1, 0}};
  const auto m = future_aware_map(nav_of(cand), TargetSets{}, {}, ValueWeights{});
  EXPECT_EQ(m, (std::vector<double>{0.0, 0.0}));
}

TEST(MultiSourceMap, ComponentsMatchOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto cand = random_points(rng, 40);
    MultiSourceInputs in;
    in.robot = Vec3(0.3, -0.2, 0);
    in.preferred_direction = Vec3(1, 1, 5);
    in.landmark_points = random_points(rng, 3);
    in.visited = random_points(rng, 5);
    in.frontiers = random_points(rng, 6);
    ValueWeights w;
    const auto c = multi_source_components(nav_of(cand), in, w);
    std::vector<double> ma, ms, mt, mi;
    const Vec2 pref = Vec2(1, 1).normalized();
    for (const auto& g : cand) {
      const Vec2 d = (g - in.robot).head<2>();
      ma.push_back(d.norm() > 0 ? (1 + d.normalized().dot(pref)) / 2 : 0.0);
      ms.push_back(std::exp(-brute_min(g, in.landmark_points) / w.sigma_s));
      mt.push_back(1 - std::exp(-brute_min(g, in.visited) / w.sigma_t));
      mi.push_back(std::exp(-brute_min(g, in.frontiers) / w.sigma_s));
    }
    for (auto* v : {&ma, &ms, &mt, &mi}) {
      const double mx = *std::max_element(v->begin(), v->end());
      for (double& x : *v) x = mx > 0 ? x / mx : 0.0;
    }
    const auto total = multi_source_map(nav_of(cand), in, w);
    for (std::size_t i = 0; i < cand.size(); ++i) {
      EXPECT_NEAR(c.action[i], ma[i], 1e-12);
      EXPECT_NEAR(c.semantic[i], ms[i], 1e-12);
      EXPECT_NEAR(c.trajectory[i], mt[i], 1e-12);
      EXPECT_NEAR(c.heuristic[i], mi[i], 1e-12);
      EXPECT_NEAR(total[i], ma[i] + ms[i] + mt[i] + mi[i], 1e-12);
      EXPECT_NEAR(c.total[i], total[i], 0.0);
    }
  }
}

TEST(Fuse, ExamplesAndEndpoints) {
  const std::vector<double> m{1.0, 0.0, 0.4}, fa{0.0, 1.0, 0.8};
  EXPECT_EQ(fuse_affordance(m, fa, 1.0), m);
  EXPECT_EQ(fuse_affordance(m, fa, 0.0), fa);
  const auto half = fuse_affordance(m, fa, 0.5);
  EXPECT_NEAR(half[2], 0.6, 1e-15);
  const std::vector<double> shorter{1.0};
  try {
    fuse_affordance(m, shorter, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LengthMismatch);
  }
}

TEST(Fuse, ConvexCombinationBounds) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3), b(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> m(20), fa(20);
    for (auto& x : m) x = u(rng);
    for (auto& x : fa) x = u(rng);
    const double beta = b(rng);
    const auto f = fuse_affordance(m, fa, beta);
    for (std::size_t i = 0; i < 20; ++i) {
      EXPECT_LE(f[i], std::max(m[i], fa[i]) + 1e-12);
      EXPECT_GE(f[i], std::min(m[i], fa[i]) - 1e-12);
    }
  }
}

TEST(SelectWaypoint, ArgmaxAndTieBreaks) {
  AffordanceField f;
  f.positions = {{3, 0, 0}, {1, 0, 0}, {1, 0, 0}, {0, 0, 0}};
  f.m_aff = {0.9, 0.9, 0.9, 0.2};
  EXPECT_EQ(select_waypoint(f, Vec3::Zero()), 1u);
  f.m_aff = {0.1, 0.2, 0.3, 0.2};
  EXPECT_EQ(select_waypoint(f, Vec3::Zero()), 2u);

  AffordanceField empty;
  try {
    select_waypoint(empty, Vec3::Zero());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyField);
  }
  f.m_aff.pop_back();
  EXPECT_THROW(select_waypoint(f, Vec3::Zero()), Error);
}

TEST(SelectWaypoint, MatchesLinearScan) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> v(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    AffordanceField f;
    f.positions = random_points(rng, 30);
    for (std::size_t i = 0; i < 30; ++i) f.m_aff.push_back(v(rng) / 3.0);
    const Vec3 robot = random_points(rng, 1)[0];
    std::size_t best = 0;
    for (std::size_t i = 1; i < 30; ++i) {
      const double di = (f.positions[i] - robot).norm(), db = (f.positions[best] - robot).norm();
      if (f.m_aff[i] > f.m_aff[best] || (f.m_aff[i] == f.m_aff[best] && di < db)) best = i;
    }
    EXPECT_EQ(select_waypoint(f, robot), best);
  }
}

TEST(SpatialIndex, AgreesWithLinearScan) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> r(0.0, 2.0), cell(0.05, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = random_points(rng, 300);
    const SpatialIndex idx(pts, cell(rng));
    for (int q = 0; q < 20; ++q) {
      const Vec3 c = random_points(rng, 1, 6.0)[0];
      const double rad = r(rng);
      std::vector<std::size_t> expect;
      for (std::size_t i = 0; i < pts.size(); ++i)
        if ((pts[i] - c).norm() <= rad) expect.push_back(i);
      EXPECT_EQ(idx.radius_query(c, rad), expect);
      EXPECT_EQ(idx.count_within(c, rad), expect.size());
      EXPECT_EQ(idx.nearest_distance(c), brute_min(c, pts));
    }
  }
  EXPECT_TRUE(std::isinf(SpatialIndex({}, 1.0).nearest_distance(Vec3::Zero())));
}

TEST(ValueWeights, Validation) {
  ValueWeights w;
  EXPECT_NO_THROW(w.validate());
  w.beta = 1.5;
  EXPECT_THROW(w.validate(), Error);
  w = ValueWeights{};
  w.sigma_s = 0.0;
  EXPECT_THROW(w.validate(), Error);
}
