#include <gtest/gtest.h>

#include <algorithm>

#include "percospec/boolean/estimate.hpp"
#include "percospec/core/sampling.hpp"
#include "percospec/difference/functional.hpp"
#include "percospec/difference/operators.hpp"

using namespace percospec;

namespace {

PointConfiguration unmarked(double half, std::initializer_list<Point2> l) {
  PointConfiguration cfg(Region::square(half), false);
  for (auto p : l) cfg.push({p, 1});
  return cfg;
}

}  // namespace

TEST(AddOne, SmallCases) {
  const auto empty = unmarked(5, {});
  EXPECT_EQ(add_one_cost(functionals::constant(1.0), empty, {{0, 0}, 1}), 0.0);
  const Rect B{-1, 1, -1, 1};
  EXPECT_EQ(add_one_cost(functionals::occupancy(B), empty, {{0.5, 0.5}, 1}), 2.0);
  const auto one = unmarked(5, {{0.5, 0.5}});
  EXPECT_THROW(add_one_cost(functionals::occupancy(B), one, {{0.5, 0.5}, 1}), UsageError);
}

TEST(AddOne, BooleanCostsAreZeroOrTwo) {
  const auto F = functionals::boolean_crossing(3.0);
  for (int r = 0; r < 40; ++r) {
    const SeedSpec s(1, "addone");
    const auto cfg = sample_poisson(kLambdaCritical, Region::square(4.0), s.with_replica(r));
    RandomStream rs(s.with_replica(r).with_purpose("x"));
    const double d = add_one_cost(F, cfg, {{rs.uniform(-4, 4), rs.uniform(-4, 4)}, 1});
    EXPECT_TRUE(d == 0.0 || d == 2.0);
  }
}

TEST(RemoveOne, SmallCasesAndConsistency) {
  const Rect B{-1, 1, -1, 1};
  const auto F = functionals::occupancy(B);
  const auto cfg = unmarked(10, {{0.2, 0.1}, {8, 8}});
  EXPECT_EQ(remove_one_cost(F, cfg, 0), 2.0);
  EXPECT_EQ(remove_one_cost(F, cfg, 1), 0.0);
  EXPECT_THROW(remove_one_cost(F, cfg, 2), UsageError);
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    EXPECT_EQ(add_one_cost(F, remove_point(cfg, i), cfg[i]), remove_one_cost(F, cfg, i));
  }
}

TEST(Iterated, SmallCases) {
  const Rect B{-1, 1, -1, 1};
  const auto F = functionals::occupancy(B);
  const auto empty = unmarked(5, {});
  const std::vector<MarkedPoint> xy{{{0.1, 0.1}, 1}, {{-0.3, 0.2}, 1}};
  EXPECT_EQ(iterated_difference(F, empty, xy), -2.0);
  const std::vector<MarkedPoint> x{xy[0]};
  EXPECT_EQ(iterated_difference(F, empty, x), add_one_cost(F, empty, xy[0]));
  std::vector<MarkedPoint> many(21);
  for (int i = 0; i < 21; ++i) many[i] = {{0.01 * i, 0.0}, 1};
  EXPECT_THROW(iterated_difference(F, empty, many), SizeError);
  const std::vector<MarkedPoint> dup{xy[0], xy[0]};
  EXPECT_THROW(iterated_difference(F, empty, dup), UsageError);
}

TEST(Iterated, PermutationSymmetry) {
  const auto F = functionals::boolean_crossing(2.0);
  const SeedSpec s(2, "perm");
  for (int r = 0; r < 30; ++r) {
    const auto cfg = sample_poisson(kLambdaCritical, Region::square(3.0), s.with_replica(r));
    RandomStream rs(s.with_replica(r).with_purpose("pts"));
    std::vector<MarkedPoint> pts(3);
    for (auto& p : pts) p = {{rs.uniform(-3, 3), rs.uniform(-3, 3)}, 1};
    const double d = iterated_difference(F, cfg, pts);
    std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.loc.x < b.loc.x; });
    do {
      EXPECT_EQ(iterated_difference(F, cfg, pts), d);
    } while (std::next_permutation(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.loc.x < b.loc.x; }));
  }
}

TEST(Iterated, SecondDifferenceNeedsFirstOrderPivotality) {
  const auto F = functionals::boolean_crossing(3.0);
  const SeedSpec s(3, "4sum");
  int nonzero = 0;
  for (int r = 0; r < 400; ++r) {
    const auto cfg = sample_poisson(kLambdaCritical, Region::square(4.0), s.with_replica(r));
    RandomStream rs(s.with_replica(r).with_purpose("pts"));
    const MarkedPoint x{{rs.uniform(-4, 4), rs.uniform(-4, 4)}, 1};
    const MarkedPoint y{{x.loc.x + rs.uniform(-2, 2), x.loc.y + rs.uniform(-2, 2)}, 1};
    const std::vector<MarkedPoint> xy{x, y};
    if (iterated_difference(F, cfg, xy) == 0.0) continue;
    ++nonzero;
    const bool any = add_one_cost(F, cfg, x) != 0 || add_one_cost(F, add_point(cfg, y), x) != 0 ||
                     add_one_cost(F, cfg, y) != 0 || add_one_cost(F, add_point(cfg, x), y) != 0;
    EXPECT_TRUE(any);
  }
  EXPECT_GT(nonzero, 0);
}

TEST(Pivotal, SmallCases) {
  const auto F = functionals::boolean_crossing(2.0);
  EXPECT_TRUE(pivotal_points(F, unmarked(3, {})).indices.empty());
  auto bridge = unmarked(3, {{-1.5, 0}, {0, 0}, {1.5, 0}});
  EXPECT_EQ(F(bridge), 1.0);
  EXPECT_EQ(pivotal_points(F, bridge).indices, (std::vector<std::size_t>{0, 1, 2}));
  bridge.push({{0, 0.2}, 1});
  EXPECT_EQ(pivotal_points(F, bridge).indices, (std::vector<std::size_t>{0, 2}));
  EXPECT_THROW(quenched_pivotal_points(F, bridge), UsageError);
  EXPECT_THROW(pivotal_points(functionals::count_in(Rect{0, 1, 0, 1}), bridge), UsageError);
}

TEST(Pivotal, PrunedMatchesBruteForce) {
  const SeedSpec s(5, "prune");
  const auto fb = functionals::boolean_crossing(3.0);
  for (int r = 0; r < 40; ++r) {
    const auto cfg = sample_poisson(kLambdaCritical, Region::square(5.0), s.with_replica(r));
    EXPECT_EQ(pivotal_points(fb, cfg).indices, pivotal_points_bruteforce(fb, cfg).indices);
  }
  const auto fv = functionals::voronoi_crossing(2.0);
  int nonempty = 0;
  for (int r = 0; r < 40; ++r) {
    const auto cfg = sample_poisson(1.0, Region::square(2.0).padded(kVoronoiPad), s.with_replica(r), true);
    try {
      const auto p = pivotal_points(fv, cfg);
      EXPECT_EQ(p.indices, pivotal_points_bruteforce(fv, cfg).indices);
      nonempty += p.size() > 0;
    } catch (const PaddingError&) {
    }
  }
  EXPECT_GT(nonempty, 0);
}

TEST(Pivotal, QuenchedHookMatchesFlips) {
  const SeedSpec s(7, "hook");
  auto fv = functionals::voronoi_crossing(2.0);
  const Functional plain("plain", [&](const PointConfiguration& c) { return fv(c); },
                         {Monotonicity::marks, true, true, std::nullopt});
  for (int r = 0; r < 30; ++r) {
    const auto cfg = sample_poisson(1.0, Region::square(2.0).padded(kVoronoiPad), s.with_replica(r), true);
    try {
      EXPECT_EQ(quenched_pivotal_points(fv, cfg).indices, quenched_pivotal_points(plain, cfg).indices);
    } catch (const PaddingError&) {
    }
  }
}

TEST(Pivotal, RemovalSubsetOfQuenched) {
  const SeedSpec s(9, "subset");
  const auto fv = functionals::voronoi_crossing(2.0);
  for (int r = 0; r < 30; ++r) {
    const auto cfg = sample_poisson(1.0, Region::square(2.0).padded(kVoronoiPad), s.with_replica(r), true);
    try {
      const auto q = quenched_pivotal_points(fv, cfg);
      for (auto i : pivotal_points_bruteforce(fv, cfg).indices) EXPECT_TRUE(q.contains(i));
    } catch (const PaddingError&) {
    }
  }
}

TEST(Functional, BinderAgreesWithEval) {
  const SeedSpec s(11, "bind");
  for (const auto& F : {functionals::framed_voronoi_crossing(1.0), functionals::marked_boolean_crossing(1.0),
                        functionals::majority(Rect{-1, 1, -1, 1})}) {
    for (int r = 0; r < 20; ++r) {
      auto cfg = sample_poisson(1.0, Region::square(2.0), s.with_replica(r), true);
      const auto ev = F.bind(cfg);
      RandomStream rs(s.with_replica(r).with_purpose("marks"));
      for (int trial = 0; trial < 8; ++trial) {
        std::vector<int> m(cfg.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
          m[i] = rs.sign();
          cfg.set_mark(i, m[i]);
        }
        EXPECT_EQ(ev(m), F(cfg)) << F.name();
      }
    }
  }
}

TEST(Functional, EvaluationCounter) {
  const auto F = functionals::constant(1.0);
  const auto cfg = unmarked(1, {});
  F(cfg);
  F(cfg);
  EXPECT_EQ(F.evaluations(), 2u);
  const auto copy = F;
  copy(cfg);
  EXPECT_EQ(F.evaluations(), 3u);
}

TEST(Functional, MonotoneSpotCheck) {
  const SeedSpec s(13, "mono");
  const auto F = functionals::framed_voronoi_crossing(1.0);
  for (int r = 0; r < 200; ++r) {
    const auto cfg = sample_poisson(1.0, Region::square(2.0), s.with_replica(r), true);
    RandomStream rs(s.with_replica(r).with_purpose("x"));
    const Point2 x{rs.uniform(-2, 2), rs.uniform(-2, 2)};
    const double base = F(cfg);
    EXPECT_LE(F(add_point(cfg, {x, -1})), base);
    EXPECT_GE(F(add_point(cfg, {x, 1})), base);
  }
}
