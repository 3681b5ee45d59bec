#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "percospec/core/sampling.hpp"
#include "percospec/voronoi/connectivity.hpp"
#include "percospec/voronoi/delaunay.hpp"
#include "percospec/voronoi/predicates.hpp"

using namespace percospec;

namespace {

std::vector<Point2> random_points(std::size_t n, double side, std::uint64_t key) {
  RandomStream rs(SeedSpec(key, "points"));
  std::vector<Point2> v(n);
  for (auto& p : v) p = {rs.uniform(0, side), rs.uniform(0, side)};
  return v;
}

PointConfiguration colored(std::initializer_list<std::pair<Point2, int>> l, double L) {
  PointConfiguration cfg(Region::square(L), true);
  for (const auto& [p, m] : l) cfg.push({p, m});
  return cfg;
}

}  // namespace

TEST(Predicates, ExactOnNearDegenerateInput) {
  const Point2 a{0.5, 0.5}, b{12.0, 12.0}, c{24.0, 24.0};
  EXPECT_EQ(predicates::orient(a, b, c), 0);
  const Point2 d{0.5 + std::ldexp(1.0, -52), 0.5};
  EXPECT_EQ(predicates::orient(a, b, d), -1);
  EXPECT_EQ(predicates::incircle({0, 0}, {1, 0}, {0, 1}, {1, 1}), 0);
  EXPECT_EQ(predicates::incircle({0, 0}, {1, 0}, {0, 1}, {0.5, 0.5}), 1);
  EXPECT_EQ(predicates::incircle({0, 0}, {1, 0}, {0, 1}, {2, 2}), -1);
}

TEST(Delaunay, SmallCases) {
  const std::vector<Point2> tri{{0, 0}, {1, 0}, {0, 1}};
  DelaunayTriangulation dt(tri);
  EXPECT_EQ(dt.triangles().size(), 1u);
  EXPECT_EQ(dt.edges().size(), 3u);

  const std::vector<Point2> quad{{0, 0}, {2, 0}, {2, 1}, {0, 1.2}};
  DelaunayTriangulation dq(quad);
  EXPECT_EQ(dq.triangles().size(), 2u);
  EXPECT_EQ(dq.edges().size(), 5u);

  const std::vector<Point2> line{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  DelaunayTriangulation dl(line);
  EXPECT_TRUE(dl.triangles().empty());
  EXPECT_EQ(dl.edges().size(), 3u);
}

TEST(Delaunay, EmptyCircumcircle) {
  const auto pts = random_points(1000, 30.0, 7);
  DelaunayTriangulation dt(pts);
  const auto tris = dt.triangles();
  // Euler: 2n - 2 - h triangles.
  EXPECT_GT(tris.size(), 1900u);
  EXPECT_LT(tris.size(), 1999u);
  for (const auto& t : tris) {
    const Point2 a = pts[static_cast<std::size_t>(t[0])], b = pts[static_cast<std::size_t>(t[1])],
                 c = pts[static_cast<std::size_t>(t[2])];
    ASSERT_EQ(predicates::orient(a, b, c), 1);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (static_cast<std::int32_t>(j) == t[0] || static_cast<std::int32_t>(j) == t[1] ||
          static_cast<std::int32_t>(j) == t[2])
        continue;
      ASSERT_LE(predicates::incircle(a, b, c, pts[j]), 0);
    }
  }
}

TEST(Delaunay, CocircularGrid) {
  std::vector<Point2> pts;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) pts.push_back({double(i), double(j)});
  DelaunayTriangulation dt(pts);
  EXPECT_EQ(dt.triangles().size(), 2u * 49u);
}

TEST(Voronoi, CellsMatchNearestSite) {
  const auto pts = random_points(400, 20.0, 11);
  VoronoiDiagram vd(pts, Rect{0, 20, 0, 20});
  RandomStream rs(SeedSpec(3, "test"));
  int checked = 0;
  for (int q = 0; q < 10000; ++q) {
    const Point2 x{rs.uniform(5, 15), rs.uniform(5, 15)};
    const auto i = vd.nearest_site(x);
    const auto& c = vd.cell(i);
    // x lies in the convex polygon of its nearest site
    bool inside = true;
    for (std::size_t k = 0; k < c.vertices.size(); ++k) {
      const auto e = c.edge(k);
      if (cross(e.b - e.a, x - e.a) < -1e-9) inside = false;
    }
    EXPECT_TRUE(inside);
    ++checked;
  }
  EXPECT_EQ(checked, 10000);
}

TEST(Voronoi, BoundaryWalkMatchesBruteForce) {
  const auto pts = random_points(400, 20.0, 13);
  VoronoiDiagram vd(pts, Rect{0, 20, 0, 20});
  RandomStream rs(SeedSpec(5, "test"));
  for (int trial = 0; trial < 40; ++trial) {
    const Segment s{{rs.uniform(6, 14), rs.uniform(6, 14)}, {rs.uniform(6, 14), rs.uniform(6, 14)}};
    const auto walk = vd.boundary_cell_walk(s);
    std::vector<std::int32_t> brute;
    for (int k = 0; k <= 10000; ++k) {
      const double t = k / 10000.0;
      const auto i = vd.nearest_site(s.a + (s.b - s.a) * t);
      if (brute.empty() || brute.back() != i) brute.push_back(i);
    }
    const std::set<std::int32_t> ws(walk.begin(), walk.end());
    for (auto i : brute) EXPECT_TRUE(ws.count(i)) << "trial " << trial;
    EXPECT_EQ(walk.front(), brute.front());
    EXPECT_EQ(walk.back(), brute.back());
  }
}

TEST(Voronoi, UncertifiedCellThrows) {
  const auto pts = random_points(100, 10.0, 17);
  VoronoiDiagram vd(pts, Rect{0, 10, 0, 10});
  const auto corner = vd.nearest_site({0.01, 0.01});
  EXPECT_THROW(vd.cell(corner), PaddingError);
  EXPECT_THROW(vd.boundary_cell_walk({{-1, 1}, {2, 2}}), PaddingError);
}

TEST(VoronoiCrossing, Monochrome) {
  const auto base = sample_poisson(1.0, Region::square(12.0), SeedSpec(21, "test"), true);
  PointConfiguration black(base.window(), true), white(base.window(), true);
  for (const auto& p : base.points()) {
    black.push_unchecked(MarkedPoint{p.loc, 1});
    white.push_unchecked(MarkedPoint{p.loc, -1});
  }
  const Region box = Region::square(4.0);
  EXPECT_TRUE(voronoi_crossing(black, box, 1, Axis::LR));
  EXPECT_FALSE(voronoi_crossing(black, box, -1, Axis::TB));
  EXPECT_FALSE(voronoi_crossing(white, box, 1, Axis::LR));
  EXPECT_TRUE(voronoi_crossing(white, box, -1, Axis::TB));
}

TEST(VoronoiCrossing, DualityAndColorSwap) {
  const Region box = Region::square(4.0);
  int black_lr = 0;
  const int n = 300;
  for (int r = 0; r < n; ++r) {
    const bool blr = on_voronoi_sample(box, SeedSpec(23, "test").with_replica(r),
                                       [&](VoronoiDiagram& vd, std::vector<int>& marks, const auto&) {
      const bool b = voronoi_crossing(vd, marks, box, 1, Axis::LR);
      EXPECT_NE(b, voronoi_crossing(vd, marks, box, -1, Axis::TB)) << "replica " << r;
      for (auto& m : marks) m = -m;
      EXPECT_EQ(voronoi_crossing(vd, marks, box, -1, Axis::LR), b);
      return b;
    });
    black_lr += blr;
  }
  EXPECT_NEAR(black_lr / double(n), 0.5, 4.0 * std::sqrt(0.25 / n));
}

TEST(VoronoiArms, HandBuilt) {
  // A black spoke through a white sea.
  auto cfg = colored({}, 16.0);
  for (int i = -7; i <= 7; ++i)
    for (int j = -7; j <= 7; ++j) cfg.push({{i + 0.1 * (j % 3), double(j) + 0.05 * (i % 2)}, (j == 0 && i > 0) ? 1 : -1});
  const auto one = arms::one_arm(1.0, 5.0);
  EXPECT_TRUE(voronoi_arm_event(cfg, one));
  const auto four = arms::four_arm(1.0, 5.0);
  EXPECT_FALSE(voronoi_arm_event(cfg, four));
}

TEST(VoronoiArms, EstimatorRuns) {
  const auto r = estimate_voronoi_arm_probability(arms::one_arm(1.0, 4.0), 100, SeedSpec(29, "test"));
  EXPECT_GT(r.estimate, 0.2);
  EXPECT_LT(r.estimate, 1.0);
  EXPECT_THROW(estimate_voronoi_arm_probability(arms::one_arm(1.0, 4.0), 10, SeedSpec{}), ParameterError);
}
