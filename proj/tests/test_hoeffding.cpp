#include <gtest/gtest.h>

#include <cmath>

#include "percospec/hoeffding/correlations.hpp"
#include "percospec/hoeffding/cube.hpp"
#include "percospec/hoeffding/samples.hpp"

using namespace percospec;

namespace {

std::vector<double> random_boolean(unsigned n, RandomStream& rs) {
  std::vector<double> v(std::size_t{1} << n);
  for (auto& x : v) x = rs.sign();
  return v;
}

}  // namespace

TEST(Hoeffding, SmallCases) {
  const std::vector<double> eps{1, -1};
  const auto t1 = hoeffding_decompose(eps);
  EXPECT_EQ(t1[0], 0.0);
  EXPECT_EQ(t1[1], 1.0);
  const std::vector<double> both{1, -1, -1, -1};
  const auto t2 = hoeffding_decompose(both);
  EXPECT_EQ(t2[0], -0.5);
  EXPECT_EQ(t2[1], 0.5);
  EXPECT_EQ(t2[2], 0.5);
  EXPECT_EQ(t2[3], 0.5);
  EXPECT_THROW(hoeffding_decompose(std::vector<double>(3)), UsageError);
}

TEST(Hoeffding, ParsevalAndReconstruction) {
  RandomStream rs(SeedSpec(1, "parseval"));
  for (unsigned n = 1; n <= 12; ++n) {
    const auto g = random_boolean(n, rs);
    const auto t = hoeffding_decompose(g);
    EXPECT_NEAR(t.energy(), mean_square(g), 1e-10);
    const auto back = t.reconstruct();
    for (std::size_t m = 0; m < g.size(); ++m) ASSERT_NEAR(back[m], g[m], 1e-10);
    if (n <= 8) {
      const auto d = hoeffding_decompose_direct(g);
      for (std::size_t S = 0; S < g.size(); ++S) ASSERT_NEAR(d[S], t[S], 1e-12);
    }
  }
}

TEST(Hoeffding, Orthogonality) {
  const unsigned n = 6;
  for (std::uint32_t S = 0; S < 64; ++S) {
    for (std::uint32_t T = 0; T < 64; ++T) {
      double s = 0;
      for (std::uint32_t m = 0; m < 64; ++m) s += character(S, m) * character(T, m);
      EXPECT_EQ(s, S == T ? 64.0 : 0.0);
    }
  }
  (void)n;
}

TEST(Hoeffding, QOperator) {
  RandomStream rs(SeedSpec(2, "q"));
  const auto g = random_boolean(5, rs);
  for (unsigned t = 0; t < 5; ++t) {
    const auto q1 = cube::q(g, t);
    EXPECT_EQ(cube::max_abs_diff(cube::q(q1, t), q1), 0.0);
    for (double v : cube::i_minus_q(q1, t)) EXPECT_EQ(v, 0.0);
  }
}

TEST(Hoeffding, ProjectionIdentities) {
  RandomStream rs(SeedSpec(3, "ident"));
  for (int trial = 0; trial < 50; ++trial) {
    const unsigned n = 1 + static_cast<unsigned>(trial % 6);
    const auto g = random_boolean(n, rs);
    EXPECT_LE(projection_identity_error(g), 1e-12);
    EXPECT_LE(alternating_sum_error(g), 1e-12);
  }
}

TEST(Hoeffding, VanishingCoefficients) {
  RandomStream rs(SeedSpec(4, "quinn"));
  for (int trial = 0; trial < 30; ++trial) {
    const unsigned n = 6;
    const std::uint32_t J0 = static_cast<std::uint32_t>(rs.below(64));
    const auto h = random_boolean(6, rs);
    std::vector<double> g(64);
    for (std::uint32_t m = 0; m < 64; ++m) g[m] = h[m & J0];
    EXPECT_EQ((cube::dependence_set(g) & ~J0), 0u);
    EXPECT_EQ(vanishing_coefficient_error(g), 0.0);
    (void)n;
  }
  // geometric case: a point far outside the support
  const auto F = functionals::framed_voronoi_crossing(1.0);
  PointConfiguration cfg(Region::square(4.0), true);
  cfg.push({{0.2, 0.1}, 1});
  cfg.push({{-0.7, 0.4}, 1});
  cfg.push({{3.5, 3.5}, 1});
  const auto g = tabulate(F.bind(cfg), 3);
  EXPECT_EQ(cube::dependence_set(g) & 4u, 0u);
  EXPECT_EQ(hoeffding_decompose(g)[7], 0.0);
}

TEST(Hoeffding, FunctionalDecomposition) {
  const auto F = functionals::framed_voronoi_crossing(1.0);
  const auto cfg = sample_poisson(1.0, Region::square(2.0), SeedSpec(5, "fd"), true);
  ASSERT_LE(cfg.size(), 20u);
  const auto t = hoeffding_decompose(F, cfg);
  EXPECT_NEAR(t.energy(), 1.0, 1e-12);
}

TEST(Correlations, ConstantVanishes) {
  const auto F = functionals::constant(1.0);
  const auto eta = sample_background({Region::square(2.0), 1.0, 6, 12}, SeedSpec(6, "c"));
  const std::vector<Point2> xy{{0.1, 0.2}, {0.5, -0.3}};
  const auto t = difference_correlations(F, eta, xy);
  EXPECT_EQ(t.psi, 0.0);
  EXPECT_EQ(t.phi, 0.0);
  EXPECT_EQ(t.sum_ez2(), 0.0);
}

TEST(Correlations, PerReplicaIdentities) {
  const SeedSpec seed(7, "corr");
  const BackgroundLaw law{Region::square(2.0), 1.0, 8, 12};
  for (const auto& F : {functionals::framed_voronoi_crossing(1.0), functionals::marked_boolean_crossing(1.0)}) {
    int nontrivial = 0;
    for (int r = 0; r < 30; ++r) {
      const auto eta = sample_background(law, seed.with_replica(r));
      RandomStream rs(seed.with_replica(r).with_purpose("xy"));
      const Point2 x{rs.uniform(-1.2, 1.2), rs.uniform(-1.2, 1.2)};
      const Point2 y{rs.uniform(-1.2, 1.2), rs.uniform(-1.2, 1.2)};
      const auto one = difference_correlations(F, eta, std::span<const Point2>(&x, 1));
      EXPECT_EQ(one.phi, 2.0 * one.psi) << F.name();
      EXPECT_LE(one.max_psi_excess, 0.0);
      const std::vector<Point2> xy{x, y};
      const auto two = difference_correlations(F, eta, xy);
      EXPECT_LE(two.psi, two.phi);
      EXPECT_NEAR(two.psi, two.ez2[0], 1e-12);
      EXPECT_NEAR(two.phi, two.sum_ez2(), 1e-12);
      nontrivial += two.phi > 0;
    }
    EXPECT_GT(nontrivial, 0) << F.name();
  }
}

TEST(Correlations, BooleanZ1TakesTwoValues) {
  const auto F = functionals::marked_boolean_crossing(1.0);
  const SeedSpec seed(8, "z1");
  for (int r = 0; r < 20; ++r) {
    auto eta = sample_background({Region::square(2.0), 1.0, 6, 12}, seed.with_replica(r));
    const std::vector<Point2> xy{{0.3, 0.1}, {-0.4, -0.2}};
    // Z1^2 averaged over marks lies on the lattice (1/4)/2^n
    const auto t = difference_correlations(F, eta, xy);
    const double scaled = t.ez2[0] * 4.0 * static_cast<double>(t.mark_vectors);
    EXPECT_EQ(scaled, std::round(scaled));
    EXPECT_EQ(t.lemma_violations, 0u);
  }
}

TEST(Correlations, SecondOrderBoundConstant) {
  // Z_2 = Z_3 = Z_1 and Z_4 = 3 Z_1 can happen off E u E, so 12 is the constant that always works
  const auto F = functionals::framed_voronoi_crossing(1.0);
  const SeedSpec seed = SeedSpec(3, "x").with_purpose("functional").with_sub(0);
  const BackgroundLaw law{Region::square(2.0), 1.0, 10, 12};
  const auto eta = sample_background(law, seed.with_replica(52));
  RandomStream rs(seed.with_replica(52).with_purpose("xy"));
  const Point2 x{rs.uniform(-1.2, 1.2), rs.uniform(-1.2, 1.2)};
  const Point2 y{rs.uniform(-1.2, 1.2), rs.uniform(-1.2, 1.2)};
  const std::vector<Point2> xy{x, y};
  const auto t = difference_correlations(F, eta, xy);
  EXPECT_EQ(t.event_prob, 0.0);
  EXPECT_GT(t.phi, 9.0 * t.psi);
  EXPECT_LE(t.phi, 12.0 * t.psi);
  EXPECT_GT(t.lemma_violations, 0u);
  EXPECT_EQ(t.loose_lemma_violations, 0u);
  EXPECT_EQ(t.case_table_violations, 0u);
}

TEST(Annealed, Degenerate) {
  const BackgroundLaw law{Region::square(1.0), 1.0, 1, 12};
  const auto one = sample_annealed_spectral_sample(functionals::constant(1.0), law, 20, SeedSpec(9, "a"));
  EXPECT_EQ(one.size_histogram.size(), 1u);
  EXPECT_EQ(one.mean_size.estimate, 0.0);
  const auto eps = sample_annealed_spectral_sample(functionals::majority(Rect{-1, 1, -1, 1}), law, 20, SeedSpec(9, "b"));
  EXPECT_EQ(eps.mean_size.estimate, 1.0);
  EXPECT_EQ(eps.size_histogram[1], 1.0);
}

TEST(Annealed, AnnealedBelowProjected) {
  const BackgroundLaw law{Region::square(2.0), 1.0, 0, 10};
  const auto s = sample_annealed_spectral_sample(functionals::framed_voronoi_crossing(1.0), law, 300, SeedSpec(10, "ap"));
  EXPECT_LE(s.mean_size_exact.estimate, s.mean_projected.estimate);
  EXPECT_NEAR(s.mean_size.estimate, s.mean_size_exact.estimate,
              4 * std::hypot(s.mean_size.stderr, s.mean_size_exact.stderr) + 1e-9);
}

TEST(Factor, FirstOrderHalf) {
  const auto F = functionals::voronoi_crossing(2.0);
  const auto c = pivotal_quenched_counts(F, Region::square(2.0), 1.0, 400, SeedSpec(11, "factor"));
  const auto e = pivotal_vs_quenched_factor(c, 1);
  EXPECT_NEAR(e.estimate, 0.5, 4 * e.stderr + 1e-9);
  EXPECT_THROW(pivotal_vs_quenched_factor(c, 3), ParameterError);
}

TEST(Factor, MarkIndependentIsZero) {
  const auto F = functionals::occupancy(Rect{-1, 1, -1, 1});
  EXPECT_THROW(pivotal_quenched_counts(F, Region::square(1.0), 1.0, 10, SeedSpec(12, "x")), UsageError);
}
