#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "percospec/experiments/alpha.hpp"
#include "percospec/experiments/hoeffding_suite.hpp"
#include "percospec/experiments/noise.hpp"
#include "percospec/experiments/quasimult.hpp"

using namespace percospec;

TEST(NoiseCurve, TimeZeroAndCounts) {
  const std::vector<double> ts{0.0, 0.05, 50.0};
  const auto c = noise_curve(Model::boolean, DynamicsKind::ou, 4.0, ts, 256, SeedSpec(1, "nc"), 1, 0.2);
  ASSERT_EQ(c.points.size(), 3u);
  EXPECT_EQ(c.points[0].p_differ.estimate, 0.0);
  EXPECT_EQ(c.points[0].cov.estimate, c.variance.estimate);
  EXPECT_EQ(c.base_evaluations, 256u);
  EXPECT_EQ(c.evolved_evaluations, 256u * 3u);
  EXPECT_NEAR(c.points[2].cov.estimate, 0.0, 3.0 * c.points[2].cov.stderr + 1e-12);
  EXPECT_DOUBLE_EQ(c.points[1].u, 0.05 * 16.0 * 0.2);
  for (const auto& p : c.points) {
    EXPECT_GE(p.p_differ.estimate, 0.0);
    EXPECT_LE(p.p_differ.estimate, 1.0);
  }
  EXPECT_LE(c.points[1].p_differ.estimate, c.points[2].p_differ.estimate + 3.0 * c.points[2].p_differ.stderr);
}

TEST(NoiseCurve, Validation) {
  const SeedSpec s(2, "v");
  EXPECT_THROW(noise_curve(Model::boolean, DynamicsKind::frozen, 4.0, {0.1}, 64, s), UsageError);
  EXPECT_THROW(noise_curve(Model::boolean, DynamicsKind::ou, 4.0, {}, 64, s), ParameterError);
  EXPECT_THROW(noise_curve(Model::boolean, DynamicsKind::ou, 4.0, {-1.0}, 64, s), ParameterError);
  EXPECT_THROW(noise_curve(Model::boolean, DynamicsKind::ou, 4.0, {0.1}, 8, s), ParameterError);
  EXPECT_THROW(parse_model("ising"), ParameterError);
  EXPECT_THROW(parse_dynamics("glauber"), ParameterError);
}

TEST(NoiseCurve, VoronoiFrozenAndThreads) {
  const std::vector<double> ts{0.0, 0.3};
  const auto a = noise_curve(Model::voronoi, DynamicsKind::frozen, 3.0, ts, 64, SeedSpec(3, "vf"), 1);
  const auto b = noise_curve(Model::voronoi, DynamicsKind::frozen, 3.0, ts, 64, SeedSpec(3, "vf"), 3);
  EXPECT_EQ(a.points[0].p_differ.estimate, 0.0);
  EXPECT_EQ(a.points[0].cov.estimate, a.variance.estimate);
  EXPECT_EQ(a.points[1].p_differ.estimate, b.points[1].p_differ.estimate);
  EXPECT_EQ(a.points[1].cov.estimate, b.points[1].cov.estimate);
  EXPECT_EQ(a.evolved_evaluations, 128u);
}

TEST(OuVsFrozen, TimeZeroEqualsVariance) {
  const auto rows = ou_vs_frozen_covariance(3.0, {0.0, 0.5}, 64, SeedSpec(4, "of"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].cov_ou.estimate, rows[0].cov_frozen.estimate);
  EXPECT_EQ(rows[0].paired_difference.estimate, 0.0);
  EXPECT_TRUE(rows[0].ou_not_above());
}

TEST(Mehler, RatioAndErrors) {
  EstimatorResult g;
  g.estimate = 5.0;
  g.stderr = 0.1;
  const auto m = mehler_slope(4.0, g, 0.1, 512, SeedSpec(5, "m"));
  EXPECT_DOUBLE_EQ(m.t_star, 0.02);
  EXPECT_DOUBLE_EQ(m.ratio, 2.0 * m.p_differ.estimate / 0.1);
  EXPECT_GT(m.stderr, 0.0);
  g.estimate = 0.0;
  EXPECT_THROW(mehler_slope(4.0, g, 0.1, 512, SeedSpec(5, "m")), NormalizationError);
}

TEST(Collapse, Shape) {
  const auto r = instability_collapse({3.0, 4.0, 5.0}, {0.3, 0.25, 0.2}, {0.01, 1.0}, 64, SeedSpec(6, "c"));
  EXPECT_EQ(r.rows.size(), 6u);
  ASSERT_EQ(r.spread.size(), 2u);
  for (double s : r.spread) EXPECT_GE(s, 0.0);
  EXPECT_DOUBLE_EQ(r.rows[1].t, 1.0 / (9.0 * 0.3));
  EXPECT_THROW(instability_collapse({3.0, 4.0}, {0.3, 0.2}, {1.0}, 64, SeedSpec(6, "c")), ParameterError);
  EXPECT_THROW(instability_collapse({3.0, 4.0, 5.0}, {0.3, 0.0, 0.2}, {1.0}, 64, SeedSpec(6, "c")), NormalizationError);
}

namespace {

EstimatorResult fixed(double v, double se = 0.0) {
  EstimatorResult e;
  e.estimate = v;
  e.stderr = se;
  return e;
}

}  // namespace

TEST(Quasimult, DiagonalIsOne) {
  const AlphaProvider alpha = [](double r, double R, std::size_t) { return fixed(std::pow(r / R, 1.25), 0.0); };
  const auto t = quasimult_table(alpha, {{2.0, 2.0, 16.0}, {1.0, 4.0, 32.0}}, 100, 100);
  EXPECT_DOUBLE_EQ(t.rows[0].ratio, 1.0);
  // power law: exactly multiplicative
  EXPECT_NEAR(t.rows[1].ratio, 1.0, 1e-12);
  EXPECT_TRUE(t.within_band(4.0));
  EXPECT_TRUE(t.rows[1].has_independence);
  EXPECT_TRUE(t.rows[1].independence_holds());
}

TEST(Quasimult, DoublesUntilPrecise) {
  std::vector<std::size_t> asked;
  const AlphaProvider alpha = [&](double, double, std::size_t n) {
    asked.push_back(n);
    return fixed(0.1, 0.1 * 400.0 / static_cast<double>(n));
  };
  quasimult_table(alpha, {{1.0, 1.0, 8.0}}, 100, 10000);
  EXPECT_EQ(asked, (std::vector<std::size_t>{100, 200, 400, 800, 1600, 3200}));
}

TEST(Quasimult, Errors) {
  const AlphaProvider zero = [](double, double, std::size_t) { return fixed(0.0); };
  EXPECT_THROW(quasimult_table(zero, {{1.0, 2.0, 8.0}}, 100, 400), NormalizationError);
  const AlphaProvider one = [](double, double, std::size_t) { return fixed(1.0); };
  EXPECT_THROW(quasimult_table(one, {{4.0, 2.0, 8.0}}, 100, 400), ParameterError);
  EXPECT_THROW(quasimult_table(one, {}, 100, 400), ParameterError);
}

TEST(Quasimult, BandFails) {
  const AlphaProvider alpha = [](double r, double R, std::size_t) {
    return fixed(R == 32.0 && r == 4.0 ? 0.5 : (R == 32.0 && r == 8.0 ? 0.01 : 0.1));
  };
  const auto t = quasimult_table(alpha, {{1.0, 4.0, 32.0}, {1.0, 8.0, 32.0}}, 100, 100);
  EXPECT_FALSE(t.within_band(4.0));
}

TEST(AlphaCache, RoundTripAndEnv) {
  const auto dir = std::filesystem::temp_directory_path() / "percospec-cache-test";
  std::filesystem::remove_all(dir);
  ::setenv("PERCOSPEC_CACHE_DIR", dir.c_str(), 1);
  EXPECT_EQ(default_cache_dir(), dir);
  AlphaCache cache;
  AlphaKey key;
  key.r = 1.0;
  key.R = 4.0;
  key.seed_family = 9;
  EXPECT_FALSE(cache.lookup(key).has_value());
  const auto a = cached_alpha(cache, key, 200);
  EXPECT_TRUE(std::filesystem::exists(cache.file()));
  const auto b = cached_alpha(cache, key, 150);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.stderr, b.stderr);
  EXPECT_EQ(b.n, 200u);
  const auto c = cached_alpha(cache, key, 400);
  EXPECT_EQ(c.n, 400u);
  EXPECT_EQ(cache.lookup(key)->n, 400u);
  AlphaKey other = key;
  other.model = Model::voronoi;
  EXPECT_FALSE(cache.lookup(other).has_value());
  ::unsetenv("PERCOSPEC_CACHE_DIR");
  std::filesystem::remove_all(dir);
}

TEST(AlphaCache, EstimatorMatchesDirect) {
  AlphaKey key;
  key.r = 1.0;
  key.R = 3.0;
  const auto e = estimate_arm(Model::boolean, key.spec(), key.lambda, 0.0, 200, key.seed());
  const auto d = estimate_arm_probability(arms::four_arm(1.0, 3.0), key.lambda, 200, key.seed());
  EXPECT_EQ(e.estimate, d.estimate);
  EXPECT_THROW(estimate_arm(Model::voronoi, key.spec(), 1.0, 0.1, 200, key.seed()), UsageError);
  EXPECT_THROW(estimate_arm(Model::boolean, key.spec(), 1.0, -0.1, 200, key.seed()), ParameterError);
}

TEST(HoeffdingSuite, SmallRun) {
  const auto r = run_hoeffding_suite(4, 10, SeedSpec(10, "hs"), 1, 24);
  EXPECT_EQ(r.cubes.functions, 24u);
  EXPECT_TRUE(r.identities_exact());
  EXPECT_TRUE(r.loose_bound_pass());
  ASSERT_EQ(r.correlations.size(), 2u);
  for (const auto& c : r.correlations) EXPECT_EQ(c.replicas, 10u);
}
