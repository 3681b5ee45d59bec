#include <gtest/gtest.h>

#include <cmath>

#include "percospec/spectral/moments.hpp"

using namespace percospec;

TEST(Intensity, ConstantIsZeroBothWays) {
  const auto r = spectral_intensity_integral(functionals::constant(1.0), Region::square(2.0), 1.0, 64, SeedSpec(1, "c"));
  EXPECT_EQ(r.uniform_x.estimate, 0.0);
  EXPECT_EQ(r.mecke.estimate, 0.0);
  EXPECT_EQ(r.mean_f2.estimate, 1.0);
}

TEST(Intensity, ZeroFunctionalThrows) {
  EXPECT_THROW(spectral_intensity_integral(functionals::constant(0.0), Region::square(1.0), 1.0, 64, SeedSpec(1, "z")),
               NormalizationError);
  EXPECT_THROW(spectral_intensity_integral(functionals::constant(1.0), Region::square(1.0), 1.0, 8, SeedSpec(1, "z")),
               ParameterError);
  EXPECT_THROW(spectral_intensity_integral(functionals::marked_boolean_crossing(1.0), Region::square(2.0), 1.0, 64,
                                           SeedSpec(1, "z")),
               UsageError);
}

TEST(Intensity, OccupancyClosedForm) {
  // both routes equal 4 lam |B| exp(-lam |B|)
  const Rect B = Rect::centered({0, 0}, 0.5, 0.5);
  const double lam = 1.5;
  const double exact = 4.0 * lam * 1.0 * std::exp(-lam);
  const auto r = spectral_intensity_integral(functionals::occupancy(B), Region::square(1.0), lam, 4000, SeedSpec(2, "occ"), 1, 4);
  EXPECT_NEAR(r.uniform_x.estimate, exact, 4.0 * r.uniform_x.stderr);
  EXPECT_NEAR(r.mecke.estimate, exact, 4.0 * r.mecke.stderr);
  EXPECT_LT(r.discrepancy, 4.0);
}

TEST(Intensity, CountClosedForm) {
  // D_x F = 1 on B: lam |B| / (lam |B| + (lam |B|)^2) by both routes
  const Rect B = Rect::centered({0, 0}, 0.5, 0.5);
  const double lam = 2.0;
  const double exact = 1.0 / (1.0 + lam);
  const auto r = spectral_intensity_integral(functionals::count_in(B), Region::square(1.0), lam, 4000, SeedSpec(3, "cnt"), 1, 4);
  EXPECT_NEAR(r.uniform_x.estimate, exact, 4.0 * r.uniform_x.stderr);
  EXPECT_NEAR(r.mecke.estimate, exact, 4.0 * r.mecke.stderr);
}

TEST(Intensity, ThreadInvariant) {
  const auto F = functionals::boolean_crossing(3.0);
  const auto a = spectral_intensity_integral(F, Region::square(4.0), kLambdaCritical, 64, SeedSpec(4, "t"), 1, 2);
  const auto b = spectral_intensity_integral(F, Region::square(4.0), kLambdaCritical, 64, SeedSpec(4, "t"), 3, 2);
  EXPECT_EQ(a.uniform_x.estimate, b.uniform_x.estimate);
  EXPECT_EQ(a.mecke.estimate, b.mecke.estimate);
  EXPECT_EQ(a.mecke.stderr, b.mecke.stderr);
}

TEST(PaleyZygmund, Cases) {
  EstimatorResult m1, m2;
  m1.estimate = 2.0;
  m2.estimate = 4.0;
  EXPECT_DOUBLE_EQ(paley_zygmund_lower_bound(m1, m2, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(paley_zygmund_lower_bound(m1, m2, 0.0), 1.0);
  m2.estimate = 8.0;
  EXPECT_DOUBLE_EQ(paley_zygmund_lower_bound(m1, m2, 0.0), 0.5);
  m2.estimate = 0.0;
  EXPECT_THROW(paley_zygmund_lower_bound(m1, m2, 0.5), NormalizationError);
  m2.estimate = 1.0;
  EXPECT_THROW(paley_zygmund_lower_bound(m1, m2, 1.0), ParameterError);
}

TEST(SecondMoment, OccupancyOrdering) {
  const Rect B = Rect::centered({0, 0}, 0.5, 0.5);
  const auto r = second_moment_bound_check(functionals::occupancy(B), Region::square(0.5), 1.0, Region::square(1.0), 2000,
                                           SeedSpec(5, "sm"));
  ASSERT_TRUE(r.ratio.has_value());
  EXPECT_GE(r.m2.estimate, r.m1.estimate);
  EXPECT_GE(*r.ratio, 1.0 / r.m1.estimate - 1e-12);
  EXPECT_THROW(second_moment_bound_check(functionals::count_in(B), Region::square(0.5), 1.0, Region::square(1.0), 64,
                                         SeedSpec(5, "sm")),
               UsageError);
}

TEST(SecondDifference, ScanRuns) {
  std::vector<EstimatorResult> a4(2);
  a4[0].estimate = 0.3;
  a4[1].estimate = 0.2;
  const auto rows = second_difference_scan(6.0, {4.0, 6.0}, 64, SeedSpec(6, "sd"), a4);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_GE(r.value.estimate, 0.0);
    EXPECT_LE(r.value.estimate, 16.0);
  }
  EXPECT_THROW(second_difference_scan(6.0, {2.0}, 64, SeedSpec(6, "sd"), {a4[0]}), ParameterError);
}
