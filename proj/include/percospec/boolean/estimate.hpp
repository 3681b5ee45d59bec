#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "percospec/boolean/occupied.hpp"
#include "percospec/core/parallel.hpp"
#include "percospec/core/sampling.hpp"
#include "percospec/core/stats.hpp"

namespace percospec {

inline constexpr double kLambdaCritical = 0.359072;
inline constexpr double kBooleanPad = 2.0;

/// Fraction of replicas realising `spec`, points sampled in the region's box enlarged by `pad`.
inline EstimatorResult estimate_arm_probability(const ArmEventSpec& spec, double lambda, std::size_t n_replicas,
                                                const SeedSpec& seed, unsigned threads = 1,
                                                double pad = kBooleanPad) {
  if (n_replicas < 100) throw ParameterError("estimate_arm_probability needs n_replicas >= 100");
  spec.validate();
  Stopwatch sw;
  const Region window = spec.region.padded(pad);
  const auto hits = parallel_map(n_replicas, threads, [&](std::size_t i) -> char {
    const auto cfg = sample_poisson(lambda, window, seed.with_replica(i));
    return arm_event(cfg.view(), spec) ? 1 : 0;
  });
  std::uint64_t s = 0;
  for (char h : hits) s += static_cast<std::uint64_t>(h);
  EstimatorResult r = bernoulli_estimate(s, n_replicas);
  r.seed = seed;
  r.meta = "boolean arm " + spec.pattern;
  r.wall_seconds = sw.seconds();
  return r;
}

/// P(occupied LR crossing of W_L) at intensity lambda.
inline EstimatorResult estimate_crossing_probability(double L, double lambda, std::size_t n_replicas,
                                                     const SeedSpec& seed, unsigned threads = 1,
                                                     double pad = kBooleanPad) {
  if (n_replicas == 0) throw ParameterError("n_replicas must be >= 1");
  Stopwatch sw;
  const Region box = Region::square(L);
  const Region window = box.padded(pad);
  const auto hits = parallel_map(n_replicas, threads, [&](std::size_t i) -> char {
    const auto cfg = sample_poisson(lambda, window, seed.with_replica(i));
    return occupied_crossing(cfg.view(), box, Axis::LR) ? 1 : 0;
  });
  std::uint64_t s = 0;
  for (char h : hits) s += static_cast<std::uint64_t>(h);
  EstimatorResult r = bernoulli_estimate(s, n_replicas);
  r.seed = seed;
  r.meta = "boolean crossing";
  r.wall_seconds = sw.seconds();
  return r;
}

struct CalibrationResult {
  double lambda = kLambdaCritical;
  std::vector<double> probed;       // midpoints visited by the bisection
  std::vector<double> gap;          // P(L_max) - P(L_min) at each probe
  bool skipped = false;
};

/*
 * Finite-size crossing matching: bisect on lambda for the point where the probability of an LR
 * crossing of [0, 2L] x [0, L] is the same at the smallest and the largest L. All probes reuse
 * one thinned point cloud per replica, so the gap is monotone in lambda on a fixed sample.
 */
inline CalibrationResult calibrate_lambda_c(const std::vector<double>& L_list, double tolerance, const SeedSpec& seed,
                                            std::size_t n_replicas = 400, unsigned threads = 1, double lo = 0.25,
                                            double hi = 0.5) {
  if (L_list.size() < 3) throw ParameterError("calibrate_lambda_c needs at least 3 values of L");
  if (!std::is_sorted(L_list.begin(), L_list.end()) ||
      std::adjacent_find(L_list.begin(), L_list.end()) != L_list.end()) {
    throw ParameterError("calibrate_lambda_c needs ascending L values");
  }
  if (!(tolerance > 0.0) || !(lo < hi) || !(lo > 0.0)) throw ParameterError("calibrate_lambda_c: bad bracket");
  const double Lmin = L_list.front(), Lmax = L_list.back();
  auto cloud = [&](double L, std::size_t i, std::uint64_t tag) {
    const Region w = Region::rect({L, 0.5 * L}, L + kBooleanPad, 0.5 * L + kBooleanPad);
    auto cfg = sample_poisson(hi, w, seed.with_replica(i).with_sub(tag));
    RandomStream rs(seed.with_replica(i).with_sub(tag).with_purpose("thin"));
    std::vector<std::pair<double, MarkedPoint>> out;
    out.reserve(cfg.size());
    for (const auto& p : cfg.points()) out.push_back({rs.uniform() * hi, p});
    return out;
  };
  auto gap_at = [&](double lambda) {
    const auto diffs = parallel_map(n_replicas, threads, [&](std::size_t i) -> double {
      double d = 0.0;
      for (int which = 0; which < 2; ++which) {
        const double L = which == 0 ? Lmin : Lmax;
        const auto pts = cloud(L, i, static_cast<std::uint64_t>(which));
        std::vector<MarkedPoint> kept;
        for (const auto& [u, p] : pts) {
          if (u < lambda) kept.push_back(p);
        }
        const bool c = occupied_crossing(kept, Region::rect({L, 0.5 * L}, L, 0.5 * L), Axis::LR);
        d += (which == 0 ? -1.0 : 1.0) * (c ? 1.0 : 0.0);
      }
      return d;
    });
    double s = 0.0;
    for (double v : diffs) s += v;
    return s / static_cast<double>(n_replicas);
  };
  CalibrationResult res;
  const double g_lo = gap_at(lo), g_hi = gap_at(hi);
  if (!(g_lo < 0.0 && g_hi > 0.0)) throw CalibrationError("calibrate_lambda_c: bracket does not change sign");
  double a = lo, b = hi;
  while (b - a > tolerance) {
    const double mid = 0.5 * (a + b);
    const double g = gap_at(mid);
    res.probed.push_back(mid);
    res.gap.push_back(g);
    if (g < 0.0) {
      a = mid;
    } else {
      b = mid;
    }
  }
  res.lambda = 0.5 * (a + b);
  return res;
}

}  // namespace percospec
