#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "percospec/boolean/estimate.hpp"
#include "percospec/core/parallel.hpp"
#include "percospec/core/sampling.hpp"
#include "percospec/core/stats.hpp"
#include "percospec/difference/functional.hpp"
#include "percospec/difference/operators.hpp"

namespace percospec {

inline constexpr std::size_t kBatches = 32;

struct IntensityResult {
  EstimatorResult uniform_x;  // lambda * int E[(D_x F)^2] dx / E[F^2]
  EstimatorResult mecke;      // E[sum_{x in eta} (D^-_x F)^2] / E[F^2]
  EstimatorResult mean_f2;
  double discrepancy = 0.0;   // in combined stderr units
};

inline Region dependence_region(const Functional& F) {
  if (!F.traits().dependence) throw ParameterError("functional has no dependence window; pass one");
  const Rect d = *F.traits().dependence;
  return Region::rect({0.5 * (d.x0 + d.x1), 0.5 * (d.y0 + d.y1)}, 0.5 * d.width(), 0.5 * d.height());
}

/// Squared add-one cost with sign pruning for point-monotone Boolean functionals.
inline double squared_add_cost(const Functional& F, const PointConfiguration& eta, double base, const MarkedPoint& x) {
  if (F.boolean() && F.monotone() == Monotonicity::points && base > 0) return 0.0;
  if (eta.contains_location(x.loc)) return 0.0;
  const double d = F(add_point(eta, x)) - base;
  return d * d;
}

inline double squared_removal_sum(const Functional& F, const PointConfiguration& eta) {
  if (F.boolean()) return 4.0 * static_cast<double>(pivotal_points(F, eta).size());
  const double base = F(eta);
  double s = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (!F.affected_by(eta[i].loc)) continue;
    const double d = base - F(remove_point(eta, i));
    s += d * d;
  }
  return s;
}

/*
 * Two routes to the first spectral intensity over `window`: uniform x with a fresh sample per
 * draw (`draws` of them per replica), and the pivotal sum over the sample points of one more
 * sample. Unmarked functionals only.
 */
inline IntensityResult spectral_intensity_integral(const Functional& F, const Region& window, double lambda,
                                                   std::size_t n, const SeedSpec& seed, unsigned threads = 1,
                                                   std::size_t draws = 1) {
  if (n < kBatches) throw ParameterError("spectral_intensity_integral needs n >= 32");
  if (draws < 1) throw ParameterError("spectral_intensity_integral needs draws >= 1");
  if (F.marked()) throw UsageError("spectral_intensity_integral: unmarked functionals only");
  Stopwatch sw;
  const double mass = lambda * window.area();
  struct Rep {
    double ux, f2u, mk, f2m;
  };
  const auto reps = parallel_map(n, threads, [&](std::size_t i) {
    Rep r{};
    for (std::size_t j = 0; j < draws; ++j) {
      const SeedSpec su = seed.with_replica(i).with_purpose("uniform-x").with_sub(j);
      const auto eta = sample_poisson(lambda, window, su);
      RandomStream rs(su.with_purpose("x").with_sub(j));
      const MarkedPoint x{uniform_point(window, rs), 1};
      const double base = F(eta);
      r.f2u += base * base / static_cast<double>(draws);
      r.ux += mass * squared_add_cost(F, eta, base, x) / static_cast<double>(draws);
    }
    const auto eta2 = sample_poisson(lambda, window, seed.with_replica(i).with_purpose("mecke"));
    const double b2 = F(eta2);
    r.f2m = b2 * b2;
    r.mk = squared_removal_sum(F, eta2);
    return r;
  });
  std::vector<double> ux(n), f2u(n), mk(n), f2m(n);
  for (std::size_t i = 0; i < n; ++i) {
    ux[i] = reps[i].ux;
    f2u[i] = reps[i].f2u;
    mk[i] = reps[i].mk;
    f2m[i] = reps[i].f2m;
  }
  IntensityResult out;
  out.mean_f2 = batch_mean_estimate(f2u, kBatches);
  if (out.mean_f2.estimate <= 0.0) throw NormalizationError("spectral_intensity_integral: E[F^2] = 0");
  out.uniform_x = ratio_estimate(ux, f2u, kBatches);
  out.mecke = ratio_estimate(mk, f2m, kBatches);
  out.discrepancy = discrepancy_sigmas(out.uniform_x, out.mecke);
  for (auto* e : {&out.uniform_x, &out.mecke, &out.mean_f2}) {
    e->seed = seed;
    e->wall_seconds = sw.seconds();
  }
  out.uniform_x.meta = "uniform-x";
  out.mecke.meta = "mecke";
  return out;
}

struct SecondMomentResult {
  EstimatorResult m1;  // E|gamma n W|
  EstimatorResult m2;  // E|gamma n W|^2
  std::optional<double> ratio;  // M2 / M1^2, empty when M1 = 0
};

/// First and second moments of the spectral sample restricted to `sub`, for F with E[F^2] = 1.
inline SecondMomentResult second_moment_bound_check(const Functional& F, const Region& sub, double lambda,
                                                    const Region& window, std::size_t n, const SeedSpec& seed,
                                                    unsigned threads = 1) {
  if (n < kBatches) throw ParameterError("second_moment_bound_check needs n >= 32");
  if (!F.boolean()) throw UsageError("second_moment_bound_check: Boolean functionals only");
  const double mass = lambda * sub.area();
  struct Rep {
    double first, second;
  };
  const auto reps = parallel_map(n, threads, [&](std::size_t i) {
    const SeedSpec s = seed.with_replica(i);
    const auto eta = sample_poisson(lambda, window, s);
    RandomStream rs(s.with_purpose("xy"));
    const MarkedPoint x{uniform_point(sub, rs), 1};
    const MarkedPoint y{uniform_point(sub, rs), 1};
    Rep r{};
    const double base = F(eta);
    r.first = mass * squared_add_cost(F, eta, base, x);
    if (!eta.contains_location(x.loc) && !eta.contains_location(y.loc) && !(x.loc == y.loc)) {
      const std::vector<MarkedPoint> xy{x, y};
      const double d2 = iterated_difference(F, eta, xy);
      r.second = mass * mass * d2 * d2;
    }
    return r;
  });
  std::vector<double> first(n), second(n);
  for (std::size_t i = 0; i < n; ++i) {
    first[i] = reps[i].first;
    second[i] = reps[i].second;
  }
  SecondMomentResult out;
  out.m1 = batch_mean_estimate(first, kBatches);
  const auto fact = batch_mean_estimate(second, kBatches);
  out.m2 = out.m1;
  out.m2.estimate = fact.estimate + out.m1.estimate;
  out.m2.stderr = std::hypot(fact.stderr, out.m1.stderr);
  out.m1.seed = out.m2.seed = seed;
  if (out.m1.estimate > 0.0) out.ratio = out.m2.estimate / (out.m1.estimate * out.m1.estimate);
  return out;
}

/// (1-s)^2 M1^2 / M2
inline double paley_zygmund_lower_bound(const EstimatorResult& m1, const EstimatorResult& m2, double s) {
  if (!(s >= 0.0 && s < 1.0)) throw ParameterError("paley_zygmund_lower_bound: s must lie in [0,1)");
  if (!(m2.estimate > 0.0)) throw NormalizationError("paley_zygmund_lower_bound: M2 must be positive");
  return (1.0 - s) * (1.0 - s) * m1.estimate * m1.estimate / m2.estimate;
}

struct SecondDifferenceRow {
  double distance = 0.0;
  EstimatorResult value;  // E[(D_x D_y f_L)^2]
  EstimatorResult alpha4; // four-arm probability over (1, distance/4)
  double ratio = 0.0;     // value / alpha4^2
};

/// x uniform in [-L/2,L/2]^2, y at the given distance in a uniform direction.
inline std::vector<SecondDifferenceRow> second_difference_scan(double L, const std::vector<double>& distances,
                                                               std::size_t n, const SeedSpec& seed,
                                                               const std::vector<EstimatorResult>& alpha4,
                                                               unsigned threads = 1, double lambda = kLambdaCritical) {
  if (alpha4.size() != distances.size()) throw ParameterError("second_difference_scan: one alpha4 per distance");
  for (double d : distances) {
    if (!(d >= 4.0)) throw ParameterError("second_difference_scan: distances must be >= 4");
  }
  if (n < kBatches) throw ParameterError("second_difference_scan needs n >= 32");
  const auto F = functionals::boolean_crossing(L);
  const Region window = Region::square(L + 1.0);
  const Region centre = Region::square(L / 2.0);
  std::vector<SecondDifferenceRow> rows;
  for (std::size_t k = 0; k < distances.size(); ++k) {
    const double d = distances[k];
    const SeedSpec sk = seed.with_sub(k);
    const auto vals = parallel_map(n, threads, [&](std::size_t i) {
      const SeedSpec s = sk.with_replica(i);
      const auto eta = sample_poisson(lambda, window, s);
      RandomStream rs(s.with_purpose("pair"));
      const Point2 x = uniform_point(centre, rs);
      const double th = rs.uniform(0.0, 2.0 * 3.14159265358979323846);
      const Point2 y{x.x + d * std::cos(th), x.y + d * std::sin(th)};
      const std::vector<MarkedPoint> xy{{x, 1}, {y, 1}};
      const double v = iterated_difference(F, eta, xy);
      return v * v;
    });
    SecondDifferenceRow row;
    row.distance = d;
    row.value = batch_mean_estimate(vals, kBatches);
    row.value.seed = sk;
    row.alpha4 = alpha4[k];
    const double a = alpha4[k].estimate;
    row.ratio = a > 0.0 ? row.value.estimate / (a * a) : std::numeric_limits<double>::infinity();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace percospec
