#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "percospec/boolean/estimate.hpp"
#include "percospec/boolean/occupied.hpp"
#include "percospec/core/parallel.hpp"
#include "percospec/core/sampling.hpp"
#include "percospec/core/stats.hpp"
#include "percospec/voronoi/connectivity.hpp"

namespace percospec {

enum class Model { boolean, voronoi };

inline std::string to_string(Model m) { return m == Model::boolean ? "boolean" : "voronoi"; }
inline std::string to_string(DynamicsKind d) { return d == DynamicsKind::ou ? "ou" : "frozen"; }

inline Model parse_model(const std::string& s) {
  if (s == "boolean") return Model::boolean;
  if (s == "voronoi") return Model::voronoi;
  throw ParameterError("unknown model '" + s + "'");
}
inline DynamicsKind parse_dynamics(const std::string& s) {
  if (s == "ou") return DynamicsKind::ou;
  if (s == "frozen") return DynamicsKind::frozen;
  throw ParameterError("unknown dynamics '" + s + "'");
}

struct NoisePoint {
  double t = 0.0;
  double u = std::numeric_limits<double>::quiet_NaN();  // t * L^2 * alpha4(1,L)
  EstimatorResult p_differ;
  EstimatorResult cov;
};

struct NoiseCurve {
  Model model = Model::boolean;
  DynamicsKind dynamics = DynamicsKind::ou;
  double L = 0.0;
  EstimatorResult variance;
  std::vector<NoisePoint> points;
  std::uint64_t base_evaluations = 0;
  std::uint64_t evolved_evaluations = 0;
};

inline void validate_time_grid(const std::vector<double>& ts) {
  if (ts.empty()) throw ParameterError("time grid is empty");
  for (double t : ts) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("time grid values must be finite and >= 0");
  }
}

/// Values of f at time 0 and along the time grid for one replica, under one or both dynamics.
struct NoiseReplica {
  double f0 = 0.0;
  std::vector<double> ou, frozen;
  std::uint64_t base_evaluations = 0;
  std::uint64_t evolved_evaluations = 0;
};

/*
 * One replica: the base sample is evaluated once; each grid time gets its own coupled
 * evolution of that base. For the Voronoi model the frozen evolutions reuse the base diagram.
 */
inline NoiseReplica noise_replica(Model model, bool want_ou, bool want_frozen, double L, const std::vector<double>& ts,
                                  double lambda, const SeedSpec& s) {
  const Region box = Region::square(L);
  if (model == Model::boolean) {
    if (want_frozen) throw UsageError("frozen dynamics needs the marked Voronoi model");
    const auto base = sample_poisson(lambda, Region::square(L + 1.0), s);
    NoiseReplica r;
    r.f0 = crossing_indicator_fL(base, L);
    r.base_evaluations = 1;
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const auto ev = evolve_ou(base, ts[j], lambda, s.with_sub(j));
      r.ou.push_back(crossing_indicator_fL(ev.evolved, L));
      ++r.evolved_evaluations;
    }
    return r;
  }
  return with_padding_retry(sample_poisson(lambda, box.padded(kVoronoiPad), s, true), lambda, s,
                            [&](const PointConfiguration& base) {
                              NoiseReplica r;
                              auto vd = make_diagram(base);
                              const auto sc = build_scaffold(vd, box);
                              r.f0 = voronoi_crossing(sc, marks_of(base.view()), 1, Axis::LR) ? 1.0 : -1.0;
                              r.base_evaluations = 1;
                              for (std::size_t j = 0; j < ts.size(); ++j) {
                                if (want_frozen) {
                                  const auto ev = evolve_frozen(base, ts[j], s.with_sub(j));
                                  r.frozen.push_back(voronoi_crossing(sc, marks_of(ev.evolved.view()), 1, Axis::LR) ? 1.0 : -1.0);
                                  ++r.evolved_evaluations;
                                }
                                if (want_ou) {
                                  const auto ev = evolve_ou(base, ts[j], lambda, s.with_sub(j));
                                  r.ou.push_back(percospec::voronoi_crossing(ev.evolved, box, 1, Axis::LR) ? 1.0 : -1.0);
                                  ++r.evolved_evaluations;
                                }
                              }
                              return r;
                            });
}

inline double default_intensity(Model m) { return m == Model::boolean ? kLambdaCritical : 1.0; }

inline NoisePoint noise_point(double t, std::span<const double> f0, std::span<const double> ft, std::size_t batches) {
  NoisePoint p;
  p.t = t;
  std::vector<double> differ(f0.size());
  for (std::size_t i = 0; i < f0.size(); ++i) differ[i] = f0[i] != ft[i] ? 1.0 : 0.0;
  p.p_differ = batch_mean_estimate(differ, batches);
  p.cov = covariance_estimate(f0, ft, batches);
  return p;
}

/// P(f != f^t) and Cov(f, f^t) on a time grid; `alpha4` = alpha4(1,L) fills the rescaled axis.
inline NoiseCurve noise_curve(Model model, DynamicsKind dynamics, double L, const std::vector<double>& ts,
                              std::size_t n, const SeedSpec& seed, unsigned threads = 1,
                              std::optional<double> alpha4 = std::nullopt, std::optional<double> lambda = std::nullopt) {
  validate_time_grid(ts);
  if (!(L > 0.0)) throw ParameterError("noise_curve: L must be positive");
  if (n < 32) throw ParameterError("noise_curve needs n >= 32");
  const double lam = lambda.value_or(default_intensity(model));
  const bool frozen = dynamics == DynamicsKind::frozen;
  const auto reps = parallel_map(n, threads, [&](std::size_t i) {
    return noise_replica(model, !frozen, frozen, L, ts, lam, seed.with_replica(i));
  });
  NoiseCurve c;
  c.model = model;
  c.dynamics = dynamics;
  c.L = L;
  std::vector<double> f0(n), ft(n);
  for (std::size_t i = 0; i < n; ++i) f0[i] = reps[i].f0;
  c.variance = covariance_estimate(f0, f0, 32);
  for (const auto& r : reps) {
    c.base_evaluations += r.base_evaluations;
    c.evolved_evaluations += r.evolved_evaluations;
  }
  for (std::size_t j = 0; j < ts.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) ft[i] = frozen ? reps[i].frozen[j] : reps[i].ou[j];
    NoisePoint p = noise_point(ts[j], f0, ft, 32);
    if (alpha4) p.u = ts[j] * L * L * *alpha4;
    p.p_differ.seed = p.cov.seed = seed;
    c.points.push_back(p);
  }
  return c;
}

struct CovarianceComparisonRow {
  double t = 0.0;
  EstimatorResult cov_ou;
  EstimatorResult cov_frozen;
  EstimatorResult paired_difference;  // cov_ou - cov_frozen
  [[nodiscard]] bool ou_not_above(double sigmas = 3.0) const {
    return cov_ou.estimate - cov_frozen.estimate <= sigmas * combined_stderr(cov_ou, cov_frozen);
  }
};

/// Voronoi crossing covariances under the two dynamics, on shared base samples and clocks.
inline std::vector<CovarianceComparisonRow> ou_vs_frozen_covariance(double L, const std::vector<double>& ts, std::size_t n,
                                                                   const SeedSpec& seed, unsigned threads = 1) {
  validate_time_grid(ts);
  if (n < 32) throw ParameterError("ou_vs_frozen_covariance needs n >= 32");
  const auto reps = parallel_map(n, threads, [&](std::size_t i) {
    return noise_replica(Model::voronoi, true, true, L, ts, 1.0, seed.with_replica(i));
  });
  std::vector<double> f0(n), a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) f0[i] = reps[i].f0;
  std::vector<CovarianceComparisonRow> rows;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = reps[i].ou[j];
      b[i] = reps[i].frozen[j];
    }
    CovarianceComparisonRow r;
    r.t = ts[j];
    r.cov_ou = covariance_estimate(f0, a, 32);
    r.cov_frozen = covariance_estimate(f0, b, 32);
    // centred-product difference per replica gives the paired error
    double m0 = 0, ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      m0 += f0[i];
      ma += a[i];
      mb += b[i];
    }
    m0 /= n;
    ma /= n;
    mb /= n;
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = (f0[i] - m0) * ((a[i] - ma) - (b[i] - mb));
    r.paired_difference = batch_mean_estimate(d, 32);
    r.cov_ou.seed = r.cov_frozen.seed = r.paired_difference.seed = seed;
    rows.push_back(r);
  }
  return rows;
}

struct MehlerResult {
  double t_star = 0.0;
  EstimatorResult p_differ;
  EstimatorResult spectral_mean;  // E|gamma_L|
  double ratio = 0.0;             // 2 P / (t* E|gamma|)
  double stderr = 0.0;
  [[nodiscard]] bool within(double lo, double hi, double sigmas = 3.0) const {
    return ratio + sigmas * stderr >= lo && ratio - sigmas * stderr <= hi;
  }
};

/// Boolean f_L under OU at the time where t * E|gamma_L| equals `target`.
inline MehlerResult mehler_slope(double L, const EstimatorResult& spectral_mean, double target, std::size_t n,
                                 const SeedSpec& seed, unsigned threads = 1, double lambda = kLambdaCritical) {
  if (!(spectral_mean.estimate > 0.0)) throw NormalizationError("mehler_slope: spectral mean must be positive");
  if (!(target > 0.0)) throw ParameterError("mehler_slope: target must be positive");
  MehlerResult m;
  m.spectral_mean = spectral_mean;
  m.t_star = target / spectral_mean.estimate;
  const auto curve = noise_curve(Model::boolean, DynamicsKind::ou, L, {m.t_star}, n, seed, threads, std::nullopt, lambda);
  m.p_differ = curve.points[0].p_differ;
  m.ratio = 2.0 * m.p_differ.estimate / target;
  const double rel_p = m.p_differ.estimate > 0 ? m.p_differ.stderr / m.p_differ.estimate : 0.0;
  const double rel_g = spectral_mean.stderr / spectral_mean.estimate;
  m.stderr = m.ratio * std::hypot(rel_p, rel_g);
  return m;
}

struct CollapseRow {
  double L = 0.0;
  double u = 0.0;
  double t = 0.0;
  double alpha4 = 0.0;
  EstimatorResult p_differ;
};

struct CollapseResult {
  std::vector<CollapseRow> rows;
  std::vector<double> u_grid;
  std::vector<double> spread;  // max - min of P over L, per u
};

/// P(f_L != f_L^t) at t = u / (L^2 alpha4(1,L)) for each L; `alpha4[k]` belongs to `Ls[k]`.
inline CollapseResult instability_collapse(const std::vector<double>& Ls, const std::vector<double>& alpha4,
                                           const std::vector<double>& us, std::size_t n, const SeedSpec& seed,
                                           unsigned threads = 1, double lambda = kLambdaCritical) {
  if (Ls.size() < 3) throw ParameterError("instability_collapse needs at least 3 values of L");
  if (alpha4.size() != Ls.size()) throw ParameterError("instability_collapse: one alpha4 per L");
  if (us.empty()) throw ParameterError("instability_collapse: empty u grid");
  CollapseResult out;
  out.u_grid = us;
  std::vector<double> lo(us.size(), 1.0), hi(us.size(), 0.0);
  for (std::size_t k = 0; k < Ls.size(); ++k) {
    const double L = Ls[k];
    if (!(alpha4[k] > 0.0)) throw NormalizationError("instability_collapse: alpha4 must be positive");
    std::vector<double> ts;
    for (double u : us) ts.push_back(u / (L * L * alpha4[k]));
    const auto curve = noise_curve(Model::boolean, DynamicsKind::ou, L, ts, n, seed.with_sub(k), threads, alpha4[k], lambda);
    for (std::size_t j = 0; j < us.size(); ++j) {
      CollapseRow r;
      r.L = L;
      r.u = us[j];
      r.t = ts[j];
      r.alpha4 = alpha4[k];
      r.p_differ = curve.points[j].p_differ;
      lo[j] = std::min(lo[j], r.p_differ.estimate);
      hi[j] = std::max(hi[j], r.p_differ.estimate);
      out.rows.push_back(r);
    }
  }
  for (std::size_t j = 0; j < us.size(); ++j) out.spread.push_back(hi[j] - lo[j]);
  return out;
}

}  // namespace percospec
