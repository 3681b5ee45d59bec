#pragma once

#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

#include "percospec/core/parallel.hpp"
#include "percospec/core/sampling.hpp"
#include "percospec/core/stats.hpp"
#include "percospec/difference/functional.hpp"
#include "percospec/difference/operators.hpp"
#include "percospec/hoeffding/correlations.hpp"
#include "percospec/hoeffding/cube.hpp"
#include "percospec/voronoi/connectivity.hpp"

namespace percospec {

struct AnnealedSummary {
  std::vector<double> size_histogram;  // P(|gamma_an| = s)
  std::vector<Point2> locations;       // points of the sampled sets
  EstimatorResult mean_size;           // from the sampled sets
  EstimatorResult mean_size_exact;     // sum_S |S| coef(S)^2 per background
  EstimatorResult mean_projected;      // sum_x Phi_1 per background, i.e. the projected sample size
  std::size_t zero_weight = 0;
};

/*
 * Per background: coefficients over all marks, one set S drawn with probability
 * coef(S)^2 / sum coef^2, and the replica weighted by sum coef^2 = E[F^2 | locations].
 */
inline AnnealedSummary sample_annealed_spectral_sample(const Functional& F, const BackgroundLaw& law, std::size_t n,
                                                       const SeedSpec& seed, unsigned threads = 1) {
  if (n < 2) throw ParameterError("sample_annealed_spectral_sample needs at least 2 replicas");
  struct Rep {
    double w = 0, size = 0, exact = 0, projected = 0;
    std::vector<Point2> loc;
  };
  const auto reps = parallel_map(n, threads, [&](std::size_t r) {
    const SeedSpec s = seed.with_replica(r);
    const auto eta = sample_background(law, s);
    const auto tbl = hoeffding_decompose(F, eta);
    Rep out;
    out.w = tbl.energy();
    if (out.w <= 0.0) return out;
    RandomStream rs(s.with_purpose("annealed"));
    const double u = rs.uniform() * out.w;
    double acc = 0.0;
    std::uint32_t pick = static_cast<std::uint32_t>(tbl.coef.size() - 1);
    for (std::uint32_t S = 0; S < tbl.coef.size(); ++S) {
      const double c2 = tbl.coef[S] * tbl.coef[S];
      out.exact += std::popcount(S) * c2;
      if (acc <= u && u < acc + c2 && pick == tbl.coef.size() - 1) pick = S;
      acc += c2;
    }
    while (pick != 0 && tbl.coef[pick] == 0.0) --pick;  // rounding at the top end
    out.size = std::popcount(pick);
    for (std::size_t i = 0; i < eta.size(); ++i) {
      if (pick & (1u << i)) out.loc.push_back(eta[i].loc);
    }
    // projected size: sum over x in eta of E_marks[(D^-_x F)^2]
    for (std::size_t i = 0; i < eta.size(); ++i) {
      const auto rest = remove_point(eta, i);
      const Point2 x = eta[i].loc;
      const auto t = difference_correlations(F, rest, std::span<const Point2>(&x, 1));
      out.projected += t.phi;
    }
    return out;
  });
  AnnealedSummary s;
  std::vector<double> w(n), ws(n), we(n), wp(n);
  std::size_t maxs = 0;
  for (const auto& r : reps) maxs = std::max<std::size_t>(maxs, static_cast<std::size_t>(r.size));
  s.size_histogram.assign(maxs + 1, 0.0);
  double wsum = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    w[r] = reps[r].w;
    ws[r] = reps[r].w * reps[r].size;
    we[r] = reps[r].exact;
    wp[r] = reps[r].projected;
    if (reps[r].w <= 0.0) ++s.zero_weight;
    s.size_histogram[static_cast<std::size_t>(reps[r].size)] += reps[r].w;
    wsum += reps[r].w;
    s.locations.insert(s.locations.end(), reps[r].loc.begin(), reps[r].loc.end());
  }
  if (wsum <= 0.0) throw NormalizationError("sample_annealed_spectral_sample: F vanishes");
  for (double& h : s.size_histogram) h /= wsum;
  const std::size_t batches = std::min<std::size_t>(32, n);
  s.mean_size = ratio_estimate(ws, w, batches);
  s.mean_size_exact = ratio_estimate(we, w, batches);
  s.mean_projected = ratio_estimate(wp, w, batches);
  s.mean_size.seed = s.mean_size_exact.seed = s.mean_projected.seed = seed;
  return s;
}

/// Per-replica sizes of the removal-pivotal and flip-pivotal sets.
struct PivotalCounts {
  std::vector<double> pivotal;
  std::vector<double> quenched;
};

inline PivotalCounts pivotal_quenched_counts(const Functional& F, const Region& region, double intensity,
                                             std::size_t n, const SeedSpec& seed, unsigned threads = 1,
                                             double pad = kVoronoiPad) {
  if (!F.boolean() || !F.marked()) throw UsageError("pivotal_quenched_counts: needs a marked Boolean functional");
  const Region window = region.padded(pad);
  const auto pairs = parallel_map(n, threads, [&](std::size_t r) {
    const SeedSpec s = seed.with_replica(r);
    return with_padding_retry(sample_poisson(intensity, window, s, true), intensity, s,
                              [&](const PointConfiguration& c) {
                                return std::pair<double, double>(static_cast<double>(pivotal_points(F, c).size()),
                                                                 static_cast<double>(quenched_pivotal_points(F, c).size()));
                              });
  });
  PivotalCounts out;
  for (const auto& [p, q] : pairs) {
    out.pivotal.push_back(p);
    out.quenched.push_back(q);
  }
  return out;
}

inline double falling_power(double m, unsigned k) {
  double v = 1.0;
  for (unsigned j = 0; j < k; ++j) v *= (m - j);
  return v;
}

/// E[(P)_k] / E[(P^q)_k] with falling factorial powers; expected 2^-k.
inline EstimatorResult pivotal_vs_quenched_factor(const PivotalCounts& c, unsigned k) {
  if (k < 1 || k > 2) throw ParameterError("pivotal_vs_quenched_factor: k must be 1 or 2");
  std::vector<double> num(c.pivotal.size()), den(c.quenched.size());
  for (std::size_t r = 0; r < num.size(); ++r) {
    num[r] = falling_power(c.pivotal[r], k);
    den[r] = falling_power(c.quenched[r], k);
  }
  auto e = ratio_estimate(num, den, std::min<std::size_t>(32, num.size()));
  e.meta = "pivotal/quenched k=" + std::to_string(k);
  return e;
}

inline EstimatorResult pivotal_vs_quenched_factor(const Functional& F, unsigned k, std::size_t n, const SeedSpec& seed,
                                                  const Region& region, unsigned threads = 1) {
  Stopwatch sw;
  auto e = pivotal_vs_quenched_factor(pivotal_quenched_counts(F, region, 1.0, n, seed, threads), k);
  e.seed = seed;
  e.wall_seconds = sw.seconds();
  return e;
}

}  // namespace percospec
