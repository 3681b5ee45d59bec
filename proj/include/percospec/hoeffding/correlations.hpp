#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "percospec/core/configuration.hpp"
#include "percospec/core/error.hpp"
#include "percospec/core/parallel.hpp"
#include "percospec/core/sampling.hpp"
#include "percospec/core/stats.hpp"
#include "percospec/difference/functional.hpp"
#include "percospec/hoeffding/cube.hpp"

namespace percospec {

/// Law of the background locations: Poisson (or a fixed number of uniform points) in a small window.
struct BackgroundLaw {
  Region window = Region::square(2.0);
  double intensity = 1.0;
  std::size_t fixed_points = 0;  // > 0: exactly this many uniform points
  std::size_t max_points = 12;   // Poisson draws above this are redrawn

  void validate() const {
    if (!(intensity > 0.0) || !std::isfinite(intensity)) throw ParameterError("background intensity must be positive");
    if (max_points > kMaxCubeDimension - 2 || fixed_points > kMaxCubeDimension - 2)
      throw SizeError("background limited to 18 points");
  }
};

inline PointConfiguration sample_background(const BackgroundLaw& law, const SeedSpec& seed) {
  law.validate();
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    RandomStream rs(seed.with_purpose("background").with_sub(attempt));
    const std::uint64_t n = law.fixed_points > 0 ? law.fixed_points : rs.poisson(law.intensity * law.window.area());
    if (n > (law.fixed_points > 0 ? law.fixed_points : law.max_points)) continue;
    PointConfiguration cfg(law.window, true, seed.replica);
    for (std::uint64_t i = 0; i < n; ++i) cfg.push_unchecked({uniform_point(law.window, rs), 1});
    return cfg;
  }
  throw ParameterError("background law almost never has few enough points");
}

/// Per-background quantities, averaged exactly over the 2^n background marks.
struct CorrelationTerms {
  std::size_t k = 0;
  double mean_f2 = 0.0;
  double psi = 0.0;  // E[coef(J)^2] of the difference cube
  double phi = 0.0;  // E[sum_T coef(T)^2]
  double max_psi_excess = 0.0;  // max over marks of psi - phi (never positive)
  // two points only
  std::array<double, 4> ez2{};  // E[Z_i^2] from the explicit four-term averages
  double event_prob = 0.0;      // P(E(x,y) u E(y,x))
  std::size_t lemma_violations = 0;       // marks with sum Z_i^2 > 9 Z_1^2 + 48 * 1{E u E}
  std::size_t loose_lemma_violations = 0; // same with 12 Z_1^2
  std::size_t case_table_violations = 0;  // marks with Z_1 != 0 off E u E and some |Z_i| > 3|Z_1|
  std::size_t mark_vectors = 0;

  [[nodiscard]] double sum_ez2() const { return ez2[0] + ez2[1] + ez2[2] + ez2[3]; }
};

/*
 * G(eps_1..eps_k) = D_{x_1,eps_1}...D_{x_k,eps_k} F(eta) for k in {1,2}. psi and phi are the top
 * and total Hoeffding energies of G; the Z variables are computed from the defining averages.
 */
inline CorrelationTerms difference_correlations(const Functional& F, const PointConfiguration& eta,
                                                std::span<const Point2> xs) {
  const std::size_t k = xs.size();
  if (k < 1 || k > 2) throw UsageError("difference_correlations: one or two points");
  for (std::size_t l = 0; l < k; ++l) {
    if (eta.contains_location(xs[l])) throw UsageError("difference_correlations: point coincides with background");
  }
  if (k == 2 && xs[0] == xs[1]) throw UsageError("difference_correlations: coincident points");
  const std::size_t n = eta.size();
  if (n + k > kMaxCubeDimension) throw SizeError("difference_correlations: too many points");

  const std::uint32_t full = (1u << k) - 1u;
  std::vector<MarkEvaluator> ev(full + 1);
  for (std::uint32_t A = 0; A <= full; ++A) {
    PointConfiguration c = eta;
    for (std::size_t l = 0; l < k; ++l) {
      if (A & (1u << l)) c.push_unchecked({xs[l], 1});
    }
    ev[A] = F.bind(c);
  }

  CorrelationTerms out;
  out.k = k;
  std::vector<int> marks(n, 1);
  std::vector<int> work;
  // fv[A][e]: F(eta + x_A with added marks e restricted to A); bit l of e set means eps_l = -1
  std::array<std::array<double, 4>, 4> fv{};
  const std::size_t total = std::size_t{1} << n;
  std::uint32_t gray = 0;
  for (std::size_t step = 0; step < total; ++step) {
    if (step > 0) {
      const unsigned bit = static_cast<unsigned>(std::countr_zero(step));
      gray ^= 1u << bit;
      marks[bit] = -marks[bit];
    }
    for (std::uint32_t A = 0; A <= full; ++A) {
      for (std::uint32_t e = 0; e <= full; ++e) {
        if ((e & ~A) != 0) continue;
        work.assign(marks.begin(), marks.end());
        for (std::size_t l = 0; l < k; ++l) {
          if (A & (1u << l)) work.push_back((e & (1u << l)) ? -1 : 1);
        }
        fv[A][e] = ev[A](work);
      }
    }
    std::array<double, 4> G{};
    for (std::uint32_t e = 0; e <= full; ++e) {
      double s = 0.0;
      for (std::uint32_t A = 0; A <= full; ++A) {
        const double sgn = ((k - static_cast<std::size_t>(std::popcount(A))) & 1u) ? -1.0 : 1.0;
        s += sgn * fv[A][e & A];
      }
      G[e] = s;
    }
    const auto tbl = hoeffding_decompose(std::span<const double>(G.data(), full + 1));
    const double psi = tbl.coef[full] * tbl.coef[full];
    const double phi = tbl.energy();
    out.psi += psi;
    out.phi += phi;
    out.max_psi_excess = std::max(out.max_psi_excess, psi - phi);
    out.mean_f2 += fv[0][0] * fv[0][0];

    if (k == 2) {
      std::array<double, 4> Z{};
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const double e1 = a ? -1.0 : 1.0, e2 = b ? -1.0 : 1.0;
          const std::uint32_t e = static_cast<std::uint32_t>(a) | (static_cast<std::uint32_t>(b) << 1);
          const double D = fv[3][e] - fv[1][e & 1u] - fv[2][e & 2u] + fv[0][0];
          Z[0] += 0.25 * e1 * e2 * D;
          Z[1] += 0.25 * e1 * D;
          Z[2] += 0.25 * e2 * D;
          Z[3] += 0.25 * D;
        }
      }
      for (int i = 0; i < 4; ++i) out.ez2[static_cast<std::size_t>(i)] += Z[static_cast<std::size_t>(i)] * Z[static_cast<std::size_t>(i)];
      // x^1 y^1 -> e=0, x^-1 y^-1 -> 3, x^1 y^-1 -> 2, x^-1 y^1 -> 1
      const double f11 = fv[3][0], fmm = fv[3][3], f1m = fv[3][2], fm1 = fv[3][1];
      const bool exy = f11 == 1 && fmm == -1 && f1m == 1 && fm1 == -1 && fv[2][0] == 1 && fv[2][2] == -1;
      const bool eyx = f11 == 1 && fmm == -1 && fm1 == 1 && f1m == -1 && fv[1][0] == 1 && fv[1][1] == -1;
      const bool event = exy || eyx;
      out.event_prob += event ? 1.0 : 0.0;
      const double sz = Z[0] * Z[0] + Z[1] * Z[1] + Z[2] * Z[2] + Z[3] * Z[3];
      if (sz > 9.0 * Z[0] * Z[0] + (event ? 48.0 : 0.0)) ++out.lemma_violations;
      if (sz > 12.0 * Z[0] * Z[0] + (event ? 48.0 : 0.0)) ++out.loose_lemma_violations;
      if (!event && Z[0] != 0.0) {
        const double a1 = 3.0 * std::fabs(Z[0]);
        if (std::fabs(Z[1]) > a1 || std::fabs(Z[2]) > a1 || std::fabs(Z[3]) > a1) ++out.case_table_violations;
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(total);
  out.psi *= inv;
  out.phi *= inv;
  out.mean_f2 *= inv;
  for (double& z : out.ez2) z *= inv;
  out.event_prob *= inv;
  out.mark_vectors = total;
  return out;
}

struct CorrelationEstimate {
  EstimatorResult psi;  // normalised by E[F^2]
  EstimatorResult phi;
  std::vector<CorrelationTerms> replicas;
};

/// Monte Carlo over background locations, exact in marks. `points` are fixed evaluation points.
inline CorrelationEstimate correlation_functions(const Functional& F, std::span<const Point2> points,
                                                 const BackgroundLaw& law, std::size_t n, const SeedSpec& seed,
                                                 unsigned threads = 1) {
  if (n < 2) throw ParameterError("correlation_functions needs at least 2 replicas");
  std::vector<Point2> xs(points.begin(), points.end());
  CorrelationEstimate out;
  out.replicas = parallel_map(n, threads, [&](std::size_t r) {
    return difference_correlations(F, sample_background(law, seed.with_replica(r)), xs);
  });
  std::vector<double> psi(n), phi(n), f2(n);
  for (std::size_t r = 0; r < n; ++r) {
    psi[r] = out.replicas[r].psi;
    phi[r] = out.replicas[r].phi;
    f2[r] = out.replicas[r].mean_f2;
  }
  const std::size_t batches = std::min<std::size_t>(32, n);
  out.psi = ratio_estimate(psi, f2, batches);
  out.phi = ratio_estimate(phi, f2, batches);
  out.psi.seed = out.phi.seed = seed;
  out.psi.meta = "psi";
  out.phi.meta = "phi";
  return out;
}

}  // namespace percospec
