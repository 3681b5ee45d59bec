#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "percospec/core/parallel.hpp"
#include "percospec/difference/functional.hpp"
#include "percospec/hoeffding/correlations.hpp"
#include "percospec/hoeffding/cube.hpp"

namespace percospec {

struct CubeCheck {
  std::size_t functions = 0;
  double parseval = 0.0;        // max |sum coef^2 - E g^2|
  double reconstruction = 0.0;  // max |g - sum coef chi|
  double direct = 0.0;          // max |butterfly - direct sum|
  double projection = 0.0;
  double alternating = 0.0;
  double vanishing = 0.0;
};

/// Exact identities on `count` random +/-1 functions of n = 1..max_n variables, cycling n.
inline CubeCheck check_random_cubes(std::size_t count, unsigned max_n, const SeedSpec& seed) {
  if (max_n < 1 || max_n > 12) throw ParameterError("check_random_cubes: 1 <= max_n <= 12");
  CubeCheck c;
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned n = 1 + static_cast<unsigned>(i % max_n);
    RandomStream rs(seed.with_purpose("cube").with_sub(i));
    std::vector<double> g(std::size_t{1} << n);
    for (auto& v : g) v = rs.sign();
    const auto t = hoeffding_decompose(g);
    c.parseval = std::max(c.parseval, std::fabs(t.energy() - mean_square(g)));
    c.reconstruction = std::max(c.reconstruction, cube::max_abs_diff(t.reconstruct(), g));
    c.direct = std::max(c.direct, cube::max_abs_diff(hoeffding_decompose_direct(g).coef, t.coef));
    c.projection = std::max(c.projection, projection_identity_error(g));
    c.alternating = std::max(c.alternating, alternating_sum_error(g));
    c.vanishing = std::max(c.vanishing, vanishing_coefficient_error(g));
    ++c.functions;
  }
  return c;
}

struct CorrelationCheck {
  std::string functional;
  std::size_t replicas = 0;
  std::size_t nontrivial = 0;       // replicas with phi_2 > 0
  double first_order = 0.0;         // max |phi_1 - 2 psi_1|
  double psi_excess = 0.0;          // max of psi_k - phi_k, k in {1,2}
  double z1 = 0.0;                  // max |psi_2 - E Z_1^2|
  double z_sum = 0.0;               // max |phi_2 - sum E Z_i^2|
  std::size_t lemma_failures = 0;   // replicas with phi_2 > 9 psi_2 + 48 P(E u E)
  std::size_t loose_lemma_failures = 0;  // same with 12 psi_2
  std::size_t lemma_mark_failures = 0;  // individual mark vectors, informational
  std::size_t loose_lemma_mark_failures = 0;
  std::size_t mark_vectors = 0;
};

/*
 * Per-replica identities for the first and second difference cubes of F on `points`-point
 * backgrounds, with the added points drawn uniformly from the inner window.
 */
inline CorrelationCheck check_correlations(const Functional& F, std::size_t points, std::size_t replicas,
                                           const SeedSpec& seed, unsigned threads = 1) {
  const BackgroundLaw law{Region::square(2.0), 1.0, points, std::max<std::size_t>(points, 12)};
  law.validate();
  if (points == 0) throw ParameterError("check_correlations needs at least one background point");
  struct Rep {
    CorrelationTerms one, two;
  };
  const auto reps = parallel_map(replicas, threads, [&](std::size_t r) {
    const auto eta = sample_background(law, seed.with_replica(r));
    RandomStream rs(seed.with_replica(r).with_purpose("xy"));
    const Point2 x{rs.uniform(-1.2, 1.2), rs.uniform(-1.2, 1.2)};
    const Point2 y{rs.uniform(-1.2, 1.2), rs.uniform(-1.2, 1.2)};
    const std::vector<Point2> xy{x, y};
    return Rep{difference_correlations(F, eta, std::span<const Point2>(&x, 1)), difference_correlations(F, eta, xy)};
  });
  CorrelationCheck c;
  c.functional = F.name();
  c.replicas = replicas;
  for (const auto& r : reps) {
    if (F.traits().monotone != Monotonicity::none) c.first_order = std::max(c.first_order, std::fabs(r.one.phi - 2.0 * r.one.psi));
    c.psi_excess = std::max({c.psi_excess, r.one.psi - r.one.phi, r.two.psi - r.two.phi});
    c.z1 = std::max(c.z1, std::fabs(r.two.psi - r.two.ez2[0]));
    c.z_sum = std::max(c.z_sum, std::fabs(r.two.phi - r.two.sum_ez2()));
    if (r.two.phi > 9.0 * r.two.psi + 48.0 * r.two.event_prob + 1e-12) ++c.lemma_failures;
    if (r.two.phi > 12.0 * r.two.psi + 48.0 * r.two.event_prob + 1e-12) ++c.loose_lemma_failures;
    c.lemma_mark_failures += r.two.lemma_violations;
    c.loose_lemma_mark_failures += r.two.loose_lemma_violations;
    c.mark_vectors += r.two.mark_vectors;
    c.nontrivial += r.two.phi > 0.0;
  }
  return c;
}

struct HoeffdingSuiteReport {
  CubeCheck cubes;
  std::vector<CorrelationCheck> correlations;
  double tolerance = 1e-10;

  [[nodiscard]] bool cubes_pass() const {
    return cubes.parseval <= tolerance && cubes.reconstruction <= tolerance && cubes.direct <= tolerance;
  }
  [[nodiscard]] bool identities_pass() const {
    return cubes.projection <= tolerance && cubes.alternating <= tolerance && cubes.vanishing <= tolerance;
  }
  [[nodiscard]] bool first_order_pass() const {
    return std::all_of(correlations.begin(), correlations.end(), [&](const auto& c) { return c.first_order <= tolerance; });
  }
  [[nodiscard]] bool ordering_pass() const {
    return std::all_of(correlations.begin(), correlations.end(), [&](const auto& c) { return c.psi_excess <= tolerance; });
  }
  [[nodiscard]] bool z_pass() const {
    return std::all_of(correlations.begin(), correlations.end(),
                       [&](const auto& c) { return c.z1 <= tolerance && c.z_sum <= tolerance; });
  }
  /// phi_2 <= 9 psi_2 + 48 P(E u E) on every replica
  [[nodiscard]] bool bound_pass() const {
    return std::all_of(correlations.begin(), correlations.end(), [](const auto& c) { return c.lemma_failures == 0; });
  }
  [[nodiscard]] bool loose_bound_pass() const {
    return std::all_of(correlations.begin(), correlations.end(), [](const auto& c) { return c.loose_lemma_failures == 0; });
  }
  [[nodiscard]] bool identities_exact() const {
    return cubes_pass() && identities_pass() && first_order_pass() && ordering_pass() && z_pass();
  }
  [[nodiscard]] bool pass() const { return identities_exact() && bound_pass(); }
};

inline HoeffdingSuiteReport run_hoeffding_suite(std::size_t points, std::size_t replicas, const SeedSpec& seed,
                                                unsigned threads = 1, std::size_t cube_functions = 200) {
  if (replicas == 0) throw ParameterError("hoeffding suite needs at least one replica");
  HoeffdingSuiteReport rep;
  rep.cubes = check_random_cubes(cube_functions, 12, seed);
  const std::vector<Functional> fs{functionals::framed_voronoi_crossing(1.0), functionals::marked_boolean_crossing(1.0)};
  for (std::size_t i = 0; i < fs.size(); ++i) {
    rep.correlations.push_back(check_correlations(fs[i], points, replicas, seed.with_purpose("functional").with_sub(i), threads));
  }
  return rep;
}

}  // namespace percospec
