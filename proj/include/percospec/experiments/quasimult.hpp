#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "percospec/core/stats.hpp"

namespace percospec {

/// alpha(r, R) estimated from n replicas.
using AlphaProvider = std::function<EstimatorResult(double r, double R, std::size_t n)>;

struct ScaleTriple {
  double r1 = 1.0, r2 = 2.0, r3 = 4.0;
};

struct QuasimultRow {
  ScaleTriple scales;
  EstimatorResult a12, a23, a13;
  double ratio = 0.0;
  double stderr = 0.0;
  // a(r1, r3) <= a(r1, r2 - 1) a(r2, r3), only when r2 - 1 >= r1
  bool has_independence = false;
  EstimatorResult a1m;  // a(r1, r2 - 1)
  double product = 0.0;
  double product_stderr = 0.0;
  [[nodiscard]] bool independence_holds(double sigmas = 3.0) const {
    if (!has_independence) return true;
    return a13.estimate - product <= sigmas * std::hypot(a13.stderr, product_stderr);
  }
};

struct QuasimultTable {
  std::vector<QuasimultRow> rows;
  double band_low = 0.0;   // max over rows of ratio - 3 se
  double band_high = 0.0;  // min over rows of ratio + 3 se
  [[nodiscard]] bool within_band(double factor, double sigmas = 3.0) const {
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      lo = std::max(lo, r.ratio - sigmas * r.stderr);
      hi = std::min(hi, r.ratio + sigmas * r.stderr);
    }
    return lo <= factor * hi;
  }
};

inline double relative_error(const EstimatorResult& e) { return e.estimate > 0 ? e.stderr / e.estimate : 0.0; }

/*
 * Ratios a(r1,r2) a(r2,r3) / a(r1,r3). Each distinct annulus is estimated once; the replica count
 * doubles from n until the relative stderr drops below `max_rel` or n_max is reached.
 */
inline QuasimultTable quasimult_table(const AlphaProvider& alpha, const std::vector<ScaleTriple>& triples, std::size_t n,
                                      std::size_t n_max, double max_rel = 0.2) {
  if (triples.empty()) throw ParameterError("quasimult_table: no scale triples");
  if (n == 0 || n_max < n) throw ParameterError("quasimult_table: need 0 < n <= n_max");
  for (const auto& t : triples) {
    if (!(1.0 <= t.r1 && t.r1 <= t.r2 && t.r2 <= t.r3)) throw ParameterError("quasimult_table needs 1 <= r1 <= r2 <= r3");
  }
  std::map<std::pair<double, double>, EstimatorResult> memo;
  auto get = [&](double r, double R) {
    if (r == R) {
      EstimatorResult one;
      one.estimate = 1.0;
      return one;
    }
    auto it = memo.find({r, R});
    if (it != memo.end()) return it->second;
    std::size_t m = n;
    EstimatorResult e = alpha(r, R, m);
    while ((e.estimate == 0.0 || relative_error(e) >= max_rel) && m * 2 <= n_max) {
      m *= 2;
      e = alpha(r, R, m);
    }
    if (e.estimate == 0.0) {
      throw NormalizationError("arm probability estimate is 0 at (" + std::to_string(r) + ", " + std::to_string(R) +
                               "); more replicas needed");
    }
    memo[{r, R}] = e;
    return e;
  };
  QuasimultTable tab;
  tab.band_high = std::numeric_limits<double>::infinity();
  for (const auto& t : triples) {
    QuasimultRow row;
    row.scales = t;
    row.a12 = get(t.r1, t.r2);
    row.a23 = get(t.r2, t.r3);
    row.a13 = get(t.r1, t.r3);
    row.ratio = row.a12.estimate * row.a23.estimate / row.a13.estimate;
    row.stderr = row.ratio * std::sqrt(std::pow(relative_error(row.a12), 2) + std::pow(relative_error(row.a23), 2) +
                                       std::pow(relative_error(row.a13), 2));
    if (t.r2 - 1.0 >= t.r1 && t.r2 > t.r1) {
      row.has_independence = true;
      row.a1m = get(t.r1, t.r2 - 1.0);
      row.product = row.a1m.estimate * row.a23.estimate;
      row.product_stderr = row.product * std::hypot(relative_error(row.a1m), relative_error(row.a23));
    }
    tab.band_low = std::max(tab.band_low, row.ratio - 3.0 * row.stderr);
    tab.band_high = std::min(tab.band_high, row.ratio + 3.0 * row.stderr);
    tab.rows.push_back(row);
  }
  return tab;
}

}  // namespace percospec
