#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "percospec/core/configuration.hpp"
#include "percospec/core/error.hpp"
#include "percospec/difference/functional.hpp"

namespace percospec {

inline constexpr unsigned kMaxCubeDimension = 20;

/*
 * Functions on {-1,1}^n are stored as 2^n values indexed by a mask m whose bit i is set when
 * eps_i = -1. Subsets S are masks too, and prod_{i in S} eps_i = character(S, m).
 */
inline double character(std::uint32_t S, std::uint32_t m) { return (std::popcount(S & m) & 1) ? -1.0 : 1.0; }

inline unsigned cube_dimension(std::size_t size) {
  if (size == 0 || (size & (size - 1)) != 0) throw UsageError("cube function size must be a power of two");
  const auto n = static_cast<unsigned>(std::countr_zero(size));
  if (n > kMaxCubeDimension) throw SizeError("cube dimension above 20");
  return n;
}

/// Unnormalised in-place Walsh-Hadamard butterfly.
inline void walsh_hadamard(std::vector<double>& v) {
  for (std::size_t h = 1; h < v.size(); h <<= 1) {
    for (std::size_t i = 0; i < v.size(); i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j], b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

struct HoeffdingTable {
  unsigned n = 0;
  std::vector<double> coef;  // coef[S]

  [[nodiscard]] double operator[](std::uint32_t S) const { return coef[S]; }
  [[nodiscard]] double energy() const {
    double s = 0.0;
    for (double c : coef) s += c * c;
    return s;
  }
  [[nodiscard]] std::vector<double> reconstruct() const {
    std::vector<double> v = coef;
    walsh_hadamard(v);
    return v;
  }
  [[nodiscard]] double reconstruct(std::uint32_t m) const {
    double s = 0.0;
    for (std::uint32_t S = 0; S < coef.size(); ++S) s += coef[S] * character(S, m);
    return s;
  }
};

inline HoeffdingTable hoeffding_decompose(std::span<const double> values) {
  HoeffdingTable t;
  t.n = cube_dimension(values.size());
  t.coef.assign(values.begin(), values.end());
  walsh_hadamard(t.coef);
  const double scale = std::ldexp(1.0, -static_cast<int>(t.n));
  for (double& c : t.coef) c *= scale;
  return t;
}

/// Coefficients as plain averages of G * prod eps, one subset at a time.
inline HoeffdingTable hoeffding_decompose_direct(std::span<const double> values) {
  HoeffdingTable t;
  t.n = cube_dimension(values.size());
  if (t.n > 12) throw SizeError("direct decomposition limited to n <= 12");
  t.coef.assign(values.size(), 0.0);
  for (std::uint32_t S = 0; S < values.size(); ++S) {
    double s = 0.0;
    for (std::uint32_t m = 0; m < values.size(); ++m) s += values[m] * character(S, m);
    t.coef[S] = s / static_cast<double>(values.size());
  }
  return t;
}

inline double mean_square(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s / static_cast<double>(values.size());
}

/// Tabulates a mark evaluator on all sign vectors, walking them in Gray-code order.
inline std::vector<double> tabulate(const MarkEvaluator& ev, unsigned n) {
  if (n > kMaxCubeDimension) throw SizeError("tabulate: at most 20 coordinates");
  std::vector<int> marks(n, 1);
  std::vector<double> out(std::size_t{1} << n);
  std::uint32_t m = 0;
  out[0] = ev(marks);
  for (std::uint32_t k = 1; k < out.size(); ++k) {
    const unsigned bit = static_cast<unsigned>(std::countr_zero(k));
    m ^= 1u << bit;
    marks[bit] = -marks[bit];
    out[m] = ev(marks);
  }
  return out;
}

/// Decomposition of F over the marks of the points of `base` (its own marks are ignored).
inline HoeffdingTable hoeffding_decompose(const Functional& F, const PointConfiguration& base) {
  if (base.size() > kMaxCubeDimension) throw SizeError("hoeffding_decompose: at most 20 points");
  return hoeffding_decompose(tabulate(F.bind(base), static_cast<unsigned>(base.size())));
}

namespace cube {

/// Average over coordinate t.
inline std::vector<double> q(std::span<const double> g, unsigned t) {
  std::vector<double> out(g.size());
  const std::uint32_t b = 1u << t;
  for (std::uint32_t m = 0; m < g.size(); ++m) out[m] = 0.5 * (g[m] + g[m ^ b]);
  return out;
}

inline std::vector<double> i_minus_q(std::span<const double> g, unsigned t) {
  std::vector<double> out(g.size());
  const std::uint32_t b = 1u << t;
  for (std::uint32_t m = 0; m < g.size(); ++m) out[m] = 0.5 * (g[m] - g[m ^ b]);
  return out;
}

/// E[G | eps_x : x in T]
inline std::vector<double> conditional_expectation(std::span<const double> g, std::uint32_t T) {
  const unsigned n = cube_dimension(g.size());
  std::vector<double> out(g.begin(), g.end());
  for (unsigned y = 0; y < n; ++y) {
    if (!(T & (1u << y))) out = q(out, y);
  }
  return out;
}

/// prod_{t in T}(I - Q_t) prod_{y not in T} Q_y G
inline std::vector<double> projection(std::span<const double> g, std::uint32_t T) {
  const unsigned n = cube_dimension(g.size());
  std::vector<double> out(g.begin(), g.end());
  for (unsigned y = 0; y < n; ++y) out = (T & (1u << y)) ? i_minus_q(out, y) : q(out, y);
  return out;
}

/// Coordinates G actually depends on.
inline std::uint32_t dependence_set(std::span<const double> g) {
  const unsigned n = cube_dimension(g.size());
  std::uint32_t J = 0;
  for (unsigned t = 0; t < n; ++t) {
    for (std::uint32_t m = 0; m < g.size(); ++m) {
      if (g[m] != g[m ^ (1u << t)]) {
        J |= 1u << t;
        break;
      }
    }
  }
  return J;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace cube

/// Maximal deviation of coef[T] * prod eps from the projection operator form, over all T.
inline double projection_identity_error(std::span<const double> g) {
  const auto t = hoeffding_decompose(g);
  double err = 0.0;
  std::vector<double> lhs(g.size());
  for (std::uint32_t T = 0; T < g.size(); ++T) {
    for (std::uint32_t m = 0; m < g.size(); ++m) lhs[m] = t.coef[T] * character(T, m);
    err = std::max(err, cube::max_abs_diff(lhs, cube::projection(g, T)));
  }
  return err;
}

/// Top coefficient against the alternating sum of conditional expectations.
inline double alternating_sum_error(std::span<const double> g) {
  const unsigned n = cube_dimension(g.size());
  const auto t = hoeffding_decompose(g);
  const std::uint32_t J = static_cast<std::uint32_t>(g.size() - 1);
  std::vector<double> rhs(g.size(), 0.0);
  for (std::uint32_t T = 0; T < g.size(); ++T) {
    const auto ce = cube::conditional_expectation(g, T);
    const double sgn = ((n - static_cast<unsigned>(std::popcount(T))) & 1u) ? -1.0 : 1.0;
    for (std::uint32_t m = 0; m < g.size(); ++m) rhs[m] += sgn * ce[m];
  }
  double err = 0.0;
  for (std::uint32_t m = 0; m < g.size(); ++m) err = std::max(err, std::fabs(t.coef[J] * character(J, m) - rhs[m]));
  return err;
}

/// Largest |coef[J1]| over strict supersets J1 of the dependence set of G.
inline double vanishing_coefficient_error(std::span<const double> g) {
  const auto t = hoeffding_decompose(g);
  const std::uint32_t J0 = cube::dependence_set(g);
  double err = 0.0;
  for (std::uint32_t S = 0; S < g.size(); ++S) {
    if ((S & J0) == J0 && S != J0) err = std::max(err, std::fabs(t.coef[S]));
  }
  return err;
}

}  // namespace percospec
