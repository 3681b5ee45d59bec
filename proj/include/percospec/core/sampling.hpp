#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "percospec/core/configuration.hpp"
#include "percospec/core/error.hpp"
#include "percospec/core/rng.hpp"

namespace percospec {

inline Point2 uniform_point(const Region& window, RandomStream& rs) {
  const Rect b = window.bounding_rect();
  for (;;) {
    const Point2 p{rs.uniform(b.x0, b.x1), rs.uniform(b.y0, b.y1)};
    if (window.contains(p)) return p;
  }
}

/// Poisson process of the given intensity in `window`; fair +/-1 marks when `marked`.
inline PointConfiguration sample_poisson(double intensity, const Region& window, const SeedSpec& seed,
                                         bool marked = false) {
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) throw ParameterError("intensity must be finite and >= 0");
  RandomStream rs(seed.derive("poisson"));
  const std::uint64_t n = rs.poisson(intensity * window.area());
  PointConfiguration cfg(window, marked, seed.replica);
  for (std::uint64_t i = 0; i < n; ++i) {
    const Point2 p = uniform_point(window, rs);
    const int mark = marked ? rs.sign() : 1;
    cfg.push_unchecked({p, mark});
  }
  return cfg;
}

enum class DynamicsKind { ou, frozen };

struct DynamicsCoupling {
  PointConfiguration base;
  double t = 0.0;
  DynamicsKind kind = DynamicsKind::ou;
  PointConfiguration evolved;
  // OU: indices of base points that survive. Frozen: indices whose mark was not resampled.
  std::vector<std::size_t> retained;
};

/*
 * Per-point clock shared by both dynamics: point i is untouched at time t iff u_i < e^{-t}.
 * The same seed therefore gives nested untouched sets across t and the same untouched set for
 * OU and frozen evolutions of one base configuration.
 */
inline std::vector<double> survival_uniforms(std::size_t n, const SeedSpec& seed) {
  RandomStream rs(seed.with_purpose("survival"));
  std::vector<double> u(n);
  for (auto& v : u) v = rs.uniform();
  return u;
}

inline DynamicsCoupling evolve_ou(const PointConfiguration& base, double t, double intensity, const SeedSpec& seed) {
  if (!(t >= 0.0) || std::isnan(t)) throw ParameterError("evolve_ou: t must be >= 0");
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) throw ParameterError("intensity must be finite and >= 0");
  DynamicsCoupling c;
  c.base = base;
  c.t = t;
  c.kind = DynamicsKind::ou;
  c.evolved = PointConfiguration(base.window(), base.marked(), base.id());
  const double keep = std::exp(-t);
  const auto u = survival_uniforms(base.size(), seed);
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (u[i] < keep) {
      c.retained.push_back(i);
      c.evolved.push_unchecked(base[i]);
    }
  }
  if (t > 0.0) {
    RandomStream rs(seed.with_purpose("ou-births"));
    const std::uint64_t n = rs.poisson((1.0 - keep) * intensity * base.window().area());
    for (std::uint64_t i = 0; i < n; ++i) {
      const Point2 p = uniform_point(base.window(), rs);
      const int mark = base.marked() ? rs.sign() : 1;
      c.evolved.push_unchecked({p, mark});
    }
  }
  return c;
}

inline DynamicsCoupling evolve_frozen(const PointConfiguration& base, double t, const SeedSpec& seed) {
  if (!base.marked()) throw UsageError("evolve_frozen needs a marked configuration");
  if (!(t >= 0.0) || std::isnan(t)) throw ParameterError("evolve_frozen: t must be >= 0");
  DynamicsCoupling c;
  c.base = base;
  c.t = t;
  c.kind = DynamicsKind::frozen;
  c.evolved = base;
  const double keep = std::exp(-t);
  const auto u = survival_uniforms(base.size(), seed);
  RandomStream rs(seed.with_purpose("frozen-marks"));
  for (std::size_t i = 0; i < base.size(); ++i) {
    const int fresh = rs.sign();
    if (u[i] < keep) {
      c.retained.push_back(i);
    } else {
      c.evolved.set_mark(i, fresh);
    }
  }
  return c;
}

}  // namespace percospec
