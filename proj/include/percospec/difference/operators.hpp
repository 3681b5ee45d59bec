#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "percospec/core/configuration.hpp"
#include "percospec/core/error.hpp"
#include "percospec/difference/functional.hpp"

namespace percospec {

inline constexpr std::size_t kMaxDifferenceOrder = 20;

/// F(cfg + p) - F(cfg)
inline double add_one_cost(const Functional& F, const PointConfiguration& cfg, const MarkedPoint& p) {
  if (cfg.contains_location(p.loc)) throw UsageError("add_one_cost: duplicate location");
  return F(add_point(cfg, p)) - F(cfg);
}

/// F(cfg) - F(cfg - point)
inline double remove_one_cost(const Functional& F, const PointConfiguration& cfg, std::size_t index) {
  if (index >= cfg.size()) throw UsageError("remove_one_cost: bad index");
  return F(cfg) - F(remove_point(cfg, index));
}

/// Inclusion-exclusion over all 2^k subsets of the added points, each evaluated once.
inline double iterated_difference(const Functional& F, const PointConfiguration& cfg, std::span<const MarkedPoint> pts) {
  const std::size_t k = pts.size();
  if (k > kMaxDifferenceOrder) throw SizeError("iterated_difference: at most 20 points");
  for (std::size_t i = 0; i < k; ++i) {
    if (cfg.contains_location(pts[i].loc)) throw UsageError("iterated_difference: point already in configuration");
    for (std::size_t j = 0; j < i; ++j) {
      if (pts[i].loc == pts[j].loc) throw UsageError("iterated_difference: points must be distinct");
    }
  }
  const std::uint32_t full = (1u << k) - 1u;
  double sum = 0.0;
  for (std::uint32_t A = 0; A <= full; ++A) {
    PointConfiguration c = cfg;
    for (std::size_t l = 0; l < k; ++l) {
      if (A & (1u << l)) c.push_unchecked(pts[l]);
    }
    const int parity = static_cast<int>(k) - std::popcount(A);
    sum += (parity % 2 == 0 ? 1.0 : -1.0) * F(c);
  }
  return sum;
}

struct PivotalSet {
  std::vector<std::size_t> indices;
  [[nodiscard]] std::size_t size() const { return indices.size(); }
  [[nodiscard]] bool contains(std::size_t i) const { return std::binary_search(indices.begin(), indices.end(), i); }
};

inline void require_boolean(const Functional& F, const char* who) {
  if (!F.boolean()) throw UsageError(std::string(who) + ": functional is not Boolean");
}

/// Points whose mark flip changes F.
inline PivotalSet quenched_pivotal_points(const Functional& F, const PointConfiguration& cfg) {
  require_boolean(F, "quenched_pivotal_points");
  if (!cfg.marked() || !F.marked()) throw UsageError("quenched_pivotal_points: needs a marked functional and configuration");
  PivotalSet out;
  if (F.quenched_hook()) {
    out.indices = F.quenched_hook()(cfg);
    std::sort(out.indices.begin(), out.indices.end());
    return out;
  }
  const double base = F(cfg);
  PointConfiguration work = cfg;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    if (!F.affected_by(cfg[i].loc)) continue;
    work.set_mark(i, -cfg[i].mark);
    if (F(work) != base) out.indices.push_back(i);
    work.set_mark(i, cfg[i].mark);
  }
  return out;
}

/*
 * Points whose removal changes F. Monotone functionals prune by sign: for point-monotone F nothing
 * is pivotal at the minimum, and for mark-monotone F every removal-pivotal point is also
 * flip-pivotal, so only the quenched set is searched.
 */
inline PivotalSet pivotal_points(const Functional& F, const PointConfiguration& cfg) {
  require_boolean(F, "pivotal_points");
  PivotalSet out;
  if (cfg.size() == 0) return out;
  const double base = F(cfg);
  std::vector<std::size_t> cand;
  if (F.monotone() == Monotonicity::points) {
    if (base < 0) return out;
    for (std::size_t i = 0; i < cfg.size(); ++i) cand.push_back(i);
  } else if (F.monotone() == Monotonicity::marks && cfg.marked()) {
    for (std::size_t i : quenched_pivotal_points(F, cfg).indices) {
      if ((base > 0) == (cfg[i].mark > 0)) cand.push_back(i);
    }
  } else {
    for (std::size_t i = 0; i < cfg.size(); ++i) cand.push_back(i);
  }
  for (std::size_t i : cand) {
    if (!F.affected_by(cfg[i].loc)) continue;
    if (F(remove_point(cfg, i)) != base) out.indices.push_back(i);
  }
  return out;
}

/// Brute force over every point, no pruning; used as a reference.
inline PivotalSet pivotal_points_bruteforce(const Functional& F, const PointConfiguration& cfg) {
  require_boolean(F, "pivotal_points_bruteforce");
  PivotalSet out;
  if (cfg.size() == 0) return out;
  const double base = F(cfg);
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    if (F(remove_point(cfg, i)) != base) out.indices.push_back(i);
  }
  return out;
}

}  // namespace percospec
