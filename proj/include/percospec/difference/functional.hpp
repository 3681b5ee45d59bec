#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "percospec/boolean/occupied.hpp"
#include "percospec/core/configuration.hpp"
#include "percospec/core/error.hpp"
#include "percospec/voronoi/connectivity.hpp"

namespace percospec {

/*
 * points: adding a point never decreases the value (marks ignored).
 * marks:  F(eta + (x,-1)) <= F(eta) <= F(eta + (x,+1)).
 */
enum class Monotonicity { none, points, marks };

/// Evaluates F for the locations of a fixed configuration under varying marks.
using MarkEvaluator = std::function<double(std::span<const int>)>;

class Functional {
 public:
  using Eval = std::function<double(const PointConfiguration&)>;
  using Binder = std::function<MarkEvaluator(const PointConfiguration&)>;
  using QuenchedHook = std::function<std::vector<std::size_t>(const PointConfiguration&)>;

  struct Traits {
    Monotonicity monotone = Monotonicity::none;
    bool boolean = false;
    bool marked = false;
    std::optional<Rect> dependence;  // points outside never change the value
  };

  Functional(std::string name, Eval eval, Traits traits)
      : name_(std::move(name)), eval_(std::move(eval)), traits_(traits),
        count_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

  double operator()(const PointConfiguration& cfg) const {
    count_->fetch_add(1, std::memory_order_relaxed);
    return eval_(cfg);
  }

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const Traits& traits() const { return traits_; }
  [[nodiscard]] bool boolean() const { return traits_.boolean; }
  [[nodiscard]] bool marked() const { return traits_.marked; }
  [[nodiscard]] Monotonicity monotone() const { return traits_.monotone; }
  [[nodiscard]] bool affected_by(Point2 p) const { return !traits_.dependence || traits_.dependence->contains(p); }

  [[nodiscard]] std::uint64_t evaluations() const { return count_->load(std::memory_order_relaxed); }
  void reset_evaluations() const { count_->store(0); }

  Functional& with_binder(Binder b) {
    binder_ = std::move(b);
    return *this;
  }
  Functional& with_quenched(QuenchedHook q) {
    quenched_ = std::move(q);
    return *this;
  }
  [[nodiscard]] const QuenchedHook& quenched_hook() const { return quenched_; }

  /// Mark evaluator for the locations of cfg; counts one evaluation per call of the returned function.
  [[nodiscard]] MarkEvaluator bind(const PointConfiguration& cfg) const {
    auto counter = count_;
    if (binder_) {
      auto inner = binder_(cfg);
      return [inner = std::move(inner), counter](std::span<const int> marks) {
        counter->fetch_add(1, std::memory_order_relaxed);
        return inner(marks);
      };
    }
    auto work = std::make_shared<PointConfiguration>(cfg);
    auto eval = eval_;
    return [work, eval, counter](std::span<const int> marks) {
      for (std::size_t i = 0; i < marks.size(); ++i) work->set_mark(i, marks[i]);
      counter->fetch_add(1, std::memory_order_relaxed);
      return eval(*work);
    };
  }

 private:
  std::string name_;
  Eval eval_;
  Traits traits_;
  std::shared_ptr<std::atomic<std::uint64_t>> count_;
  Binder binder_;
  QuenchedHook quenched_;
};

namespace functionals {

inline Functional constant(double c) {
  return Functional("constant", [c](const PointConfiguration&) { return c; },
                    {Monotonicity::points, c == 1.0 || c == -1.0, false, Rect{0, 0, 0, 0}});
}

/// 2 * 1{at least one point in B} - 1
inline Functional occupancy(const Rect& B) {
  return Functional(
      "occupancy",
      [B](const PointConfiguration& cfg) {
        for (const auto& p : cfg.points()) {
          if (B.contains(p.loc)) return 1.0;
        }
        return -1.0;
      },
      {Monotonicity::points, true, false, B});
}

/// Left-right crossing of [-L,L]^2 by the union of unit disks.
inline Functional boolean_crossing(double L) {
  if (!(L > 0.0)) throw ParameterError("boolean_crossing: L must be positive");
  return Functional(
      "boolean_crossing",
      [L](const PointConfiguration& cfg) { return static_cast<double>(crossing_indicator_fL(cfg.view(), L)); },
      {Monotonicity::points, true, false, Rect::centered({0, 0}, L + 1.0, L + 1.0)});
}

/// Crossing of [-L,L]^2 by the disks of black points only.
inline Functional marked_boolean_crossing(double L) {
  if (!(L > 0.0)) throw ParameterError("marked_boolean_crossing: L must be positive");
  return Functional(
      "marked_boolean_crossing",
      [L](const PointConfiguration& cfg) {
        return occupied_crossing(cfg.view(), Region::square(L), Axis::LR, true) ? 1.0 : -1.0;
      },
      {Monotonicity::marks, true, true, Rect::centered({0, 0}, L + 1.0, L + 1.0)});
}

/// Black left-right crossing of [-L,L]^2 in the Voronoi colouring; cells are certified by the sampling window.
inline Functional voronoi_crossing(double L) {
  if (!(L > 0.0)) throw ParameterError("voronoi_crossing: L must be positive");
  const Region box = Region::square(L);
  Functional f(
      "voronoi_crossing",
      [box](const PointConfiguration& cfg) { return percospec::voronoi_crossing(cfg, box, 1, Axis::LR) ? 1.0 : -1.0; },
      {Monotonicity::marks, true, true, std::nullopt});
  f.with_binder([box](const PointConfiguration& cfg) -> MarkEvaluator {
    auto vd = std::make_shared<VoronoiDiagram>(make_diagram(cfg));
    auto sc = std::make_shared<CellScaffold>(build_scaffold(*vd, box));
    return [sc](std::span<const int> marks) { return percospec::voronoi_crossing(*sc, marks, 1, Axis::LR) ? 1.0 : -1.0; };
  });
  f.with_quenched([box](const PointConfiguration& cfg) {
    auto vd = make_diagram(cfg);
    auto marks = marks_of(cfg.view());
    return voronoi_quenched_pivotals(build_scaffold(vd, box), marks);
  });
  return f;
}

/*
 * Voronoi crossing of [-a,a]^2 for a finite configuration: the sites are completed by two fixed
 * white rings at radii 3a and 8a, which keeps every cell meeting the box bounded. Only points in
 * [-2a,2a]^2 are used.
 */
inline Functional framed_voronoi_crossing(double a = 1.0) {
  if (!(a > 0.0)) throw ParameterError("framed_voronoi_crossing: a must be positive");
  const Region box = Region::square(a);
  const Rect support = Rect::centered({0, 0}, 2 * a, 2 * a);
  auto frame = std::make_shared<std::vector<Point2>>();
  for (int k = 0; k < 16; ++k) {
    const double th = 2.0 * 3.14159265358979323846 * (k + 0.5) / 16.0;
    frame->push_back({3 * a * std::cos(th), 3 * a * std::sin(th)});
  }
  for (int k = 0; k < 8; ++k) {
    const double th = 2.0 * 3.14159265358979323846 * k / 8.0;
    frame->push_back({8 * a * std::cos(th), 8 * a * std::sin(th)});
  }
  const Rect everywhere{-1e9, 1e9, -1e9, 1e9};
  struct Bound {
    std::shared_ptr<VoronoiDiagram> vd;
    std::shared_ptr<CellScaffold> sc;
    std::vector<std::size_t> used;  // configuration index of each leading site
  };
  auto bind_geometry = [=](const PointConfiguration& cfg) {
    Bound b;
    std::vector<Point2> sites;
    for (std::size_t i = 0; i < cfg.size(); ++i) {
      if (support.contains(cfg[i].loc)) {
        b.used.push_back(i);
        sites.push_back(cfg[i].loc);
      }
    }
    sites.insert(sites.end(), frame->begin(), frame->end());
    b.vd = std::make_shared<VoronoiDiagram>(sites, everywhere);
    b.sc = std::make_shared<CellScaffold>(build_scaffold(*b.vd, box));
    return b;
  };
  auto value = [](const Bound& b, std::span<const int> marks) {
    std::vector<int> m(b.vd->size(), -1);
    for (std::size_t k = 0; k < b.used.size(); ++k) m[k] = marks[b.used[k]];
    return percospec::voronoi_crossing(*b.sc, m, 1, Axis::LR) ? 1.0 : -1.0;
  };
  Functional f(
      "framed_voronoi_crossing",
      [=](const PointConfiguration& cfg) {
        const auto b = bind_geometry(cfg);
        return value(b, marks_of(cfg.view()));
      },
      {Monotonicity::marks, true, true, support});
  f.with_binder([=](const PointConfiguration& cfg) -> MarkEvaluator {
    auto b = bind_geometry(cfg);
    return [b, value](std::span<const int> marks) { return value(b, marks); };
  });
  return f;
}

/// Sign of the mark sum over points in B, ties counted as -1.
inline Functional majority(const Rect& B) {
  return Functional(
      "majority",
      [B](const PointConfiguration& cfg) {
        int s = 0;
        for (const auto& p : cfg.points()) {
          if (B.contains(p.loc)) s += p.mark;
        }
        return s > 0 ? 1.0 : -1.0;
      },
      {Monotonicity::marks, true, true, B});
}

/// Number of points in B; not Boolean.
inline Functional count_in(const Rect& B) {
  return Functional(
      "count",
      [B](const PointConfiguration& cfg) {
        double s = 0;
        for (const auto& p : cfg.points()) s += B.contains(p.loc) ? 1.0 : 0.0;
        return s;
      },
      {Monotonicity::points, false, false, B});
}

}  // namespace functionals
}  // namespace percospec
