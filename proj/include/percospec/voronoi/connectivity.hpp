#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "percospec/boolean/occupied.hpp"
#include "percospec/core/arms.hpp"
#include "percospec/core/configuration.hpp"
#include "percospec/core/parallel.hpp"
#include "percospec/core/sampling.hpp"
#include "percospec/core/stats.hpp"
#include "percospec/core/union_find.hpp"
#include "percospec/voronoi/diagram.hpp"

namespace percospec {

inline constexpr double kVoronoiPad = 4.0;

inline VoronoiDiagram make_diagram(std::span<const MarkedPoint> pts, const Rect& window) {
  std::vector<Point2> sites;
  sites.reserve(pts.size());
  for (const auto& p : pts) sites.push_back(p.loc);
  return VoronoiDiagram(sites, window);
}
inline VoronoiDiagram make_diagram(const PointConfiguration& cfg) {
  return make_diagram(cfg.view(), cfg.window().bounding_rect());
}

/// Mark-independent connectivity data of the cells meeting a region, reused across colourings.
struct CellScaffold {
  struct Link {
    std::uint32_t a, b;
    int w;
  };
  RectDecomposition dec;
  std::vector<std::int32_t> cells;
  std::vector<std::pair<std::int32_t, std::uint32_t>> pieces;  // (cell, rect)
  std::vector<Link> links;                                     // pieces joined when both cells share a colour
  std::vector<std::uint32_t> piece_sides;
};

/*
 * Two cells are joined inside a rectangle piece when their shared Voronoi edge meets it, so
 * connectivity is that of the closed coloured set intersected with the region.
 */
inline CellScaffold build_scaffold(VoronoiDiagram& vd, const Region& region) {
  CellScaffold sc;
  sc.dec = decompose(region);
  const auto& rects = sc.dec.rects;
  for (const auto& r : rects) {
    const auto c = vd.cells_meeting(r);
    sc.cells.insert(sc.cells.end(), c.begin(), c.end());
  }
  std::sort(sc.cells.begin(), sc.cells.end());
  sc.cells.erase(std::unique(sc.cells.begin(), sc.cells.end()), sc.cells.end());

  std::vector<std::array<int, 5>> slots(vd.size(), {-1, -1, -1, -1, -1});
  for (std::int32_t i : sc.cells) {
    const VoronoiCell& c = vd.cell(i);
    for (std::size_t k = 0; k < rects.size(); ++k) {
      if (convex_meets_rect(c.vertices, rects[k])) {
        slots[static_cast<std::size_t>(i)][k] = static_cast<int>(sc.pieces.size());
        sc.pieces.emplace_back(i, static_cast<std::uint32_t>(k));
      }
    }
  }
  auto weight = [&](std::size_t a, std::size_t b) {
    if (static_cast<int>(a) == sc.dec.cut_from && static_cast<int>(b) == sc.dec.cut_to) return 1;
    if (static_cast<int>(b) == sc.dec.cut_from && static_cast<int>(a) == sc.dec.cut_to) return -1;
    return 0;
  };
  auto link = [&](int pa, int pb, int w) {
    sc.links.push_back({static_cast<std::uint32_t>(pa), static_cast<std::uint32_t>(pb), w});
  };
  for (std::int32_t i : sc.cells) {
    const auto& si = slots[static_cast<std::size_t>(i)];
    const VoronoiCell& c = vd.cell(i);
    for (std::size_t a = 0; a < rects.size(); ++a) {
      if (si[a] < 0) continue;
      for (std::size_t b = a + 1; b < rects.size(); ++b) {
        if (si[b] < 0) continue;
        const auto I = rects[a].intersect(rects[b]);
        if (I && convex_meets_rect(c.vertices, *I)) link(si[a], si[b], weight(a, b));
      }
    }
    for (std::size_t e = 0; e < c.neighbors.size(); ++e) {
      const std::int32_t j = c.neighbors[e];
      if (j <= i) continue;
      const auto& sj = slots[static_cast<std::size_t>(j)];
      const Segment seg = c.edge(e);
      for (std::size_t a = 0; a < rects.size(); ++a) {
        if (si[a] < 0) continue;
        for (std::size_t b = 0; b < rects.size(); ++b) {
          if (sj[b] < 0) continue;
          const auto I = a == b ? std::optional<Rect>(rects[a]) : rects[a].intersect(rects[b]);
          if (I && segment_meets_rect(seg, *I)) link(si[a], sj[b], weight(a, b));
        }
      }
    }
  }
  sc.piece_sides.assign(sc.pieces.size(), 0u);
  for (std::size_t p = 0; p < sc.pieces.size(); ++p) {
    const VoronoiCell& c = vd.cell(sc.pieces[p].first);
    const Rect& R = rects[sc.pieces[p].second];
    for (const auto& [tag, seg] : sc.dec.sides) {
      const auto clipped = clip_axis_segment(seg, R);
      if (clipped && convex_meets_segment(c.vertices, *clipped)) sc.piece_sides[p] |= side_bit(tag);
    }
  }
  return sc;
}

/// Components of the union of cells of one colour restricted to the scaffold region.
struct ColoredComponents {
  std::vector<ComponentInfo> components;

  [[nodiscard]] bool any_component(std::uint32_t mask) const {
    for (const auto& c : components) {
      if ((c.sides & mask) == mask) return true;
    }
    return false;
  }
};

/// `marks` is indexed like the diagram sites; colour +1 is black.
inline ColoredComponents colored_components(const CellScaffold& sc, std::span<const int> marks, int color) {
  const std::size_t np = sc.pieces.size();
  WeightedUnionFind uf(np);
  auto in = [&](std::uint32_t p) { return marks[static_cast<std::size_t>(sc.pieces[p].first)] == color; };
  for (const auto& l : sc.links) {
    if (in(l.a) && in(l.b)) uf.unite(l.a, l.b, l.w);
  }
  ColoredComponents out;
  std::vector<int> label(np, -1);
  for (std::uint32_t p = 0; p < np; ++p) {
    if (!in(p)) continue;
    const std::uint32_t r = uf.find(p);
    if (label[r] < 0) {
      label[r] = static_cast<int>(out.components.size());
      out.components.push_back({0u, uf.has_cycle(r)});
    }
    out.components[static_cast<std::size_t>(label[r])].sides |= sc.piece_sides[p];
  }
  return out;
}

inline ColoredComponents colored_components(VoronoiDiagram& vd, std::span<const int> marks, const Region& region,
                                            int color) {
  return colored_components(build_scaffold(vd, region), marks, color);
}

inline std::uint32_t crossing_mask(Axis axis) {
  return axis == Axis::LR ? side_bit(SideTag::left) | side_bit(SideTag::right)
                          : side_bit(SideTag::bottom) | side_bit(SideTag::top);
}

inline bool voronoi_crossing(const CellScaffold& sc, std::span<const int> marks, int color, Axis axis) {
  return colored_components(sc, marks, color).any_component(crossing_mask(axis));
}

inline std::vector<int> marks_of(std::span<const MarkedPoint> pts) {
  std::vector<int> m(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) m[i] = pts[i].mark;
  return m;
}

inline bool voronoi_crossing(VoronoiDiagram& vd, std::span<const int> marks, const Region& box, int color, Axis axis) {
  if (box.kind() != RegionKind::rect) throw ParameterError("voronoi_crossing needs a rect region");
  return voronoi_crossing(build_scaffold(vd, box), marks, color, axis);
}

inline bool voronoi_crossing(const PointConfiguration& cfg, const Region& box, int color, Axis axis) {
  auto vd = make_diagram(cfg);
  return voronoi_crossing(vd, marks_of(cfg.view()), box, color, axis);
}

inline std::string voronoi_arm_word(VoronoiDiagram& vd, std::span<const int> marks, const Region& region) {
  return arm_word(colored_components(vd, marks, region, 1).components, region.kind());
}

/*
 * Mark flips that change the black crossing of `box`. Only cells meeting the box can matter;
 * the returned indices are diagram sites.
 */
inline std::vector<std::size_t> voronoi_quenched_pivotals(const CellScaffold& sc, std::vector<int>& marks, Axis axis = Axis::LR) {
  std::vector<std::size_t> out;
  const bool base = voronoi_crossing(sc, marks, 1, axis);
  for (std::int32_t i : sc.cells) {
    auto& m = marks[static_cast<std::size_t>(i)];
    m = -m;
    if (voronoi_crossing(sc, marks, 1, axis) != base) out.push_back(static_cast<std::size_t>(i));
    m = -m;
  }
  return out;
}

/// Arm event on the coloured cells; O is black, V is white.
inline bool voronoi_arm_event(VoronoiDiagram& vd, std::span<const int> marks, const ArmEventSpec& spec) {
  return match_arm_pattern(spec.pattern, voronoi_arm_word(vd, marks, spec.region), spec.cyclic());
}
inline bool voronoi_arm_event(const PointConfiguration& cfg, const ArmEventSpec& spec) {
  auto vd = make_diagram(cfg);
  return voronoi_arm_event(vd, marks_of(cfg.view()), spec);
}

/*
 * Enlarges the sampling window of `cfg` by `pad` on every side, adding an independent Poisson
 * layer, so the result is again a Poisson sample on the larger window.
 */
inline PointConfiguration extend_sample(const PointConfiguration& cfg, double intensity, double pad, const SeedSpec& seed) {
  const Rect old = cfg.window().bounding_rect();
  const Region bigger = cfg.window().padded(pad);
  const auto ring = sample_poisson(intensity, bigger, seed, cfg.marked());
  PointConfiguration out(bigger, cfg.marked(), cfg.id());
  for (const auto& p : cfg.points()) out.push_unchecked(p);
  for (const auto& p : ring.points()) {
    if (!old.contains(p.loc)) out.push_unchecked(p);
  }
  return out;
}

/// Runs fn(cfg), enlarging the sample with fresh layers while cell certification fails.
template <class Fn>
auto with_padding_retry(PointConfiguration cfg, double intensity, const SeedSpec& seed, Fn&& fn, int max_layers = 4) {
  for (int layer = 0;; ++layer) {
    try {
      return fn(cfg);
    } catch (const PaddingError&) {
      if (layer >= max_layers) throw;
      cfg = extend_sample(cfg, intensity, kVoronoiPad, seed.with_purpose("ring").with_sub(static_cast<std::uint64_t>(layer)));
    }
  }
}

/// Samples a marked intensity-1 process around `region` and calls fn(diagram, marks, cfg), growing the window on PaddingError.
template <class Fn>
auto on_voronoi_sample(const Region& region, const SeedSpec& seed, Fn&& fn, double pad = kVoronoiPad) {
  const auto cfg = sample_poisson(1.0, region.padded(pad), seed, true);
  return with_padding_retry(cfg, 1.0, seed, [&](const PointConfiguration& c) {
    auto vd = make_diagram(c);
    auto marks = marks_of(c.view());
    return fn(vd, marks, c);
  });
}

inline EstimatorResult estimate_voronoi_crossing_probability(double L, std::size_t n_replicas, const SeedSpec& seed,
                                                             unsigned threads = 1) {
  if (!(L > 0.0)) throw ParameterError("L must be positive");
  if (n_replicas < 100) throw ParameterError("estimate_voronoi_crossing_probability needs n_replicas >= 100");
  Stopwatch sw;
  const Region box = Region::square(L);
  const auto hits = parallel_map(n_replicas, threads, [&](std::size_t i) -> char {
    return on_voronoi_sample(box, seed.with_replica(i), [&](VoronoiDiagram& vd, const std::vector<int>& m, const auto&) {
      return voronoi_crossing(vd, m, box, 1, Axis::LR);
    }) ? 1 : 0;
  });
  std::uint64_t s = 0;
  for (char h : hits) s += static_cast<std::uint64_t>(h);
  EstimatorResult r = bernoulli_estimate(s, n_replicas);
  r.seed = seed;
  r.meta = "voronoi crossing";
  r.wall_seconds = sw.seconds();
  return r;
}

inline EstimatorResult estimate_voronoi_arm_probability(const ArmEventSpec& spec, std::size_t n_replicas,
                                                        const SeedSpec& seed, unsigned threads = 1,
                                                        double pad = kVoronoiPad) {
  if (n_replicas < 100) throw ParameterError("estimate_voronoi_arm_probability needs n_replicas >= 100");
  spec.validate();
  Stopwatch sw;
  const auto hits = parallel_map(n_replicas, threads, [&](std::size_t i) -> char {
    return on_voronoi_sample(spec.region, seed.with_replica(i),
                             [&](VoronoiDiagram& vd, const std::vector<int>& m, const auto&) {
                               return voronoi_arm_event(vd, m, spec);
                             }, pad)
               ? 1
               : 0;
  });
  std::uint64_t s = 0;
  for (char h : hits) s += static_cast<std::uint64_t>(h);
  EstimatorResult r = bernoulli_estimate(s, n_replicas);
  r.seed = seed;
  r.meta = "voronoi arm " + spec.pattern;
  r.wall_seconds = sw.seconds();
  return r;
}

}  // namespace percospec
