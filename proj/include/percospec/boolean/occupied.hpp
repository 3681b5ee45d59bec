#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "percospec/core/arms.hpp"
#include "percospec/core/configuration.hpp"
#include "percospec/core/geometry.hpp"
#include "percospec/core/union_find.hpp"

namespace percospec {

namespace detail {

inline constexpr double kTouchEps = 1e-9;

inline bool in_disk(Point2 p, Point2 c, double slack) { return dist2(p, c) <= 1.0 + slack; }

}  // namespace detail

/// Does B_1(c1) intersect B_1(c2) intersect the closed rectangle I?
inline bool lens_meets_rect(Point2 c1, Point2 c2, const Rect& I) {
  using detail::in_disk;
  using detail::kTouchEps;
  if (dist2(c1, c2) > 4.0) return false;
  if (I.dist2(c1) > 1.0 || I.dist2(c2) > 1.0) return false;
  // Minimise |p - c1| over the convex set B_1(c2) n I; the minimiser is one of the candidates below.
  auto ok = [&](Point2 p, double slack) { return I.contains(p) && in_disk(p, c2, slack) && in_disk(p, c1, slack); };
  if (ok(c1, 0.0)) return true;
  if (ok(I.clamp(c1), 0.0)) return true;
  const Point2 d = c1 - c2;
  const double len = std::sqrt(dot(d, d));
  if (len > 0.0) {
    const Point2 q = c2 + d * (1.0 / len);
    if (I.contains(q) && in_disk(q, c1, kTouchEps)) return true;
  }
  for (const Point2& corner : I.corners()) {
    if (ok(corner, 0.0)) return true;
  }
  for (const Segment& e : I.edges()) {
    const bool vertical = e.a.x == e.b.x;
    const double lo = vertical ? std::min(e.a.y, e.b.y) : std::min(e.a.x, e.b.x);
    const double hi = vertical ? std::max(e.a.y, e.b.y) : std::max(e.a.x, e.b.x);
    // projection of c1 onto the edge
    Point2 proj = vertical ? Point2{e.a.x, std::clamp(c1.y, lo, hi)} : Point2{std::clamp(c1.x, lo, hi), e.a.y};
    if (in_disk(proj, c2, 0.0) && in_disk(proj, c1, 0.0)) return true;
    // circle 2 against the edge line
    const double off = vertical ? e.a.x - c2.x : e.a.y - c2.y;
    const double h2 = 1.0 - off * off;
    if (h2 < 0.0) continue;
    const double h = std::sqrt(h2);
    const double mid = vertical ? c2.y : c2.x;
    for (double s : {mid - h, mid + h}) {
      if (s < lo || s > hi) continue;
      const Point2 p = vertical ? Point2{e.a.x, s} : Point2{s, e.a.y};
      if (in_disk(p, c1, kTouchEps)) return true;
    }
  }
  return false;
}

/// Piece = (disk, rectangle of the region decomposition) with nonempty intersection.
struct DiskPiece {
  std::uint32_t disk;  // index into the input point list
  std::uint32_t rect;
};

/*
 * Exact components of (union of unit disks) n region. The region is cut into closed rectangles;
 * each disk contributes one convex piece per rectangle it meets, and pieces are glued whenever
 * they share a point. Touch flags are exact distance tests against the boundary sides.
 */
struct OccupiedComponents {
  RectDecomposition dec;
  std::vector<DiskPiece> pieces;
  std::vector<std::uint32_t> piece_component;
  std::vector<ComponentInfo> components;

  [[nodiscard]] bool any_component(std::uint32_t mask) const {
    for (const auto& c : components) {
      if ((c.sides & mask) == mask) return true;
    }
    return false;
  }
};

// Pairs of disk indices with |c_i - c_j| <= 2, via a uniform grid of cell size 2.
inline void for_each_close_pair(std::span<const Point2> centers, const auto& fn) {
  const std::size_t n = centers.size();
  if (n < 2) return;
  double x0 = centers[0].x, x1 = x0, y0 = centers[0].y, y1 = y0;
  for (const auto& c : centers) {
    x0 = std::min(x0, c.x);
    x1 = std::max(x1, c.x);
    y0 = std::min(y0, c.y);
    y1 = std::max(y1, c.y);
  }
  const auto nx = static_cast<std::size_t>((x1 - x0) / 2.0) + 1;
  const auto ny = static_cast<std::size_t>((y1 - y0) / 2.0) + 1;
  std::vector<std::uint32_t> start(nx * ny + 1, 0), order(n);
  std::vector<std::size_t> cell(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cx = std::min(nx - 1, static_cast<std::size_t>((centers[i].x - x0) / 2.0));
    const auto cy = std::min(ny - 1, static_cast<std::size_t>((centers[i].y - y0) / 2.0));
    cell[i] = cy * nx + cx;
    ++start[cell[i] + 1];
  }
  for (std::size_t k = 0; k < nx * ny; ++k) start[k + 1] += start[k];
  std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
  for (std::size_t i = 0; i < n; ++i) order[fill[cell[i]]++] = static_cast<std::uint32_t>(i);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cx = cell[i] % nx, cy = cell[i] / nx;
    for (std::size_t yy = cy == 0 ? 0 : cy - 1; yy <= std::min(ny - 1, cy + 1); ++yy) {
      for (std::size_t xx = cx == 0 ? 0 : cx - 1; xx <= std::min(nx - 1, cx + 1); ++xx) {
        const std::size_t k = yy * nx + xx;
        for (std::uint32_t s = start[k]; s < start[k + 1]; ++s) {
          const std::uint32_t j = order[s];
          if (j <= i) continue;
          if (dist2(centers[i], centers[j]) <= 4.0) fn(static_cast<std::uint32_t>(i), j);
        }
      }
    }
  }
}

/// Components of the occupied set restricted to `region`. With `black_only`, marks -1 place no disk.
inline OccupiedComponents occupied_components(std::span<const MarkedPoint> pts, const Region& region,
                                              bool black_only = false) {
  OccupiedComponents out;
  out.dec = decompose(region);
  const auto& rects = out.dec.rects;
  const Rect bbox = region.bounding_rect();

  std::vector<std::uint32_t> disk_ids;
  std::vector<Point2> centers;
  std::vector<std::array<int, 5>> piece_of;  // per retained disk, piece index per rect or -1
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (black_only && pts[i].mark < 0) continue;
    const Point2 c = pts[i].loc;
    if (bbox.dist2(c) > 1.0) continue;
    std::array<int, 5> slots{-1, -1, -1, -1, -1};
    bool any = false;
    for (std::size_t k = 0; k < rects.size(); ++k) {
      if (rects[k].dist2(c) <= 1.0) {
        slots[k] = static_cast<int>(out.pieces.size());
        out.pieces.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(k)});
        any = true;
      }
    }
    if (!any) continue;
    disk_ids.push_back(static_cast<std::uint32_t>(i));
    centers.push_back(c);
    piece_of.push_back(slots);
  }

  WeightedUnionFind uf(out.pieces.size());
  auto weight = [&](std::size_t a, std::size_t b) {
    if (static_cast<int>(a) == out.dec.cut_from && static_cast<int>(b) == out.dec.cut_to) return 1;
    if (static_cast<int>(b) == out.dec.cut_from && static_cast<int>(a) == out.dec.cut_to) return -1;
    return 0;
  };
  // same disk, overlapping rectangles
  for (std::size_t d = 0; d < centers.size(); ++d) {
    for (std::size_t a = 0; a < rects.size(); ++a) {
      if (piece_of[d][a] < 0) continue;
      for (std::size_t b = a + 1; b < rects.size(); ++b) {
        if (piece_of[d][b] < 0) continue;
        const auto I = rects[a].intersect(rects[b]);
        if (I && I->dist2(centers[d]) <= 1.0) {
          uf.unite(static_cast<std::uint32_t>(piece_of[d][a]), static_cast<std::uint32_t>(piece_of[d][b]),
                   weight(a, b));
        }
      }
    }
  }
  // different disks
  for_each_close_pair(centers, [&](std::uint32_t i, std::uint32_t j) {
    for (std::size_t a = 0; a < rects.size(); ++a) {
      if (piece_of[i][a] < 0) continue;
      for (std::size_t b = 0; b < rects.size(); ++b) {
        if (piece_of[j][b] < 0) continue;
        const auto I = a == b ? std::optional<Rect>(rects[a]) : rects[a].intersect(rects[b]);
        if (!I) continue;
        if (lens_meets_rect(centers[i], centers[j], *I)) {
          uf.unite(static_cast<std::uint32_t>(piece_of[i][a]), static_cast<std::uint32_t>(piece_of[j][b]),
                   weight(a, b));
        }
      }
    }
  });

  // dense component labels in piece order
  out.piece_component.assign(out.pieces.size(), 0);
  std::vector<int> label(out.pieces.size(), -1);
  for (std::size_t p = 0; p < out.pieces.size(); ++p) {
    const std::uint32_t r = uf.find(static_cast<std::uint32_t>(p));
    if (label[r] < 0) {
      label[r] = static_cast<int>(out.components.size());
      out.components.push_back({0u, uf.has_cycle(r)});
    }
    out.piece_component[p] = static_cast<std::uint32_t>(label[r]);
  }
  for (std::size_t p = 0; p < out.pieces.size(); ++p) {
    const Point2 c = pts[out.pieces[p].disk].loc;
    const Rect& R = rects[out.pieces[p].rect];
    auto& info = out.components[out.piece_component[p]];
    for (const auto& [tag, seg] : out.dec.sides) {
      if (info.sides & side_bit(tag)) continue;
      const auto clipped = clip_axis_segment(seg, R);
      if (clipped && dist2(c, *clipped) <= 1.0) info.sides |= side_bit(tag);
    }
  }
  return out;
}

enum class Axis { LR, TB };

inline bool occupied_crossing(std::span<const MarkedPoint> pts, const Region& box, Axis axis, bool black_only = false) {
  if (box.kind() != RegionKind::rect) throw ParameterError("occupied_crossing needs a rect region");
  const auto comps = occupied_components(pts, box, black_only);
  const std::uint32_t mask = axis == Axis::LR ? side_bit(SideTag::left) | side_bit(SideTag::right)
                                              : side_bit(SideTag::bottom) | side_bit(SideTag::top);
  return comps.any_component(mask);
}

inline bool occupied_crossing(const PointConfiguration& cfg, const Region& box, Axis axis) {
  return occupied_crossing(cfg.view(), box, axis, false);
}

/// +1 iff the occupied set crosses W_L = [-L, L]^2 from left to right.
inline int crossing_indicator_fL(std::span<const MarkedPoint> pts, double L) {
  return occupied_crossing(pts, Region::square(L), Axis::LR) ? 1 : -1;
}
inline int crossing_indicator_fL(const PointConfiguration& cfg, double L) { return crossing_indicator_fL(cfg.view(), L); }

inline std::string boolean_arm_word(std::span<const MarkedPoint> pts, const Region& region, bool black_only = false) {
  return arm_word(occupied_components(pts, region, black_only).components, region.kind());
}

/// Exact arm event for the Boolean model (occupied arms exact, vacant arms by duality).
inline bool arm_event(std::span<const MarkedPoint> pts, const ArmEventSpec& spec) {
  return match_arm_pattern(spec.pattern, boolean_arm_word(pts, spec.region), spec.cyclic());
}
inline bool arm_event(const PointConfiguration& cfg, const ArmEventSpec& spec) { return arm_event(cfg.view(), spec); }

}  // namespace percospec
