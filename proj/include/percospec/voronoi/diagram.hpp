#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "percospec/core/error.hpp"
#include "percospec/core/geometry.hpp"
#include "percospec/voronoi/delaunay.hpp"
#include "percospec/voronoi/predicates.hpp"

namespace percospec {

// Separating-axis test for two convex point sets given in order (a segment is a 2-gon).
inline bool convex_sets_meet(std::span<const Point2> A, std::span<const Point2> B) {
  auto separated_along_edges = [](std::span<const Point2> P, std::span<const Point2> Q) {
    const std::size_t m = P.size();
    for (std::size_t k = 0; k < m; ++k) {
      const Point2 e = P[(k + 1) % m] - P[k];
      const Point2 nrm{-e.y, e.x};
      if (nrm.x == 0.0 && nrm.y == 0.0) continue;
      double pmin = std::numeric_limits<double>::infinity(), pmax = -pmin;
      double qmin = pmin, qmax = -pmin;
      for (const auto& p : P) {
        const double v = dot(p, nrm);
        pmin = std::min(pmin, v);
        pmax = std::max(pmax, v);
      }
      for (const auto& q : Q) {
        const double v = dot(q, nrm);
        qmin = std::min(qmin, v);
        qmax = std::max(qmax, v);
      }
      if (pmax < qmin || qmax < pmin) return true;
    }
    return false;
  };
  return !separated_along_edges(A, B) && !separated_along_edges(B, A);
}

inline bool convex_meets_rect(std::span<const Point2> poly, const Rect& r) {
  const auto c = r.corners();
  return convex_sets_meet(poly, c);
}

inline bool convex_meets_segment(std::span<const Point2> poly, const Segment& s) {
  const Point2 seg[2] = {s.a, s.b};
  return convex_sets_meet(poly, seg);
}

struct VoronoiCell {
  std::int32_t site = -1;
  std::vector<Point2> vertices;         // counter-clockwise
  std::vector<std::int32_t> neighbors;  // neighbors[k] shares the edge vertices[k] -> vertices[k+1]

  [[nodiscard]] Segment edge(std::size_t k) const { return {vertices[k], vertices[(k + 1) % vertices.size()]}; }
};

/*
 * Voronoi cells read off a Delaunay triangulation of the sample. A cell is certified when every
 * triangle around its site has its circumdisk inside the sampling window: such triangles are
 * Delaunay for the full Poisson process, so the cell is exact. Queries on uncertified cells
 * raise PaddingError.
 */
class VoronoiDiagram {
 public:
  VoronoiDiagram(std::span<const Point2> sites, const Rect& window)
      : sites_(sites.begin(), sites.end()), window_(window), dt_(sites) {
    const auto& tris = dt_.raw_triangles();
    good_.assign(tris.size(), 0);
    centers_.assign(tris.size(), Point2{});
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!dt_.is_real_triangle(t)) continue;
      const auto& v = tris[t].v;
      const Point2 c = predicates::circumcenter(sites_[static_cast<std::size_t>(v[0])],
                                                sites_[static_cast<std::size_t>(v[1])],
                                                sites_[static_cast<std::size_t>(v[2])]);
      centers_[t] = c;
      const double rho = std::sqrt(dist2(c, sites_[static_cast<std::size_t>(v[0])])) * (1.0 + 1e-12);
      good_[t] = std::isfinite(rho) && c.x - rho >= window_.x0 && c.x + rho <= window_.x1 &&
                 c.y - rho >= window_.y0 && c.y + rho <= window_.y1;
    }
    cells_.resize(sites_.size());
    state_.assign(sites_.size(), 0);
  }

  [[nodiscard]] std::size_t size() const { return sites_.size(); }
  [[nodiscard]] const Point2& site(std::size_t i) const { return sites_[i]; }
  [[nodiscard]] const DelaunayTriangulation& delaunay() const { return dt_; }
  [[nodiscard]] const Rect& window() const { return window_; }

  bool certified(std::int32_t i) {
    ensure(i);
    return state_[static_cast<std::size_t>(i)] == 1;
  }

  const VoronoiCell& cell(std::int32_t i) {
    if (!certified(i)) throw PaddingError("voronoi: cell geometry not certified by the sampling window");
    return *cells_[static_cast<std::size_t>(i)];
  }

  [[nodiscard]] std::int32_t nearest_site(Point2 q) const {
    std::int32_t best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      const double d = dist2(q, sites_[i]);
      if (d < bd) {
        bd = d;
        best = static_cast<std::int32_t>(i);
      }
    }
    return best;
  }

  /// Cells met by the segment a -> b, in order, following bisector crossings.
  std::vector<std::int32_t> boundary_cell_walk(const Segment& s) {
    if (!window_.contains(s.a) || !window_.contains(s.b)) throw PaddingError("boundary_cell_walk: segment leaves the window");
    std::vector<std::int32_t> out;
    std::int32_t cur = nearest_site(s.a);
    if (cur < 0) return out;
    double t = 0.0;
    const Point2 d = s.b - s.a;
    for (std::size_t guard = 0; guard <= sites_.size(); ++guard) {
      out.push_back(cur);
      const VoronoiCell& c = cell(cur);
      const Point2 si = sites_[static_cast<std::size_t>(cur)];
      double best_t = std::numeric_limits<double>::infinity();
      std::int32_t next = -1;
      for (std::int32_t j : c.neighbors) {
        const Point2 sj = sites_[static_cast<std::size_t>(j)];
        const Point2 w = sj - si;
        const double g0 = dot(sj, sj) - dot(si, si) - 2.0 * dot(s.a, w);
        const double g1 = -2.0 * dot(d, w);
        if (!(g1 < 0.0)) continue;
        const double tj = -g0 / g1;
        if (tj > t && tj < best_t) {
          best_t = tj;
          next = j;
        }
      }
      if (next < 0 || best_t > 1.0) return out;
      t = best_t;
      cur = next;
    }
    throw UsageError("boundary_cell_walk: walk did not terminate");
  }

  /// Sites whose cells meet the closed rectangle r: sites inside r plus cells crossed by its edges.
  std::vector<std::int32_t> cells_meeting(const Rect& r) {
    std::vector<std::int32_t> out;
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      if (r.contains(sites_[i])) out.push_back(static_cast<std::int32_t>(i));
    }
    for (const auto& e : r.edges()) {
      const auto w = boundary_cell_walk(e);
      out.insert(out.end(), w.begin(), w.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  void ensure(std::int32_t i) {
    const auto k = static_cast<std::size_t>(i);
    if (state_[k] != 0) return;
    state_[k] = 2;
    if (dt_.degenerate()) return;
    const auto fan = dt_.fan(i);
    VoronoiCell c;
    c.site = i;
    const auto& tris = dt_.raw_triangles();
    for (std::int32_t t : fan) {
      if (!good_[static_cast<std::size_t>(t)]) return;
      const auto& tr = tris[static_cast<std::size_t>(t)];
      const int pos = DelaunayTriangulation::index_of(tr, i);
      c.vertices.push_back(centers_[static_cast<std::size_t>(t)]);
      c.neighbors.push_back(tr.v[static_cast<std::size_t>((pos + 2) % 3)]);
    }
    cells_[k] = std::move(c);
    state_[k] = 1;
  }

  std::vector<Point2> sites_;
  Rect window_;
  DelaunayTriangulation dt_;
  std::vector<char> good_;
  std::vector<Point2> centers_;
  std::vector<std::optional<VoronoiCell>> cells_;
  std::vector<char> state_;  // 0 unknown, 1 certified, 2 not certified
};

}  // namespace percospec
