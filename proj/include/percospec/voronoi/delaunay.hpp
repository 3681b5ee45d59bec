#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "percospec/core/error.hpp"
#include "percospec/core/geometry.hpp"
#include "percospec/voronoi/predicates.hpp"

namespace percospec {

namespace detail {

// Hilbert index of (x, y) on a 2^16 grid, for a spatially coherent insertion order.
inline std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y) {
  std::uint64_t d = 0;
  for (std::uint32_t s = 1u << 15; s > 0; s >>= 1) {
    const std::uint32_t rx = (x & s) ? 1 : 0;
    const std::uint32_t ry = (y & s) ? 1 : 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = 65535u - x;
        y = 65535u - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

}  // namespace detail

/*
 * Incremental Bowyer-Watson triangulation inside a large enclosing triangle. Predicates are
 * exact, and points on a circumcircle count as outside, so every triangle whose three vertices
 * are input points has an empty circumcircle.
 */
class DelaunayTriangulation {
 public:
  struct Triangle {
    std::array<std::int32_t, 3> v{};   // counter-clockwise
    std::array<std::int32_t, 3> nb{};  // nb[k] is across the edge opposite v[k]; -1 on the hull
    bool alive = true;
  };

  DelaunayTriangulation() = default;
  explicit DelaunayTriangulation(std::span<const Point2> pts) { build(pts); }

  [[nodiscard]] std::size_t num_points() const { return n_; }
  [[nodiscard]] const Point2& point(std::size_t i) const { return verts_[i]; }
  [[nodiscard]] bool degenerate() const { return degenerate_; }
  [[nodiscard]] const std::vector<Triangle>& raw_triangles() const { return tris_; }
  [[nodiscard]] bool is_real(std::int32_t v) const { return v >= 0 && static_cast<std::size_t>(v) < n_; }
  [[nodiscard]] bool is_real_triangle(std::size_t t) const {
    const auto& tr = tris_[t];
    return tr.alive && is_real(tr.v[0]) && is_real(tr.v[1]) && is_real(tr.v[2]);
  }

  /// Triangles with three input vertices, counter-clockwise.
  [[nodiscard]] std::vector<std::array<std::int32_t, 3>> triangles() const {
    std::vector<std::array<std::int32_t, 3>> out;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (is_real_triangle(t)) out.push_back(tris_[t].v);
    }
    return out;
  }

  /// Delaunay edges between input points (i < j), sorted.
  [[nodiscard]] std::vector<std::pair<std::int32_t, std::int32_t>> edges() const {
    std::vector<std::pair<std::int32_t, std::int32_t>> out = degenerate_edges_;
    for (const auto& tr : tris_) {
      if (!tr.alive) continue;
      for (int k = 0; k < 3; ++k) {
        const std::int32_t a = tr.v[(k + 1) % 3], b = tr.v[(k + 2) % 3];
        if (is_real(a) && is_real(b) && a < b) out.emplace_back(a, b);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Triangles around vertex i in counter-clockwise order (includes ones touching the enclosing triangle).
  [[nodiscard]] std::vector<std::int32_t> fan(std::int32_t i) const {
    std::vector<std::int32_t> out;
    if (degenerate_ || !is_real(i)) return out;
    const std::int32_t start = vertex_tri_[static_cast<std::size_t>(i)];
    std::int32_t t = start;
    do {
      out.push_back(t);
      const auto& tr = tris_[static_cast<std::size_t>(t)];
      const int k = index_of(tr, i);
      t = tr.nb[static_cast<std::size_t>((k + 1) % 3)];
      if (t < 0 || out.size() > tris_.size()) throw UsageError("delaunay: open fan around an input point");
    } while (t != start);
    return out;
  }

  static int index_of(const Triangle& tr, std::int32_t v) {
    return tr.v[0] == v ? 0 : (tr.v[1] == v ? 1 : 2);
  }

 private:
  void build(std::span<const Point2> pts) {
    n_ = pts.size();
    verts_.assign(pts.begin(), pts.end());
    tris_.clear();
    degenerate_edges_.clear();
    if (n_ < 3 || all_collinear()) {
      build_degenerate();
      return;
    }
    double x0 = pts[0].x, x1 = x0, y0 = pts[0].y, y1 = y0;
    for (const auto& p : pts) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    const double D = std::max({x1 - x0, y1 - y0, 1.0}) * 64.0;
    verts_.push_back({cx - 2.0 * D, cy - D});
    verts_.push_back({cx + 2.0 * D, cy - D});
    verts_.push_back({cx, cy + 2.0 * D});
    const auto s = static_cast<std::int32_t>(n_);
    tris_.push_back({{s, s + 1, s + 2}, {-1, -1, -1}, true});
    vertex_tri_.assign(n_ + 3, 0);

    std::vector<std::uint32_t> order(n_);
    std::iota(order.begin(), order.end(), 0u);
    std::vector<std::uint64_t> key(n_);
    const double sx = x1 > x0 ? 65535.0 / (x1 - x0) : 0.0, sy = y1 > y0 ? 65535.0 / (y1 - y0) : 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      key[i] = detail::hilbert_index(static_cast<std::uint32_t>((pts[i].x - x0) * sx),
                                     static_cast<std::uint32_t>((pts[i].y - y0) * sy));
    }
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return key[a] != key[b] ? key[a] < key[b] : a < b;
    });
    for (std::uint32_t i : order) insert(static_cast<std::int32_t>(i));
  }

  bool all_collinear() const {
    for (std::size_t k = 2; k < n_; ++k) {
      if (predicates::orient(verts_[0], verts_[1], verts_[k]) != 0) return false;
    }
    return true;
  }

  void build_degenerate() {
    degenerate_ = true;
    std::vector<std::int32_t> order(n_);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
      const Point2 pa = verts_[static_cast<std::size_t>(a)], pb = verts_[static_cast<std::size_t>(b)];
      return pa.x != pb.x ? pa.x < pb.x : pa.y < pb.y;
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
      degenerate_edges_.emplace_back(std::min(order[k - 1], order[k]), std::max(order[k - 1], order[k]));
    }
  }

  const Point2& P(std::int32_t v) const { return verts_[static_cast<std::size_t>(v)]; }

  std::int32_t locate(const Point2& p) const {
    std::int32_t t = last_;
    for (std::size_t steps = 0; steps <= 4 * tris_.size() + 16; ++steps) {
      const auto& tr = tris_[static_cast<std::size_t>(t)];
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        if (predicates::orient(P(tr.v[(k + 1) % 3]), P(tr.v[(k + 2) % 3]), p) < 0) {
          t = tr.nb[static_cast<std::size_t>(k)];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
      if (t < 0) break;
    }
    throw UsageError("delaunay: point location failed");
  }

  bool in_circle(std::int32_t t, const Point2& p) const {
    const auto& tr = tris_[static_cast<std::size_t>(t)];
    return predicates::incircle(P(tr.v[0]), P(tr.v[1]), P(tr.v[2]), p) > 0;
  }

  void insert(std::int32_t vi) {
    const Point2 p = P(vi);
    const std::int32_t t0 = locate(p);
    cavity_.clear();
    cavity_.push_back(t0);
    tris_[static_cast<std::size_t>(t0)].alive = false;
    for (std::size_t q = 0; q < cavity_.size(); ++q) {
      const auto& tr = tris_[static_cast<std::size_t>(cavity_[q])];
      for (int k = 0; k < 3; ++k) {
        const std::int32_t nb = tr.nb[static_cast<std::size_t>(k)];
        if (nb < 0 || !tris_[static_cast<std::size_t>(nb)].alive) continue;
        if (in_circle(nb, p)) {
          tris_[static_cast<std::size_t>(nb)].alive = false;
          cavity_.push_back(nb);
        }
      }
    }
    // boundary edges (a, b) seen from inside the cavity, with the outer neighbour
    boundary_.clear();
    for (std::int32_t c : cavity_) {
      const auto& tr = tris_[static_cast<std::size_t>(c)];
      for (int k = 0; k < 3; ++k) {
        const std::int32_t nb = tr.nb[static_cast<std::size_t>(k)];
        if (nb >= 0 && !tris_[static_cast<std::size_t>(nb)].alive) continue;
        boundary_.push_back({tr.v[(k + 1) % 3], tr.v[(k + 2) % 3], nb});
      }
    }
    // a cavity with c triangles has c + 2 boundary edges, so every slot is reused
    std::size_t reuse = 0;
    created_.clear();
    for (const auto& e : boundary_) {
      std::int32_t id;
      if (reuse < cavity_.size()) {
        id = cavity_[reuse++];
      } else {
        id = static_cast<std::int32_t>(tris_.size());
        tris_.emplace_back();
      }
      auto& tr = tris_[static_cast<std::size_t>(id)];
      tr.v = {e.a, e.b, vi};
      tr.nb = {-1, -1, e.outer};
      tr.alive = true;
      created_.push_back(id);
    }
    // link to the outside
    for (std::int32_t id : created_) {
      const auto& tr = tris_[static_cast<std::size_t>(id)];
      const std::int32_t outer = tr.nb[2];
      if (outer < 0) continue;
      auto& ot = tris_[static_cast<std::size_t>(outer)];
      for (int k = 0; k < 3; ++k) {
        if (ot.v[(k + 1) % 3] == tr.v[1] && ot.v[(k + 2) % 3] == tr.v[0]) ot.nb[static_cast<std::size_t>(k)] = id;
      }
    }
    // link new triangles among themselves: edge (b, p) of one is edge (p, a') of the one with a' = b
    for (std::int32_t id : created_) {
      auto& tr = tris_[static_cast<std::size_t>(id)];
      for (std::int32_t other : created_) {
        if (other == id) continue;
        const auto& o = tris_[static_cast<std::size_t>(other)];
        if (o.v[0] == tr.v[1]) tr.nb[0] = other;
        if (o.v[1] == tr.v[0]) tr.nb[1] = other;
      }
      vertex_tri_[static_cast<std::size_t>(tr.v[0])] = id;
      vertex_tri_[static_cast<std::size_t>(tr.v[1])] = id;
    }
    vertex_tri_[static_cast<std::size_t>(vi)] = created_.front();
    last_ = created_.front();
  }

  struct BoundaryEdge {
    std::int32_t a, b, outer;
  };

  std::size_t n_ = 0;
  std::vector<Point2> verts_;
  std::vector<Triangle> tris_;
  std::vector<std::int32_t> vertex_tri_;
  std::vector<std::pair<std::int32_t, std::int32_t>> degenerate_edges_;
  bool degenerate_ = false;
  std::int32_t last_ = 0;
  std::vector<std::int32_t> cavity_, created_;
  std::vector<BoundaryEdge> boundary_;
};

}  // namespace percospec
