#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "percospec/core/error.hpp"

namespace percospec {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double dist2(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct Segment {
  Point2 a;
  Point2 b;
};

/// Squared distance from p to the closed segment s.
inline double dist2(Point2 p, const Segment& s) {
  const Point2 d = s.b - s.a;
  const double len2 = dot(d, d);
  double t = len2 > 0.0 ? dot(p - s.a, d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return dist2(p, s.a + d * t);
}

/// Closed axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;

  static Rect centered(Point2 c, double a, double b) { return {c.x - a, c.x + a, c.y - b, c.y + b}; }

  [[nodiscard]] double width() const { return x1 - x0; }
  [[nodiscard]] double height() const { return y1 - y0; }
  [[nodiscard]] double area() const { return width() * height(); }
  [[nodiscard]] bool contains(Point2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
  [[nodiscard]] Point2 clamp(Point2 p) const { return {std::clamp(p.x, x0, x1), std::clamp(p.y, y0, y1)}; }
  [[nodiscard]] double dist2(Point2 p) const { return percospec::dist2(p, clamp(p)); }
  [[nodiscard]] Rect expanded(double d) const { return {x0 - d, x1 + d, y0 - d, y1 + d}; }
  [[nodiscard]] bool contains(const Rect& o) const {
    return o.x0 >= x0 && o.x1 <= x1 && o.y0 >= y0 && o.y1 <= y1;
  }
  [[nodiscard]] std::optional<Rect> intersect(const Rect& o) const {
    Rect r{std::max(x0, o.x0), std::min(x1, o.x1), std::max(y0, o.y0), std::min(y1, o.y1)};
    if (r.x0 > r.x1 || r.y0 > r.y1) return std::nullopt;
    return r;
  }
  [[nodiscard]] std::array<Point2, 4> corners() const {
    return {Point2{x0, y0}, Point2{x1, y0}, Point2{x1, y1}, Point2{x0, y1}};
  }
  [[nodiscard]] std::array<Segment, 4> edges() const {
    const auto c = corners();
    return {Segment{c[0], c[1]}, Segment{c[1], c[2]}, Segment{c[2], c[3]}, Segment{c[3], c[0]}};
  }
};

/// Clip an axis-aligned segment to a rectangle; nullopt when they do not meet.
inline std::optional<Segment> clip_axis_segment(const Segment& s, const Rect& r) {
  const double sx0 = std::min(s.a.x, s.b.x), sx1 = std::max(s.a.x, s.b.x);
  const double sy0 = std::min(s.a.y, s.b.y), sy1 = std::max(s.a.y, s.b.y);
  const auto box = r.intersect(Rect{sx0, sx1, sy0, sy1});
  if (!box) return std::nullopt;
  return Segment{{box->x0, box->y0}, {box->x1, box->y1}};
}

/// Closed segment vs closed rectangle (Liang-Barsky).
inline bool segment_meets_rect(const Segment& s, const Rect& r) {
  double t0 = 0.0, t1 = 1.0;
  const double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {s.a.x - r.x0, r.x1 - s.a.x, s.a.y - r.y0, r.y1 - s.a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
    } else {
      const double t = q[i] / p[i];
      if (p[i] < 0.0) {
        t0 = std::max(t0, t);
      } else {
        t1 = std::min(t1, t);
      }
      if (t0 > t1) return false;
    }
  }
  return true;
}

enum class RegionKind { rect, annulus, half_annulus, quarter_annulus };

inline std::string to_string(RegionKind k) {
  switch (k) {
    case RegionKind::rect: return "rect";
    case RegionKind::annulus: return "annulus";
    case RegionKind::half_annulus: return "half_annulus";
    case RegionKind::quarter_annulus: return "quarter_annulus";
  }
  return "?";
}

/*
 * Planar window descriptor. Annulus kinds use sup-norm squares: center + [-R,R]^2 minus the
 * open square center + (-r,r)^2; the half annulus keeps y >= center.y and the quarter annulus
 * additionally x >= center.x.
 */
class Region {
 public:
  Region() = default;

  static Region rect(Point2 center, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b) || !is_finite(center)) {
      throw ParameterError("rect region needs finite half-widths a, b > 0");
    }
    Region g;
    g.kind_ = RegionKind::rect;
    g.center_ = center;
    g.a_ = a;
    g.b_ = b;
    return g;
  }
  /// W_L = [-L, L]^2.
  static Region square(double half_width) { return rect({0.0, 0.0}, half_width, half_width); }

  static Region annulus(Point2 center, double r, double R) { return make_annulus(RegionKind::annulus, center, r, R); }
  static Region half_annulus(Point2 center, double r, double R) {
    return make_annulus(RegionKind::half_annulus, center, r, R);
  }
  static Region quarter_annulus(Point2 center, double r, double R) {
    return make_annulus(RegionKind::quarter_annulus, center, r, R);
  }

  [[nodiscard]] RegionKind kind() const { return kind_; }
  [[nodiscard]] Point2 center() const { return center_; }
  [[nodiscard]] double half_width() const { return a_; }
  [[nodiscard]] double half_height() const { return b_; }
  [[nodiscard]] double inner() const { return r_; }
  [[nodiscard]] double outer() const { return R_; }
  [[nodiscard]] bool is_annular() const { return kind_ != RegionKind::rect; }

  [[nodiscard]] double area() const {
    switch (kind_) {
      case RegionKind::rect: return 4.0 * a_ * b_;
      case RegionKind::annulus: return 4.0 * (R_ * R_ - r_ * r_);
      case RegionKind::half_annulus: return 2.0 * (R_ * R_ - r_ * r_);
      case RegionKind::quarter_annulus: return R_ * R_ - r_ * r_;
    }
    return 0.0;
  }

  [[nodiscard]] Rect bounding_rect() const {
    const Point2 c = center_;
    switch (kind_) {
      case RegionKind::rect: return Rect::centered(c, a_, b_);
      case RegionKind::annulus: return Rect::centered(c, R_, R_);
      case RegionKind::half_annulus: return {c.x - R_, c.x + R_, c.y, c.y + R_};
      case RegionKind::quarter_annulus: return {c.x, c.x + R_, c.y, c.y + R_};
    }
    return {};
  }

  [[nodiscard]] bool contains(Point2 p) const {
    if (!bounding_rect().contains(p)) return false;
    if (kind_ == RegionKind::rect) return true;
    const double dx = std::fabs(p.x - center_.x), dy = std::fabs(p.y - center_.y);
    return !(dx < r_ && dy < r_);
  }

  /// The sup-norm window enclosing this region enlarged by pad (used as a sampling window).
  [[nodiscard]] Region padded(double pad) const {
    if (pad < 0.0) throw ParameterError("padding must be >= 0");
    const Rect b = bounding_rect().expanded(pad);
    return rect({0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1)}, 0.5 * b.width(), 0.5 * b.height());
  }

  friend bool operator==(const Region&, const Region&) = default;

 private:
  static Region make_annulus(RegionKind k, Point2 center, double r, double R) {
    if (!(r > 0.0) || !(R > r) || !std::isfinite(R) || !is_finite(center)) {
      throw ParameterError("annulus region needs 0 < r < R");
    }
    Region g;
    g.kind_ = k;
    g.center_ = center;
    g.r_ = r;
    g.R_ = R;
    return g;
  }

  RegionKind kind_ = RegionKind::rect;
  Point2 center_{};
  double a_ = 1.0;
  double b_ = 1.0;
  double r_ = 0.0;
  double R_ = 0.0;
};

enum class SideTag { left, right, bottom, top, inner, outer, flat_start, flat_end };

/*
 * A region written as a union of closed rectangles plus its named boundary sides.
 *
 * For the full annulus the right band is split along the ray {y = cy, x > cx}; moving from
 * rects[cut_from] to rects[cut_to] across that ray is one counter-clockwise turn around the
 * hole, which lets connectivity code detect circuits.
 */
struct RectDecomposition {
  std::vector<Rect> rects;
  std::vector<std::pair<SideTag, Segment>> sides;
  int cut_from = -1;
  int cut_to = -1;
};

inline RectDecomposition decompose(const Region& g) {
  RectDecomposition d;
  const Point2 c = g.center();
  const double cx = c.x, cy = c.y;
  auto add_side = [&](SideTag t, Point2 a, Point2 b) { d.sides.push_back({t, Segment{a, b}}); };
  if (g.kind() == RegionKind::rect) {
    const Rect b = g.bounding_rect();
    d.rects.push_back(b);
    add_side(SideTag::left, {b.x0, b.y0}, {b.x0, b.y1});
    add_side(SideTag::right, {b.x1, b.y0}, {b.x1, b.y1});
    add_side(SideTag::bottom, {b.x0, b.y0}, {b.x1, b.y0});
    add_side(SideTag::top, {b.x0, b.y1}, {b.x1, b.y1});
    return d;
  }
  const double r = g.inner(), R = g.outer();
  switch (g.kind()) {
    case RegionKind::annulus:
      d.rects = {Rect{cx + r, cx + R, cy - R, cy}, Rect{cx + r, cx + R, cy, cy + R}, Rect{cx - R, cx + R, cy + r, cy + R},
                 Rect{cx - R, cx - r, cy - R, cy + R}, Rect{cx - R, cx + R, cy - R, cy - r}};
      d.cut_from = 0;
      d.cut_to = 1;
      add_side(SideTag::inner, {cx - r, cy - r}, {cx + r, cy - r});
      add_side(SideTag::inner, {cx + r, cy - r}, {cx + r, cy + r});
      add_side(SideTag::inner, {cx - r, cy + r}, {cx + r, cy + r});
      add_side(SideTag::inner, {cx - r, cy - r}, {cx - r, cy + r});
      add_side(SideTag::outer, {cx - R, cy - R}, {cx + R, cy - R});
      add_side(SideTag::outer, {cx + R, cy - R}, {cx + R, cy + R});
      add_side(SideTag::outer, {cx - R, cy + R}, {cx + R, cy + R});
      add_side(SideTag::outer, {cx - R, cy - R}, {cx - R, cy + R});
      break;
    case RegionKind::half_annulus:
      d.rects = {Rect{cx + r, cx + R, cy, cy + R}, Rect{cx - R, cx + R, cy + r, cy + R}, Rect{cx - R, cx - r, cy, cy + R}};
      add_side(SideTag::inner, {cx + r, cy}, {cx + r, cy + r});
      add_side(SideTag::inner, {cx - r, cy + r}, {cx + r, cy + r});
      add_side(SideTag::inner, {cx - r, cy}, {cx - r, cy + r});
      add_side(SideTag::outer, {cx + R, cy}, {cx + R, cy + R});
      add_side(SideTag::outer, {cx - R, cy + R}, {cx + R, cy + R});
      add_side(SideTag::outer, {cx - R, cy}, {cx - R, cy + R});
      add_side(SideTag::flat_start, {cx + r, cy}, {cx + R, cy});
      add_side(SideTag::flat_end, {cx - R, cy}, {cx - r, cy});
      break;
    case RegionKind::quarter_annulus:
      d.rects = {Rect{cx + r, cx + R, cy, cy + R}, Rect{cx, cx + R, cy + r, cy + R}};
      add_side(SideTag::inner, {cx + r, cy}, {cx + r, cy + r});
      add_side(SideTag::inner, {cx, cy + r}, {cx + r, cy + r});
      add_side(SideTag::outer, {cx + R, cy}, {cx + R, cy + R});
      add_side(SideTag::outer, {cx, cy + R}, {cx + R, cy + R});
      add_side(SideTag::flat_start, {cx + r, cy}, {cx + R, cy});
      add_side(SideTag::flat_end, {cx, cy + r}, {cx, cy + R});
      break;
    case RegionKind::rect: break;
  }
  return d;
}

}  // namespace percospec
