#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "percospec/core/error.hpp"
#include "percospec/core/geometry.hpp"

namespace percospec {

// mark +1 is black / 1, mark -1 is white / 0.
struct MarkedPoint {
  Point2 loc;
  int mark = 1;

  friend bool operator==(const MarkedPoint&, const MarkedPoint&) = default;
};

inline int mark_from_bit(int bit) { return bit ? 1 : -1; }
inline int bit_from_mark(int mark) { return mark > 0 ? 1 : 0; }

/// A finite simple point set sampled in `window`. Unmarked configurations carry mark +1 everywhere.
class PointConfiguration {
 public:
  PointConfiguration() = default;
  PointConfiguration(Region window, bool marked, std::uint64_t id = 0) : window_(window), marked_(marked), id_(id) {}
  PointConfiguration(Region window, bool marked, std::vector<MarkedPoint> pts, std::uint64_t id = 0)
      : window_(window), marked_(marked), id_(id) {
    points_.reserve(pts.size());
    for (const auto& p : pts) push(p);
  }

  [[nodiscard]] const std::vector<MarkedPoint>& points() const { return points_; }
  [[nodiscard]] std::span<const MarkedPoint> view() const { return points_; }
  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] bool empty() const { return points_.empty(); }
  [[nodiscard]] const MarkedPoint& operator[](std::size_t i) const { return points_[i]; }
  [[nodiscard]] const Region& window() const { return window_; }
  [[nodiscard]] bool marked() const { return marked_; }
  [[nodiscard]] std::uint64_t id() const { return id_; }

  [[nodiscard]] bool contains_location(Point2 p) const {
    for (const auto& q : points_) {
      if (q.loc == p) return true;
    }
    return false;
  }
  [[nodiscard]] bool outside_window(std::size_t i) const { return !window_.contains(points_.at(i).loc); }

  /// Appends p; a location already present is a usage error. Points outside the window are allowed.
  void push(const MarkedPoint& p) {
    if (!is_finite(p.loc)) throw ParameterError("point coordinates must be finite");
    if (p.mark != 1 && p.mark != -1) throw ParameterError("marks must be +1 or -1");
    if (contains_location(p.loc)) throw UsageError("duplicate location in configuration");
    points_.push_back(p);
  }
  // No duplicate check; the caller guarantees distinct locations (Poisson samples).
  void push_unchecked(const MarkedPoint& p) { points_.push_back(p); }

  void set_mark(std::size_t i, int mark) {
    if (i >= points_.size()) throw UsageError("set_mark: index out of range");
    points_[i].mark = mark;
  }

  friend bool operator==(const PointConfiguration& a, const PointConfiguration& b) {
    return a.points_ == b.points_ && a.window_ == b.window_ && a.marked_ == b.marked_;
  }

 private:
  Region window_ = Region::square(1.0);
  bool marked_ = false;
  std::uint64_t id_ = 0;
  std::vector<MarkedPoint> points_;
};

inline PointConfiguration add_point(const PointConfiguration& cfg, const MarkedPoint& p) {
  PointConfiguration out = cfg;
  out.push(p);
  return out;
}

inline PointConfiguration remove_point(const PointConfiguration& cfg, std::size_t index) {
  if (index >= cfg.size()) throw UsageError("remove_point: index out of range");
  std::vector<MarkedPoint> pts = cfg.points();
  pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(index));
  PointConfiguration out(cfg.window(), cfg.marked(), cfg.id());
  for (const auto& q : pts) out.push_unchecked(q);
  return out;
}

}  // namespace percospec
