#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "percospec/boolean/occupied.hpp"
#include "percospec/core/arms.hpp"
#include "percospec/core/configuration.hpp"
#include "percospec/core/error.hpp"
#include "percospec/core/union_find.hpp"

namespace percospec {

/*
 * Grid of h x h cells over the bounding box of a region. A cell belongs to the region when its
 * center does and is occupied when its center is within distance 1 of a disk center. Occupied
 * cells are joined with 8-connectivity, vacant cells with 4-connectivity.
 */
class OccupancyRaster {
 public:
  static constexpr std::int8_t kOutside = -1;
  static constexpr std::int8_t kVacant = 0;
  static constexpr std::int8_t kOccupied = 1;

  OccupancyRaster(std::span<const MarkedPoint> pts, const Region& region, double h, bool black_only = false)
      : region_(region), h_(h) {
    if (!(h > 0.0)) throw ParameterError("raster resolution h must be > 0");
    bbox_ = region.bounding_rect();
    nx_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(bbox_.width() / h - 1e-9)));
    ny_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(bbox_.height() / h - 1e-9)));
    state_.assign(nx_ * ny_, kOutside);
    for (std::size_t j = 0; j < ny_; ++j) {
      for (std::size_t i = 0; i < nx_; ++i) {
        if (region.contains(center(i, j))) state_[j * nx_ + i] = kVacant;
      }
    }
    // stamp disks
    for (const auto& p : pts) {
      if (black_only && p.mark < 0) continue;
      const Point2 c = p.loc;
      const auto i0 = static_cast<long>(std::floor((c.x - 1.0 - bbox_.x0) / h_));
      const auto i1 = static_cast<long>(std::floor((c.x + 1.0 - bbox_.x0) / h_));
      const auto j0 = static_cast<long>(std::floor((c.y - 1.0 - bbox_.y0) / h_));
      const auto j1 = static_cast<long>(std::floor((c.y + 1.0 - bbox_.y0) / h_));
      for (long j = std::max(0L, j0); j <= std::min<long>(static_cast<long>(ny_) - 1, j1); ++j) {
        for (long i = std::max(0L, i0); i <= std::min<long>(static_cast<long>(nx_) - 1, i1); ++i) {
          auto& s = state_[static_cast<std::size_t>(j) * nx_ + static_cast<std::size_t>(i)];
          if (s == kVacant && dist2(center(static_cast<std::size_t>(i), static_cast<std::size_t>(j)), c) <= 1.0) {
            s = kOccupied;
          }
        }
      }
    }
    label();
  }

  [[nodiscard]] std::size_t nx() const { return nx_; }
  [[nodiscard]] std::size_t ny() const { return ny_; }
  [[nodiscard]] double h() const { return h_; }
  [[nodiscard]] Point2 center(std::size_t i, std::size_t j) const {
    return {bbox_.x0 + (static_cast<double>(i) + 0.5) * h_, bbox_.y0 + (static_cast<double>(j) + 0.5) * h_};
  }
  [[nodiscard]] std::int8_t state(std::size_t i, std::size_t j) const { return state_[j * nx_ + i]; }
  [[nodiscard]] std::uint32_t component(std::size_t i, std::size_t j) const { return comp_[j * nx_ + i]; }

  /// True iff a component of `color` meets both opposite edge rows/columns of the grid.
  [[nodiscard]] bool crossing(std::int8_t color, Axis axis) const {
    std::vector<char> first(ncomp_, 0);
    if (axis == Axis::LR) {
      for (std::size_t j = 0; j < ny_; ++j) {
        if (state(0, j) == color) first[component(0, j)] = 1;
      }
      for (std::size_t j = 0; j < ny_; ++j) {
        if (state(nx_ - 1, j) == color && first[component(nx_ - 1, j)]) return true;
      }
    } else {
      for (std::size_t i = 0; i < nx_; ++i) {
        if (state(i, 0) == color) first[component(i, 0)] = 1;
      }
      for (std::size_t i = 0; i < nx_; ++i) {
        if (state(i, ny_ - 1) == color && first[component(i, ny_ - 1)]) return true;
      }
    }
    return false;
  }

  /*
   * Arm word read along the inner boundary: cells next to the hole, ordered by angle, labelled by
   * the spanning component they belong to. Consecutive repeats of one component are merged.
   */
  [[nodiscard]] std::string inner_boundary_word() const {
    if (!region_.is_annular()) throw ParameterError("inner_boundary_word needs an annulus-kind region");
    const Point2 c = region_.center();
    const double r = region_.inner(), R = region_.outer();
    std::vector<char> touches_outer(ncomp_, 0), touches_inner(ncomp_, 0);
    struct Hit {
      double angle;
      std::uint32_t comp;
      std::int8_t color;
    };
    std::vector<Hit> inner;
    for (std::size_t j = 0; j < ny_; ++j) {
      for (std::size_t i = 0; i < nx_; ++i) {
        const auto s = state(i, j);
        if (s == kOutside) continue;
        const Point2 p = center(i, j);
        const double dx = std::fabs(p.x - c.x), dy = std::fabs(p.y - c.y);
        const double sup = std::max(dx, dy);
        bool outer_edge = sup > R - h_;
        if (region_.kind() != RegionKind::annulus) {
          // flat sides are not part of the outer boundary
          outer_edge = (dx > R - h_) || (p.y - c.y > R - h_);
          if (region_.kind() == RegionKind::quarter_annulus) outer_edge = (p.x - c.x > R - h_) || (p.y - c.y > R - h_);
        }
        if (outer_edge) touches_outer[component(i, j)] = 1;
        if (sup < r + h_) {
          touches_inner[component(i, j)] = 1;
          inner.push_back({std::atan2(p.y - c.y, p.x - c.x), component(i, j), s});
        }
      }
    }
    std::sort(inner.begin(), inner.end(), [](const Hit& a, const Hit& b) { return a.angle < b.angle; });
    std::vector<Hit> seq;
    for (const auto& hit : inner) {
      if (!touches_outer[hit.comp]) continue;
      if (!seq.empty() && seq.back().comp == hit.comp) continue;
      seq.push_back(hit);
    }
    if (region_.kind() == RegionKind::annulus && seq.size() > 1 && seq.front().comp == seq.back().comp) seq.pop_back();
    std::string w;
    for (const auto& hit : seq) w += hit.color == kOccupied ? 'O' : 'V';
    return w;
  }

 private:
  void label() {
    UnionFind uf(nx_ * ny_);
    for (std::size_t j = 0; j < ny_; ++j) {
      for (std::size_t i = 0; i < nx_; ++i) {
        const auto s = state(i, j);
        if (s == kOutside) continue;
        const auto k = static_cast<std::uint32_t>(j * nx_ + i);
        auto join = [&](std::size_t ii, std::size_t jj) {
          if (state(ii, jj) == s) uf.unite(k, static_cast<std::uint32_t>(jj * nx_ + ii));
        };
        if (i + 1 < nx_) join(i + 1, j);
        if (j + 1 < ny_) join(i, j + 1);
        if (s == kOccupied && j + 1 < ny_) {
          if (i + 1 < nx_) join(i + 1, j + 1);
          if (i > 0) join(i - 1, j + 1);
        }
      }
    }
    comp_.assign(nx_ * ny_, 0);
    std::vector<std::uint32_t> dense(nx_ * ny_, UINT32_MAX);
    ncomp_ = 0;
    for (std::size_t k = 0; k < nx_ * ny_; ++k) {
      if (state_[k] == kOutside) continue;
      const auto r = uf.find(static_cast<std::uint32_t>(k));
      if (dense[r] == UINT32_MAX) dense[r] = static_cast<std::uint32_t>(ncomp_++);
      comp_[k] = dense[r];
    }
  }

  Region region_;
  double h_;
  Rect bbox_;
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<std::int8_t> state_;
  std::vector<std::uint32_t> comp_;
  std::size_t ncomp_ = 0;
};

inline bool vacant_crossing_raster(std::span<const MarkedPoint> pts, const Region& box, Axis axis, double h) {
  if (box.kind() != RegionKind::rect) throw ParameterError("vacant_crossing_raster needs a rect region");
  if (!(h > 0.0) || h > 0.1) throw ParameterError("vacant_crossing_raster needs 0 < h <= 0.1");
  return OccupancyRaster(pts, box, h).crossing(OccupancyRaster::kVacant, axis);
}

inline bool occupied_crossing_raster(std::span<const MarkedPoint> pts, const Region& box, Axis axis, double h) {
  if (box.kind() != RegionKind::rect) throw ParameterError("occupied_crossing_raster needs a rect region");
  return OccupancyRaster(pts, box, h).crossing(OccupancyRaster::kOccupied, axis);
}

/// Raster version of the arm event, used to cross-check the exact detector.
inline bool arm_event_raster(std::span<const MarkedPoint> pts, const ArmEventSpec& spec, double h) {
  if (spec.region.inner() < 2.0 * h) throw ResolutionError("arm_event_raster: r < 2h");
  const OccupancyRaster raster(pts, spec.region, h);
  return match_arm_pattern(spec.pattern, raster.inner_boundary_word(), spec.cyclic());
}

}  // namespace percospec
