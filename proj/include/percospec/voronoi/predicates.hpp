#pragma once

#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "percospec/core/geometry.hpp"

namespace percospec::predicates {

// Floating-point filters with the static error bounds of Shewchuk's adaptive predicates; the
// rare undecided cases are recomputed in exact rational arithmetic.
inline constexpr double kOrientBound = 3.3306690738754716e-16;
inline constexpr double kIncircleBound = 1.1102230246251577e-15;

namespace exact {

using Q = boost::multiprecision::cpp_rational;

inline int sign(const Q& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

inline int orient(Point2 a, Point2 b, Point2 c) {
  const Q acx = Q(a.x) - Q(c.x), bcx = Q(b.x) - Q(c.x);
  const Q acy = Q(a.y) - Q(c.y), bcy = Q(b.y) - Q(c.y);
  return sign(acx * bcy - acy * bcx);
}

inline int incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
  const Q adx = Q(a.x) - Q(d.x), ady = Q(a.y) - Q(d.y);
  const Q bdx = Q(b.x) - Q(d.x), bdy = Q(b.y) - Q(d.y);
  const Q cdx = Q(c.x) - Q(d.x), cdy = Q(c.y) - Q(d.y);
  const Q alift = adx * adx + ady * ady;
  const Q blift = bdx * bdx + bdy * bdy;
  const Q clift = cdx * cdx + cdy * cdy;
  return sign(alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) + clift * (adx * bdy - ady * bdx));
}

}  // namespace exact

/// +1 if a, b, c turn counter-clockwise, -1 clockwise, 0 collinear. Exact.
inline int orient(Point2 a, Point2 b, Point2 c) {
  const double l = (a.x - c.x) * (b.y - c.y);
  const double r = (a.y - c.y) * (b.x - c.x);
  const double det = l - r;
  const double bound = kOrientBound * (std::fabs(l) + std::fabs(r));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return exact::orient(a, b, c);
}

/// For counter-clockwise a, b, c: +1 if d lies strictly inside the circumcircle. Exact.
inline int incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                           (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                           (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
  const double bound = kIncircleBound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return exact::incircle(a, b, c, d);
}

inline Point2 circumcenter(Point2 a, Point2 b, Point2 c) {
  const double bx = b.x - a.x, by = b.y - a.y;
  const double cx = c.x - a.x, cy = c.y - a.y;
  const double d = 2.0 * (bx * cy - by * cx);
  const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  return {a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
}

}  // namespace percospec::predicates
