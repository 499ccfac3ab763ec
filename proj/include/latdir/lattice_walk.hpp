#pragma once

// Enumeration of affine lattice points (m + shift) B inside a convex region.
//
// The walk runs over strips m1 = const. The range of m1 comes from the
// region's support function along the first column of B^{-1}; inside a strip
// the points form an arithmetic progression along the second row of B, and the
// region reports the parameter interval of that line. A final exact
// `contains` test decides membership, so the strip intervals only need to be
// supersets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "latdir/linalg.hpp"

namespace latdir {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// Open (or closed) disc centred at the origin, optionally with a hole.
struct DiscRegion {
  double radius = 1.0;
  double inner = -1.0;  // if >= 0, points with |x| <= inner are excluded
  bool closed = false;  // include |x| == radius

  bool contains(Vec2 p) const {
    const double r2 = p.norm2();
    const bool in_outer = closed ? r2 <= radius * radius : r2 < radius * radius;
    return in_outer && (inner < 0.0 || r2 > inner * inner);
  }

  Interval support(Vec2 w) const {
    const double s = radius * w.norm();
    return {-s, s};
  }

  /// Parameters t with |p0 + t dir| <= radius.
  std::optional<Interval> line(Vec2 p0, Vec2 dir) const {
    const double aa = dir.norm2();
    const double bb = p0.dot(dir);
    const double cc = p0.norm2() - radius * radius;
    const double disc = bb * bb - aa * cc;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    return Interval{(-bb - sq) / aa, (-bb + sq) / aa};
  }
};

/// Intersection of open half-planes n . x < offset, plus an axis box used for
/// the support function. Covers squares and the cone triangles.
struct PolygonRegion {
  struct HalfPlane {
    Vec2 normal;
    double offset;
  };
  std::vector<HalfPlane> planes;
  Interval xbox;
  Interval ybox;

  bool contains(Vec2 p) const {
    for (const auto& h : planes) {
      if (!(h.normal.dot(p) < h.offset)) return false;
    }
    return true;
  }

  Interval support(Vec2 w) const {
    const double xs[2] = {xbox.lo * w.x, xbox.hi * w.x};
    const double ys[2] = {ybox.lo * w.y, ybox.hi * w.y};
    return {std::min(xs[0], xs[1]) + std::min(ys[0], ys[1]),
            std::max(xs[0], xs[1]) + std::max(ys[0], ys[1])};
  }

  std::optional<Interval> line(Vec2 p0, Vec2 dir) const {
    double lo = -HUGE_VAL, hi = HUGE_VAL;
    for (const auto& h : planes) {
      const double nd = h.normal.dot(dir);
      const double rhs = h.offset - h.normal.dot(p0);
      if (nd == 0.0) {
        if (!(0.0 < rhs)) return std::nullopt;
        continue;
      }
      const double t = rhs / nd;
      if (nd > 0.0) {
        hi = std::min(hi, t);
      } else {
        lo = std::max(lo, t);
      }
    }
    if (!(lo <= hi)) return std::nullopt;
    return Interval{lo, hi};
  }

  static PolygonRegion open_square(double half) {
    PolygonRegion r;
    r.planes = {{{1, 0}, half}, {{-1, 0}, half}, {{0, 1}, half}, {{0, -1}, half}};
    r.xbox = {-half, half};
    r.ybox = {-half, half};
    return r;
  }
};

namespace detail {

// Slack applied to floating strip bounds; the exact membership test runs on
// every candidate, so widening never admits a wrong point.
inline double widen(double x) { return 1e-9 * (1.0 + std::abs(x)); }

inline std::int64_t ceil_i(double x) { return static_cast<std::int64_t>(std::ceil(x)); }
inline std::int64_t floor_i(double x) { return static_cast<std::int64_t>(std::floor(x)); }

}  // namespace detail

/// Range of integer m1 whose strip can meet the region.
template <class Region>
std::pair<std::int64_t, std::int64_t> strip_range(const Mat2& basis, Vec2 shift, const Region& region) {
  const Mat2 inv = basis.inverse();
  const Interval s = region.support({inv.a, inv.c});
  const double lo = s.lo - shift.x;
  const double hi = s.hi - shift.x;
  return {detail::ceil_i(lo - detail::widen(lo)), detail::floor_i(hi + detail::widen(hi))};
}

/// Visit every point in one strip m1 = const; `fn(m1, m2, point)`.
template <class Region, class Fn>
void walk_strip(const Mat2& basis, Vec2 shift, const Region& region, std::int64_t m1, Fn&& fn) {
  const Vec2 r1 = basis.row1();
  const Vec2 r2 = basis.row2();
  const Vec2 p0 = r1 * (static_cast<double>(m1) + shift.x);
  const auto iv = region.line(p0, r2);
  if (!iv) return;
  const double lo = iv->lo - shift.y;
  const double hi = iv->hi - shift.y;
  const std::int64_t m2lo = detail::ceil_i(lo - detail::widen(lo));
  const std::int64_t m2hi = detail::floor_i(hi + detail::widen(hi));
  for (std::int64_t m2 = m2lo; m2 <= m2hi; ++m2) {
    const Vec2 p = p0 + r2 * (static_cast<double>(m2) + shift.y);
    if (region.contains(p)) fn(m1, m2, p);
  }
}

/// Visit every point of (Z^2 + shift) B inside the region.
template <class Region, class Fn>
void for_each_lattice_point(const Mat2& basis, Vec2 shift, const Region& region, Fn&& fn) {
  const auto [lo, hi] = strip_range(basis, shift, region);
  for (std::int64_t m1 = lo; m1 <= hi; ++m1) walk_strip(basis, shift, region, m1, fn);
}

/// Like for_each_lattice_point, but walks along whichever index gives fewer
/// strips. Visiting order is unspecified; use for order-independent reductions.
template <class Region, class Fn>
void for_each_lattice_point_any_order(const Mat2& basis, Vec2 shift, const Region& region, Fn&& fn) {
  const auto [lo1, hi1] = strip_range(basis, shift, region);
  const Mat2 swapped{basis.c, basis.d, basis.a, basis.b};
  const Vec2 sshift{shift.y, shift.x};
  const auto [lo2, hi2] = strip_range(swapped, sshift, region);
  if (hi2 - lo2 < hi1 - lo1) {
    for (std::int64_t m2 = lo2; m2 <= hi2; ++m2) {
      walk_strip(swapped, sshift, region, m2,
                 [&](std::int64_t a, std::int64_t b, Vec2 p) { fn(b, a, p); });
    }
    return;
  }
  for (std::int64_t m1 = lo1; m1 <= hi1; ++m1) walk_strip(basis, shift, region, m1, fn);
}

template <class Region>
std::int64_t count_lattice_points(const Mat2& basis, Vec2 shift, const Region& region) {
  std::int64_t n = 0;
  for_each_lattice_point_any_order(basis, shift, region,
                                   [&](std::int64_t, std::int64_t, Vec2) { ++n; });
  return n;
}

}  // namespace latdir
