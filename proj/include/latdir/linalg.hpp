#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "latdir/errors.hpp"

namespace latdir {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Row vector in R^2. Matrices act on the right: x -> x M.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
  constexpr bool operator==(const Vec2&) const = default;
};

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static constexpr Mat2 identity() { return {}; }

  constexpr double det() const { return a * d - b * c; }

  constexpr Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }

  constexpr Mat2 inverse() const {
    const double s = 1.0 / det();
    return {d * s, -b * s, -c * s, a * s};
  }

  constexpr Vec2 row1() const { return {a, b}; }
  constexpr Vec2 row2() const { return {c, d}; }
  constexpr bool operator==(const Mat2&) const = default;
};

/// x M for a row vector x.
constexpr Vec2 operator*(Vec2 v, const Mat2& m) {
  return {v.x * m.a + v.y * m.c, v.x * m.b + v.y * m.d};
}

inline constexpr double kUnimodularTolerance = 1e-12;

inline bool is_unimodular(const Mat2& m) {
  return std::abs(m.det() - 1.0) <= kUnimodularTolerance;
}

inline void require_unimodular(const Mat2& m, const char* what) {
  if (!is_unimodular(m)) {
    throw InvalidInput(std::string(what) + ": determinant must be 1 (got " +
                       std::to_string(m.det()) + ")");
  }
}

// Iwasawa factors and the geodesic flow.

constexpr Mat2 n_of(double u) { return {1.0, u, 0.0, 1.0}; }

inline Mat2 a_of(double v) {
  const double s = std::sqrt(v);
  return {s, 0.0, 0.0, 1.0 / s};
}

inline Mat2 k_of(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return {c, -s, s, c};
}

/// diag(e^{-t/2}, e^{t/2}) written in terms of T = e^{t/2}.
constexpr Mat2 flow_of(double T) { return {1.0 / T, 0.0, 0.0, T}; }

/// Iwasawa coordinates M = n(u) a(v) k(phi), phi in [0, 2pi).
struct IwasawaPoint {
  double u = 0.0;
  double v = 1.0;
  double phi = 0.0;

  Mat2 matrix() const { return n_of(u) * a_of(v) * k_of(phi); }
};

/// Decompose M in SL(2,R) as n(u) a(v) k(phi).
inline IwasawaPoint iwasawa(const Mat2& m) {
  // Bottom row of n(u)a(v)k(phi) is v^{-1/2} (sin phi, cos phi).
  const double r2 = m.c * m.c + m.d * m.d;
  IwasawaPoint p;
  p.v = 1.0 / r2;
  p.phi = std::atan2(m.c, m.d);
  if (p.phi < 0.0) p.phi += kTwoPi;
  // Top row: v^{1/2}(cos, -sin) + u v^{-1/2}(sin, cos); project onto (sin, cos).
  p.u = (m.a * m.c + m.b * m.d) / r2;
  return p;
}

/// Moebius action of M on tau = u + iv, returned as (Re, Im).
struct UpperHalfPoint {
  double u = 0.0;
  double v = 1.0;
};

inline UpperHalfPoint mobius(const Mat2& m, UpperHalfPoint t) {
  // (a tau + b) / (c tau + d)
  const double den = (m.c * t.u + m.d) * (m.c * t.u + m.d) + (m.c * t.v) * (m.c * t.v);
  const double re = ((m.a * t.u + m.b) * (m.c * t.u + m.d) + m.a * m.c * t.v * t.v) / den;
  const double im = t.v * m.det() / den;
  return {re, im};
}

}  // namespace latdir
