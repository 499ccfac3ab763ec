#pragma once

// The cusp function
//   F_{R,beta}(tau; xi) = sum_{gamma in Gamma_inf \ Gamma} sum_m f(((xi gamma^{-1})_1 + m) v_gamma^{1/2})
//                         v_gamma^beta chi_R(v_gamma)
// with Gaussian f, and its integral along a horocycle.
//
// Cosets of Gamma_inf \ Gamma are labelled by coprime bottom rows (c, d) of
// either sign; v_gamma = v / |c tau + d|^2 and (xi gamma^{-1})_1 = d xi_1 - c xi_2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "latdir/errors.hpp"
#include "latdir/lattice_walk.hpp"
#include "latdir/linalg.hpp"

namespace latdir {

struct CuspSpec {
  double beta = 1.0;
  double R = 2.0;
  double f_width = 1.0;  // f(x) = exp(-(x / f_width)^2)

  void validate() const {
    if (!(beta >= 0.0)) throw InvalidInput("beta must be nonnegative");
    if (!(R >= 1.0)) throw InvalidInput("R must be at least 1");
    if (!(f_width > 0.0)) throw InvalidInput("f_width must be positive");
  }
};

/// sum_m f((theta + m) s), truncated where the Gaussian is below 1e-16.
inline double periodized_gaussian(double theta, double s, double width) {
  const double reach = std::sqrt(16.0 * std::log(10.0)) * width / s;
  const auto lo = static_cast<std::int64_t>(std::ceil(-theta - reach));
  const auto hi = static_cast<std::int64_t>(std::floor(-theta + reach));
  double sum = 0.0;
  for (std::int64_t m = lo; m <= hi; ++m) {
    const double x = (theta + static_cast<double>(m)) * s / width;
    sum += std::exp(-x * x);
  }
  return sum;
}

/// v_gamma at tau for bottom row (c, d).
inline double coset_height(UpperHalfPoint tau, double c, double d) {
  const double re = c * tau.u + d;
  const double im = c * tau.v;
  return tau.v / (re * re + im * im);
}

/// Contribution of the coset with bottom row (c, d) at (tau; xi).
inline double coset_term(UpperHalfPoint tau, Vec2 xi, std::int64_t c, std::int64_t d, const CuspSpec& spec) {
  const double vg = coset_height(tau, static_cast<double>(c), static_cast<double>(d));
  if (!(vg >= spec.R)) return 0.0;
  const double theta = static_cast<double>(d) * xi.x - static_cast<double>(c) * xi.y;
  return std::pow(vg, spec.beta) * periodized_gaussian(theta, std::sqrt(vg), spec.f_width);
}

/// F_{R,beta}(tau; xi) for tau in the upper half plane.
inline double f_R_beta_at(UpperHalfPoint tau, Vec2 xi, const CuspSpec& spec) {
  spec.validate();
  if (!(tau.v > 0.0)) throw InvalidInput("tau must lie in the upper half plane");
  // chi_R(v_gamma) = 1 iff (c u + d)^2 + (c v)^2 <= v / R: lattice points of
  // Z^2 [[u, v], [1, 0]] in a closed disc, visited in (c, d) order.
  const Mat2 basis{tau.u, tau.v, 1.0, 0.0};
  const DiscRegion disc{std::sqrt(tau.v / spec.R), -1.0, true};
  double sum = 0.0;
  for_each_lattice_point(basis, {}, disc, [&](std::int64_t c, std::int64_t d, Vec2) {
    if (std::gcd(c, d) != 1) return;
    sum += coset_term(tau, xi, c, d, spec);
  });
  return sum;
}

/// F_{R,beta} at the group element (1, xi) M n(u) a(v), tau = u + iv.
inline double f_R_beta(UpperHalfPoint tau, Vec2 xi, const Mat2& M, const CuspSpec& spec) {
  require_unimodular(M, "M");
  return f_R_beta_at(mobius(M, tau), xi, spec);
}

// ---------------------------------------------------------------------------
// Horocycle integrals

/// Smooth bump exp(1 - 1/(1 - t^2)) on the support, t the affine coordinate.
inline std::function<double(double)> bump_on(Interval support) {
  return [support](double u) {
    const double t = (2.0 * u - support.lo - support.hi) / (support.hi - support.lo);
    if (!(std::abs(t) < 1.0)) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
  };
}

enum class HorocycleQuadrature {
  midpoint,   // sample F at n_quad midpoints of the support
  per_coset,  // integrate every coset term over its exact support, n_quad points each
};

struct HorocycleSpec {
  Mat2 M = Mat2::identity();
  Vec2 xi{};
  double v = 1e-2;
  Interval support{-1.0, 1.0};
  std::function<double(double)> h;  // empty means the bump on `support`
  std::size_t n_quad = 4096;
  HorocycleQuadrature method = HorocycleQuadrature::midpoint;
};

/// Integral over u in the support of the (c, d) coset term along
/// u -> (1, xi) M n(u) a(v). With (c', d') = (c, d) M the term depends on u
/// through |c'(u + iv) + d'|^2; for c' != 0 substitute u = -d'/c' + v tan(t),
/// which turns the peak into a smooth integrand on a bounded t-interval.
inline double coset_horocycle_integral(std::int64_t c, std::int64_t d, const HorocycleSpec& hs,
                                       const CuspSpec& spec) {
  const auto h = hs.h ? hs.h : bump_on(hs.support);
  const double cp = static_cast<double>(c) * hs.M.a + static_cast<double>(d) * hs.M.c;
  const double dp = static_cast<double>(c) * hs.M.b + static_cast<double>(d) * hs.M.d;
  const double theta = static_cast<double>(d) * hs.xi.x - static_cast<double>(c) * hs.xi.y;
  const double v = hs.v;
  const auto n = static_cast<double>(hs.n_quad);
  if (cp == 0.0) {
    const double vg = v / (dp * dp);
    if (!(vg >= spec.R)) return 0.0;
    const double value = std::pow(vg, spec.beta) * periodized_gaussian(theta, std::sqrt(vg), spec.f_width);
    const double du = hs.support.length() / n;
    double s = 0.0;
    for (std::size_t i = 0; i < hs.n_quad; ++i) s += h(hs.support.lo + (static_cast<double>(i) + 0.5) * du);
    return value * s * du;
  }
  // v_gamma = cos^2(t) / (c'^2 v) >= R  <=>  |t| <= acos(sqrt(R c'^2 v)).
  const double q = spec.R * cp * cp * v;
  if (q > 1.0) return 0.0;
  const double tmax = std::acos(std::sqrt(q));
  const double center = -dp / cp;
  double tlo = std::max(-tmax, std::atan((hs.support.lo - center) / v));
  double thi = std::min(tmax, std::atan((hs.support.hi - center) / v));
  if (!(thi > tlo)) return 0.0;
  const double dt = (thi - tlo) / n;
  double s = 0.0;
  for (std::size_t i = 0; i < hs.n_quad; ++i) {
    const double t = tlo + (static_cast<double>(i) + 0.5) * dt;
    const double ct = std::cos(t);
    const double vg = ct * ct / (cp * cp * v);
    if (!(vg >= spec.R)) continue;
    const double u = center + v * std::tan(t);
    const double jac = v / (ct * ct);
    s += std::pow(vg, spec.beta) * periodized_gaussian(theta, std::sqrt(vg), spec.f_width) * h(u) * jac;
  }
  return s * dt;
}

/// Integral of F_{R,beta}((1, xi) M n(u) a(v)) h(u) du.
inline double escape_integral(const HorocycleSpec& hs, const CuspSpec& spec) {
  spec.validate();
  require_unimodular(hs.M, "M");
  if (!(hs.v > 0.0)) throw InvalidInput("v must be positive");
  if (!(hs.support.lo < hs.support.hi)) throw InvalidInput("support needs lo < hi");
  if (hs.n_quad == 0) throw InvalidInput("n_quad must be positive");
  const auto h = hs.h ? hs.h : bump_on(hs.support);

  if (hs.method == HorocycleQuadrature::midpoint) {
    const double du = hs.support.length() / static_cast<double>(hs.n_quad);
    double s = 0.0;
    for (std::size_t i = 0; i < hs.n_quad; ++i) {
      const double u = hs.support.lo + (static_cast<double>(i) + 0.5) * du;
      const double w = h(u);
      if (w == 0.0) continue;
      s += f_R_beta(UpperHalfPoint{u, hs.v}, hs.xi, hs.M, spec) * w;
    }
    return s * du;
  }

  // Cosets that can contribute: (c', d') = (c, d) M with |c'| <= (R v)^{-1/2}
  // and |c' u + d'| <= (v / R)^{1/2} for some u in the support. Enumerate
  // integer (c, d) whose image lies in the enclosing box.
  const double cmax = 1.0 / std::sqrt(spec.R * hs.v);
  const double rho = std::sqrt(hs.v / spec.R);
  const double umax = std::max(std::abs(hs.support.lo), std::abs(hs.support.hi));
  PolygonRegion box;
  const double dmax = cmax * umax + rho;
  const double eps = 1e-9 * (1.0 + dmax);
  box.planes = {{{1, 0}, cmax + eps}, {{-1, 0}, cmax + eps}, {{0, 1}, dmax + eps}, {{0, -1}, dmax + eps}};
  box.xbox = {-cmax - eps, cmax + eps};
  box.ybox = {-dmax - eps, dmax + eps};
  HorocycleSpec per = hs;
  per.h = h;
  double sum = 0.0;
  for_each_lattice_point(hs.M, {}, box, [&](std::int64_t c, std::int64_t d, Vec2) {
    if (std::gcd(c, d) != 1) return;
    sum += coset_horocycle_integral(c, d, per, spec);
  });
  return sum;
}

/// The two cosets with bottom row (+-1, 0), integrated along the horocycle
/// with M = identity.
inline double first_term_integral(HorocycleSpec hs, const CuspSpec& spec) {
  hs.M = Mat2::identity();
  return coset_horocycle_integral(1, 0, hs, spec) + coset_horocycle_integral(-1, 0, hs, spec);
}

}  // namespace latdir
