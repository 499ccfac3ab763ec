#pragma once

// Independent reference implementations used by the tests. They share no code
// with the library beyond plain value types: brute-force loops over boxes of
// integer vectors, closed forms, and quadratic-time pair loops.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

namespace oracle {

struct P2 {
  double x, y;
};

/// (m + shift) B for all m in [-L, L]^2.
template <class Keep>
std::vector<P2> box_points(const double B[4], P2 shift, std::int64_t L, Keep&& keep) {
  std::vector<P2> out;
  for (std::int64_t m1 = -L; m1 <= L; ++m1) {
    for (std::int64_t m2 = -L; m2 <= L; ++m2) {
      const double a = m1 + shift.x, b = m2 + shift.y;
      const P2 p{a * B[0] + b * B[2], a * B[1] + b * B[3]};
      if (keep(p)) out.push_back(p);
    }
  }
  return out;
}

/// Brute-force directions (turns) of lattice points in cT < |y| < T, y != 0.
inline std::vector<double> annulus_directions(const double B[4], P2 shift, double c, double T, std::int64_t L) {
  const auto pts = box_points(B, shift, L, [&](P2 p) {
    const double r2 = p.x * p.x + p.y * p.y;
    return r2 > 0.0 && r2 < T * T && r2 > c * c * T * T;
  });
  std::vector<double> a;
  for (const P2& p : pts) {
    double t = std::atan2(p.y, p.x) / (2.0 * std::numbers::pi);
    if (t < 0.0) t += 1.0;
    if (t >= 1.0) t = 0.0;
    a.push_back(t);
  }
  std::sort(a.begin(), a.end());
  return a;
}

/// Number of directions in [alpha + a/N, alpha + b/N) mod 1 by a linear scan.
inline std::size_t count_window(const std::vector<double>& a, double lo_off, double hi_off, double alpha) {
  const double N = static_cast<double>(a.size());
  const double lo = alpha + lo_off / N, len = (hi_off - lo_off) / N;
  std::size_t n = 0;
  for (double x : a) {
    double d = x - lo;
    d -= std::floor(d);
    if (d < len) ++n;
  }
  return n;
}

/// All ordered pairs j1 != j2 with the wrapped scaled difference N (a_j2 - a_j1).
template <class Fn>
void all_pairs(const std::vector<double>& a, Fn&& fn) {
  const double N = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (i == j) continue;
      double d = a[j] - a[i];
      d -= std::round(d);
      fn(N * d);
    }
  }
}

/// P(v >= V) for v the imaginary part of a Haar point in the standard
/// fundamental domain (density (3/pi) v^-2 du dv).
inline double v_tail(double V) {
  const double k = 3.0 / std::numbers::pi;
  constexpr double v0 = 0.86602540378443864676;
  if (V <= v0) return 1.0;
  if (V >= 1.0) return k / V;
  // Over [V, 1] the admissible u satisfy sqrt(1 - v^2) <= |u| <= 1/2.
  return k * (1.0 / V - 2.0 * std::sqrt(1.0 - V * V) / V - 2.0 * std::asin(V) + std::numbers::pi);
}

/// Brute-force F_{R,beta}(tau; xi) over coprime |c|, |d| <= C with Gaussian f.
inline double cusp_function(double u, double v, double xi1, double xi2, double beta, double R, double width,
                            std::int64_t C) {
  double sum = 0.0;
  for (std::int64_t c = -C; c <= C; ++c) {
    for (std::int64_t d = -C; d <= C; ++d) {
      if (std::gcd(c, d) != 1) continue;
      const double re = c * u + d, im = c * v;
      const double vg = v / (re * re + im * im);
      if (vg < R) continue;
      const double theta = d * xi1 - c * xi2;
      double s = 0.0;
      for (std::int64_t m = -200; m <= 200; ++m) {
        const double x = (theta + m) * std::sqrt(vg) / width;
        s += std::exp(-x * x);
      }
      sum += std::pow(vg, beta) * s;
    }
  }
  return sum;
}

}  // namespace oracle
