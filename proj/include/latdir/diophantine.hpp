#pragma once

// Numerical Diophantine type, singular shift vectors, and the count of
// directions along a rational line.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "latdir/constants.hpp"
#include "latdir/errors.hpp"
#include "latdir/lattice_core.hpp"
#include "latdir/parallel.hpp"
#include "latdir/stats.hpp"

namespace latdir {

struct DiophReport {
  double kappa = 0.0;
  std::int64_t search_radius = 0;
  double min_value = 0.0;
  std::array<std::int64_t, 3> argmin{};  // r1, r2, m
};

struct LongVec2 {
  long double x = 0.0L;
  long double y = 0.0L;
};

namespace detail {

// Order among equal values: height |r1| + |r2|, then max(|r1|, |r2|), then r1
// ascending, then r2 descending.
inline bool dioph_before(const std::array<std::int64_t, 3>& a, const std::array<std::int64_t, 3>& b) {
  const auto key = [](const std::array<std::int64_t, 3>& r) {
    const std::int64_t h = std::abs(r[0]) + std::abs(r[1]);
    return std::array<std::int64_t, 4>{h, std::max(std::abs(r[0]), std::abs(r[1])), r[0], -r[1]};
  };
  return key(a) < key(b);
}

}  // namespace detail

/// min over 0 < |r1| + |r2| <= radius of |r.xi + m| (|r1| + |r2|)^kappa, m the
/// nearest integer to -r.xi. Only r with first nonzero entry positive are
/// scanned; -r gives the same value. A residual below the rounding bound
/// (|r1| + |r2| + 1) * 8 ulp(max(1, |r.xi|)) is reported as an exact zero.
inline DiophReport dioph_scan(LongVec2 xi, double kappa, std::int64_t radius, unsigned threads = default_threads()) {
  if (radius < 1) throw InvalidInput("radius must be at least 1");
  if (!std::isfinite(kappa)) throw InvalidInput("kappa must be finite");
  struct Best {
    long double value = std::numeric_limits<long double>::infinity();
    std::array<std::int64_t, 3> arg{};
  };
  const auto consider = [](Best& best, long double value, const std::array<std::int64_t, 3>& arg) {
    if (value < best.value || (value == best.value && detail::dioph_before(arg, best.arg))) {
      best.value = value;
      best.arg = arg;
    }
  };
  const auto rows = static_cast<std::size_t>(radius + 1);  // r1 = 0..radius
  std::vector<Best> per_row(rows);
  const long double eps = std::numeric_limits<long double>::epsilon();
  parallel_chunks(rows, threads, [&](std::size_t row) {
    const auto r1 = static_cast<std::int64_t>(row);
    const std::int64_t rest = radius - r1;
    Best best;
    for (std::int64_t r2 = -rest; r2 <= rest; ++r2) {
      if (r1 == 0 && r2 <= 0) continue;
      const long double x = static_cast<long double>(r1) * xi.x + static_cast<long double>(r2) * xi.y;
      const long double m = -std::nearbyint(x);
      long double resid = std::abs(x + m);
      const std::int64_t h = r1 + std::abs(r2);
      if (resid <= static_cast<long double>(h + 1) * 8.0L * eps * std::max(1.0L, std::abs(x))) resid = 0.0L;
      const long double value = resid * std::pow(static_cast<long double>(h), static_cast<long double>(kappa));
      consider(best, value, {r1, r2, static_cast<std::int64_t>(m)});
    }
    per_row[row] = best;
  });
  Best best;
  for (const Best& b : per_row) consider(best, b.value, b.arg);
  return DiophReport{kappa, radius, static_cast<double>(best.value), best.arg};
}

inline DiophReport dioph_scan(Vec2 xi, double kappa, std::int64_t radius, unsigned threads = default_threads()) {
  return dioph_scan(LongVec2{xi.x, xi.y}, kappa, radius, threads);
}

/// xi = n omega + l, provided det(n, l) = n1 l2 - n2 l1 is not an integer.
inline Vec2 singular_vector(std::array<std::int64_t, 2> n, long double omega, std::array<Rational, 2> l) {
  if (n[0] == 0 && n[1] == 0) throw InvalidInput("n must be nonzero");
  const Rational det = Rational(n[0]) * l[1] - Rational(n[1]) * l[0];
  if (det.denominator() == 1) {
    throw InvalidInput("det(n, l) = " + std::to_string(det.numerator()) + " is an integer");
  }
  return {static_cast<double>(static_cast<long double>(n[0]) * omega + to_long_double(l[0])),
          static_cast<double>(static_cast<long double>(n[1]) * omega + to_long_double(l[1]))};
}

struct DivergenceProbe {
  double alpha_r = 0.0;             // direction of the rational line
  std::vector<std::size_t> counts;  // one per T
};

/// N_{c,T}((-eps, eps), alpha_r) for each T, where alpha_r is the direction of
/// the line {r . (xi + m) = 0} mapped by the basis, i.e. of (r2, -r1) basis.
inline DivergenceProbe rational_divergence_probe(std::array<Rational, 2> xi, std::array<std::int64_t, 2> r,
                                                 double eps, const std::vector<double>& T_list,
                                                 const Mat2& basis = Mat2::identity(), double c = 0.0,
                                                 const EnumerateOptions& opt = {}) {
  if (r[0] == 0 && r[1] == 0) throw InvalidInput("r must be nonzero");
  if (!(eps > 0.0)) throw InvalidInput("eps must be positive");
  const Rational dot = Rational(r[0]) * xi[0] + Rational(r[1]) * xi[1];
  if (dot.denominator() != 1) throw InvalidInput("r . (xi + m) = 0 has no integer solution m");
  DivergenceProbe out;
  out.alpha_r = turns(Vec2{static_cast<double>(r[1]), static_cast<double>(-r[0])} * basis);
  const AffineLatticeSpec lat{basis, {static_cast<double>(to_long_double(xi[0])), static_cast<double>(to_long_double(xi[1]))}};
  for (double T : T_list) {
    const DirectionSet dirs = direction_set(lat, Annulus{c}, T, opt);
    out.counts.push_back(counting_stat(dirs, Interval{-eps, eps}, out.alpha_r));
  }
  return out;
}

}  // namespace latdir
