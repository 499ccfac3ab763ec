#pragma once

// Affine lattice points in a dilated annulus or square and the sorted sequence
// of their directions (in turns), counted with multiplicity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "latdir/errors.hpp"
#include "latdir/lattice_walk.hpp"
#include "latdir/linalg.hpp"
#include "latdir/parallel.hpp"

namespace latdir {

/// The affine lattice (Z^2 + shift) basis.
struct AffineLatticeSpec {
  Mat2 basis = Mat2::identity();
  Vec2 shift{};

  void validate() const { require_unimodular(basis, "lattice basis"); }
};

/// cT < |y| < T.
struct Annulus {
  double c = 0.0;
};

/// The open square (-T, T)^2.
struct Square {};

using DomainShape = std::variant<Annulus, Square>;

inline void validate(const DomainShape& shape) {
  if (const auto* a = std::get_if<Annulus>(&shape)) {
    if (!(a->c >= 0.0 && a->c < 1.0)) throw InvalidInput("annulus parameter c must lie in [0, 1)");
  }
}

inline std::string to_string(const DomainShape& shape) {
  if (const auto* a = std::get_if<Annulus>(&shape)) return "annulus:" + std::to_string(a->c);
  return "square";
}

/// Sorted directions alpha_j in [0, 1) with multiplicity.
struct DirectionSet {
  std::vector<double> alphas;
  double T = 1.0;
  DomainShape shape = Annulus{};

  std::size_t size() const { return alphas.size(); }
  bool empty() const { return alphas.empty(); }
};

struct EnumerateOptions {
  std::size_t max_points = 200'000'000;
  unsigned threads = default_threads();
};

/// Area of the dilated domain, the leading term of the point count.
inline double expected_count(const DomainShape& shape, double T) {
  if (const auto* a = std::get_if<Annulus>(&shape)) {
    return std::numbers::pi * (1.0 - a->c * a->c) * T * T;
  }
  return 4.0 * T * T;
}

/// Direction of a nonzero vector in turns: atan2 / 2pi reduced to [0, 1).
inline double turns(Vec2 p) {
  double t = std::atan2(p.y, p.x) / kTwoPi;
  if (t < 0.0) t += 1.0;
  if (t >= 1.0) t = 0.0;
  return t + 0.0;  // no negative zero
}

/// Limiting direction density of lattice points in a dilated square.
inline double rho_square(double alpha) {
  const double nu = std::round(4.0 * alpha) / 4.0;
  const double cs = std::cos(kTwoPi * (alpha - nu));
  return std::numbers::pi / (4.0 * cs * cs);
}

namespace detail {

inline void check_domain(const AffineLatticeSpec& lat, const DomainShape& shape, double T,
                         const EnumerateOptions& opt) {
  lat.validate();
  validate(shape);
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidInput("T must be positive and finite");
  // Interior estimate plus a boundary allowance.
  const double estimate = expected_count(shape, T) * (1.0 + 4.0 / T) + 16.0;
  if (estimate > static_cast<double>(opt.max_points)) {
    throw CapacityError("about " + std::to_string(static_cast<long long>(estimate)) +
                        " points exceeds the cap of " + std::to_string(opt.max_points));
  }
}

// Strips m1 are cut into a fixed number of contiguous chunks; each chunk fills
// its own buffer and buffers are concatenated in chunk order.
template <class Region, class Emit>
std::vector<std::vector<Emit>> walk_chunks(const AffineLatticeSpec& lat, const Region& region,
                                           unsigned threads, auto&& make) {
  const auto [lo, hi] = strip_range(lat.basis, lat.shift, region);
  const std::int64_t strips = std::max<std::int64_t>(0, hi - lo + 1);
  const std::size_t chunks = static_cast<std::size_t>(std::min<std::int64_t>(64, std::max<std::int64_t>(1, strips)));
  std::vector<std::vector<Emit>> out(chunks);
  parallel_chunks(chunks, threads, [&](std::size_t ch) {
    const std::int64_t a = lo + strips * static_cast<std::int64_t>(ch) / static_cast<std::int64_t>(chunks);
    const std::int64_t b = lo + strips * static_cast<std::int64_t>(ch + 1) / static_cast<std::int64_t>(chunks);
    auto& buf = out[ch];
    for (std::int64_t m1 = a; m1 < b; ++m1) {
      walk_strip(lat.basis, lat.shift, region, m1, [&](std::int64_t, std::int64_t, Vec2 p) {
        if (p.x != 0.0 || p.y != 0.0) buf.push_back(make(p));
      });
    }
  });
  return out;
}

template <class Emit>
std::vector<Emit> walk_domain(const AffineLatticeSpec& lat, const DomainShape& shape, double T,
                              const EnumerateOptions& opt, auto&& make) {
  check_domain(lat, shape, T, opt);
  std::vector<std::vector<Emit>> parts;
  if (const auto* a = std::get_if<Annulus>(&shape)) {
    const DiscRegion disc{T, a->c * T, false};
    parts = walk_chunks<DiscRegion, Emit>(lat, disc, opt.threads, make);
  } else {
    parts = walk_chunks<PolygonRegion, Emit>(lat, PolygonRegion::open_square(T), opt.threads, make);
  }
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  if (total > opt.max_points) throw CapacityError("point count exceeds the configured cap");
  std::vector<Emit> all;
  all.reserve(total);
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

}  // namespace detail

/// All y = (m + shift) basis with y != 0 inside the dilated domain, in strip
/// order (m1 ascending, then m2 ascending).
inline std::vector<Vec2> enumerate_points(const AffineLatticeSpec& lat, const DomainShape& shape, double T,
                                          const EnumerateOptions& opt = {}) {
  return detail::walk_domain<Vec2>(lat, shape, T, opt, [](Vec2 p) { return p; });
}

/// Sorted directions of the given points.
inline DirectionSet directions(const std::vector<Vec2>& points, double T, const DomainShape& shape) {
  DirectionSet ds;
  ds.T = T;
  ds.shape = shape;
  ds.alphas.reserve(points.size());
  for (const Vec2& p : points) {
    if (p.x == 0.0 && p.y == 0.0) throw InvalidInput("zero vector has no direction");
    ds.alphas.push_back(turns(p));
  }
  std::sort(ds.alphas.begin(), ds.alphas.end());
  return ds;
}

/// enumerate_points followed by directions, without materialising the points.
inline DirectionSet direction_set(const AffineLatticeSpec& lat, const DomainShape& shape, double T,
                                  const EnumerateOptions& opt = {}) {
  DirectionSet ds;
  ds.T = T;
  ds.shape = shape;
  ds.alphas = detail::walk_domain<double>(lat, shape, T, opt, [](Vec2 p) { return turns(p); });
  std::sort(ds.alphas.begin(), ds.alphas.end());
  return ds;
}

}  // namespace latdir
