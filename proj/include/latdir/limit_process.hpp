#pragma once

// Monte Carlo on the space of (affine) lattices: Haar sampling in Iwasawa
// coordinates, lattice counts in the cone regions that describe the limiting
// point process, and the moment / tail / Siegel-formula checks built on them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "latdir/errors.hpp"
#include "latdir/lattice_core.hpp"
#include "latdir/lattice_walk.hpp"
#include "latdir/linalg.hpp"
#include "latdir/parallel.hpp"
#include "latdir/rng.hpp"
#include "latdir/stats.hpp"

namespace latdir {

// ---------------------------------------------------------------------------
// Cone regions

/// {(x, y) : c < x < 1, (1 - c^2) y in 2x (a, b)}; its area is b - a.
struct ConeRegion {
  double c = 0.0;
  Interval window{0.0, 1.0};

  ConeRegion() = default;
  ConeRegion(double c_, Interval w) : c(c_), window(w) {
    if (!(c >= 0.0 && c < 1.0)) throw InvalidInput("cone parameter c must lie in [0, 1)");
    if (!(w.lo < w.hi)) throw InvalidInput("cone window needs lo < hi");
  }

  double area() const { return window.hi - window.lo; }

  bool contains(Vec2 p) const {
    if (!(p.x > c && p.x < 1.0)) return false;
    const double y = (1.0 - c * c) * p.y;
    return 2.0 * p.x * window.lo < y && y < 2.0 * p.x * window.hi;
  }

  Interval xbox() const { return {c, 1.0}; }

  Interval ybox() const {
    const double s = 2.0 / (1.0 - c * c);
    return {s * std::min(window.lo, window.lo * c), s * std::max(window.hi, window.hi * c)};
  }

  Interval support(Vec2 w) const {
    const Interval xb = xbox(), yb = ybox();
    return {std::min(xb.lo * w.x, xb.hi * w.x) + std::min(yb.lo * w.y, yb.hi * w.y),
            std::max(xb.lo * w.x, xb.hi * w.x) + std::max(yb.lo * w.y, yb.hi * w.y)};
  }

  std::optional<Interval> line(Vec2 p0, Vec2 dir) const {
    const double k = 1.0 - c * c;
    PolygonRegion poly;
    poly.planes = {{{-1.0, 0.0}, -c},
                   {{1.0, 0.0}, 1.0},
                   {{2.0 * window.lo, -k}, 0.0},
                   {{-2.0 * window.hi, k}, 0.0}};
    return poly.line(p0, dir);
  }
};

/// Points of (Z^2 + shift) g inside the cone.
inline std::int64_t count_in_cone(const Mat2& g, Vec2 shift, const ConeRegion& cone) {
  return count_lattice_points(g, shift, cone);
}

// ---------------------------------------------------------------------------
// Group elements and samples

struct IntMat2 {
  std::int64_t a = 1, b = 0, c = 0, d = 1;

  std::int64_t det() const { return a * d - b * c; }
  IntMat2 operator*(const IntMat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2 to_real() const {
    return {static_cast<double>(a), static_cast<double>(b), static_cast<double>(c), static_cast<double>(d)};
  }
  bool operator==(const IntMat2&) const = default;
};

/// A point g = (1, xi) coset n(u) a(v) k(phi) of the space of affine lattices.
struct HomSample {
  IwasawaPoint point;
  Vec2 xi{};
  std::optional<IntMat2> coset;

  Mat2 matrix() const {
    const Mat2 m = point.matrix();
    return coset ? coset->to_real() * m : m;
  }
};

/// Haar-distributed point of the standard fundamental domain
/// {|u| <= 1/2, u^2 + v^2 >= 1} with phi uniform on [0, 2pi).
inline IwasawaPoint haar_sample(Rng& rng) {
  constexpr double v0 = 0.86602540378443864676;  // sqrt(3)/2
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = v0 / rng.uniform_pos();  // density proportional to v^{-2} on [v0, inf)
    if (u * u + v * v < 1.0) continue;
    return {u, v, kTwoPi * rng.uniform()};
  }
}

/// Which limit law: xi in Z^2, xi = p/q, or xi irrational.
struct IntegerClass {};
struct RationalClass {
  std::int64_t p1 = 0, p2 = 0, q = 2;
};
struct IrrationalClass {};
using XiClass = std::variant<IntegerClass, RationalClass, IrrationalClass>;

inline std::string to_string(const XiClass& cls) {
  if (std::holds_alternative<IntegerClass>(cls)) return "integer";
  if (std::holds_alternative<IrrationalClass>(cls)) return "irrational";
  const auto& r = std::get<RationalClass>(cls);
  return "rational:" + std::to_string(r.p1) + "," + std::to_string(r.p2) + "/" + std::to_string(r.q);
}

/// Lattice counts of the sample in each region.
inline std::vector<std::int64_t> count_in_region(const HomSample& s, const std::vector<ConeRegion>& regions) {
  if (regions.empty()) throw InvalidInput("need at least one region");
  const Mat2 g = s.matrix();
  std::vector<std::int64_t> k;
  k.reserve(regions.size());
  for (const auto& r : regions) k.push_back(count_in_cone(g, s.xi, r));
  return k;
}

// ---------------------------------------------------------------------------
// Congruence cosets

namespace detail {

inline std::int64_t mod(std::int64_t x, std::int64_t q) {
  const std::int64_t r = x % q;
  return r < 0 ? r + q : r;
}

}  // namespace detail

/// Integer matrices reducing mod q to each element of SL(2, Z/qZ) exactly once,
/// found by breadth-first search over words in S and T.
inline std::vector<IntMat2> coset_reps(std::int64_t q) {
  if (q < 2 || q > 5) throw Unsupported("coset_reps supports 2 <= q <= 5");
  const IntMat2 S{0, -1, 1, 0};
  const IntMat2 T{1, 1, 0, 1};
  auto key = [q](const IntMat2& m) {
    return ((detail::mod(m.a, q) * q + detail::mod(m.b, q)) * q + detail::mod(m.c, q)) * q + detail::mod(m.d, q);
  };
  std::vector<char> seen(static_cast<std::size_t>(q * q * q * q), 0);
  std::vector<IntMat2> reps;
  std::queue<IntMat2> frontier;
  frontier.push(IntMat2{});
  seen[static_cast<std::size_t>(key(IntMat2{}))] = 1;
  while (!frontier.empty()) {
    const IntMat2 m = frontier.front();
    frontier.pop();
    reps.push_back(m);
    for (const IntMat2& g : {S, T}) {
      const IntMat2 next = m * g;
      const auto k = static_cast<std::size_t>(key(next));
      if (!seen[k]) {
        seen[k] = 1;
        frontier.push(next);
      }
    }
  }
  return reps;
}

// ---------------------------------------------------------------------------
// Sampling runs

inline constexpr std::size_t kSampleBlock = 4096;

/// Per-sample counts of one Monte Carlo run, row-major n x m.
struct LimitRun {
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::vector<std::int32_t> counts;

  std::int32_t at(std::size_t i, std::size_t j) const { return counts[i * m + j]; }
};

/// Next sample of the block stream.
inline HomSample draw_sample(const XiClass& cls, Rng& rng, const std::vector<IntMat2>* reps) {
  HomSample s;
  s.point = haar_sample(rng);
  if (std::holds_alternative<IrrationalClass>(cls)) {
    s.xi = {rng.uniform(), rng.uniform()};
  } else if (const auto* r = std::get_if<RationalClass>(&cls)) {
    s.xi = {static_cast<double>(r->p1) / static_cast<double>(r->q),
            static_cast<double>(r->p2) / static_cast<double>(r->q)};
    s.coset = (*reps)[rng.below(reps->size())];
  }
  return s;
}

inline LimitRun sample_counts(double c, const XiClass& cls, const IntervalBox& box, std::size_t n, std::uint64_t seed,
                              unsigned threads = default_threads()) {
  box.validate();
  if (n == 0) throw InvalidInput("need at least one sample");
  std::vector<ConeRegion> regions;
  for (const auto& iv : box.intervals) regions.emplace_back(c, iv);
  std::vector<IntMat2> reps;
  if (const auto* r = std::get_if<RationalClass>(&cls)) {
    if (r->p1 < 0 || r->p2 < 0 || r->p1 >= r->q || r->p2 >= r->q) {
      throw InvalidInput("rational shift needs 0 <= p_i < q");
    }
    reps = coset_reps(r->q);
  }
  LimitRun run{n, box.dim(), seed, std::vector<std::int32_t>(n * box.dim())};
  const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
  parallel_chunks(blocks, threads, [&](std::size_t b) {
    Rng rng(seed, b);
    const std::size_t end = std::min(n, (b + 1) * kSampleBlock);
    for (std::size_t i = b * kSampleBlock; i < end; ++i) {
      const HomSample s = draw_sample(cls, rng, &reps);
      const Mat2 g = s.matrix();
      for (std::size_t j = 0; j < regions.size(); ++j) {
        run.counts[i * run.m + j] = static_cast<std::int32_t>(count_in_cone(g, s.xi, regions[j]));
      }
    }
  });
  return run;
}

/// Empirical distribution of count vectors.
struct KDistribution {
  std::map<std::vector<std::int64_t>, std::uint64_t> counts;
  std::uint64_t total = 0;

  static KDistribution from_run(const LimitRun& run) {
    KDistribution d;
    std::vector<std::int64_t> k(run.m);
    for (std::size_t i = 0; i < run.n; ++i) {
      for (std::size_t j = 0; j < run.m; ++j) k[j] = run.at(i, j);
      ++d.counts[k];
    }
    d.total = run.n;
    return d;
  }

  /// Marginal probabilities P(k_j = k), k = 0..max.
  std::vector<double> marginal(std::size_t j) const {
    std::vector<double> p;
    for (const auto& [k, cnt] : counts) {
      const auto kk = static_cast<std::size_t>(k.at(j));
      if (p.size() <= kk) p.resize(kk + 1, 0.0);
      p[kk] += static_cast<double>(cnt) / static_cast<double>(total);
    }
    return p;
  }
};

/// estimate, standard error, sample count.
struct Estimate {
  double estimate = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

inline Estimate mean_estimate(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= std::max(1.0, n - 1.0);
  return {mean, std::sqrt(var / n), x.size()};
}

/// Median of the means of `blocks` contiguous blocks. SE from the spread of the
/// block means, scaled by the asymptotic efficiency factor of the median.
inline Estimate median_of_means(const std::vector<double>& x, std::size_t blocks = 32) {
  if (x.size() < blocks) throw InsufficientData("fewer samples than median-of-means blocks");
  std::vector<double> means(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = x.size() * b / blocks, hi = x.size() * (b + 1) / blocks;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i];
    means[b] = s / static_cast<double>(hi - lo);
  }
  const Estimate spread = mean_estimate(means);
  std::vector<double> sorted = means;
  std::sort(sorted.begin(), sorted.end());
  const double med = blocks % 2 ? sorted[blocks / 2] : 0.5 * (sorted[blocks / 2 - 1] + sorted[blocks / 2]);
  return {med, spread.se * std::sqrt(std::numbers::pi / 2.0), x.size()};
}

/// Per-sample products prod_j k_j^{p_j} of the run, in sample order.
inline std::vector<double> run_products(const LimitRun& run, const std::vector<int>& powers) {
  std::vector<double> out(run.n);
  for (std::size_t i = 0; i < run.n; ++i) {
    double v = 1.0;
    for (std::size_t j = 0; j < run.m; ++j) {
      for (int p = 0; p < powers.at(j); ++p) v *= run.at(i, j);
    }
    out[i] = v;
  }
  return out;
}

/// Monte Carlo estimate of the limit law E_{c,xi}(., I).
inline KDistribution estimate_E(double c, const XiClass& cls, const IntervalBox& box, std::size_t n,
                                std::uint64_t seed, unsigned threads = default_threads()) {
  return KDistribution::from_run(sample_counts(c, cls, box, n, seed, threads));
}

// ---------------------------------------------------------------------------
// Tail exponent

struct TailFit {
  double slope = 0.0;
  std::int64_t k_min = 0;
  std::int64_t k_max = 0;
  std::size_t points = 0;
};

/// Least-squares slope of log P(N >= k) against log k over k_min <= k <= k_max,
/// using window 0 of the distribution. When k_max is not given, it is the
/// largest k whose tail still holds `min_tail` samples.
inline TailFit tail_exponent(const KDistribution& dist, std::int64_t k_min, std::optional<std::int64_t> k_max = {},
                             std::uint64_t min_tail = 10) {
  if (dist.total == 0) throw InsufficientData("empty distribution");
  std::map<std::int64_t, std::uint64_t> hist;
  for (const auto& [k, cnt] : dist.counts) hist[k.at(0)] += cnt;
  const std::int64_t top = hist.rbegin()->first;
  std::vector<std::uint64_t> tail(static_cast<std::size_t>(top) + 2, 0);
  for (std::int64_t k = top; k >= 0; --k) {
    const auto it = hist.find(k);
    tail[static_cast<std::size_t>(k)] = tail[static_cast<std::size_t>(k) + 1] + (it == hist.end() ? 0 : it->second);
  }
  std::int64_t hi = k_max.value_or(top);
  if (!k_max) {
    while (hi >= k_min && tail[static_cast<std::size_t>(hi)] < min_tail) --hi;
  }
  hi = std::min(hi, top);
  std::vector<double> xs, ys;
  for (std::int64_t k = std::max<std::int64_t>(1, k_min); k <= hi; ++k) {
    const auto t = tail[static_cast<std::size_t>(k)];
    if (t == 0) continue;
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(std::log(static_cast<double>(t) / static_cast<double>(dist.total)));
  }
  if (xs.size() < 3) throw InsufficientData("tail fit needs at least three points with mass");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return {sxy / sxx, k_min, hi, xs.size()};
}

// ---------------------------------------------------------------------------
// Siegel-type formulas

enum class SiegelKind { classic, affine_pair };

struct SiegelResult {
  Estimate lhs;
  double exact = 0.0;
  std::uint64_t seed = 0;
};

/// Gaussian exp(-|x|^2) drops below 1e-16 outside this radius.
inline double gaussian_cutoff(double scale = 1.0) { return std::sqrt(16.0 * std::log(10.0) / scale); }

/// Monte Carlo average of per-sample values value(rng) over n samples drawn in
/// fixed blocks, so results do not depend on the thread count.
template <class SampleValue>
Estimate block_monte_carlo(std::size_t n, std::uint64_t seed, unsigned threads, SampleValue&& value) {
  std::vector<double> vals(n);
  const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
  parallel_chunks(blocks, threads, [&](std::size_t b) {
    Rng rng(seed, b);
    const std::size_t end = std::min(n, (b + 1) * kSampleBlock);
    for (std::size_t i = b * kSampleBlock; i < end; ++i) vals[i] = value(rng);
  });
  return mean_estimate(vals);
}

/// Classic: E sum_{m != 0} F(mM) vs int F; affine_pair:
/// E sum_{m1 != m2} F((m1 + z)M, (m2 + z)M) vs int F over R^4, with Gaussian F.
inline SiegelResult siegel_check(SiegelKind which, std::size_t n, std::uint64_t seed,
                                 unsigned threads = default_threads()) {
  if (n == 0) throw InvalidInput("need at least one sample");
  const DiscRegion disc{gaussian_cutoff(), -1.0, true};
  SiegelResult res;
  res.seed = seed;
  if (which == SiegelKind::classic) {
    res.exact = std::numbers::pi;
    res.lhs = block_monte_carlo(n, seed, threads, [&](Rng& rng) {
      const Mat2 M = haar_sample(rng).matrix();
      double s = 0.0;
      for_each_lattice_point_any_order(M, {}, disc, [&](std::int64_t m1, std::int64_t m2, Vec2 p) {
        if (m1 != 0 || m2 != 0) s += std::exp(-p.norm2());
      });
      return s;
    });
  } else {
    res.exact = std::numbers::pi * std::numbers::pi;
    res.lhs = block_monte_carlo(n, seed, threads, [&](Rng& rng) {
      const Mat2 M = haar_sample(rng).matrix();
      const Vec2 z{rng.uniform(), rng.uniform()};
      double s1 = 0.0, s2 = 0.0;
      for_each_lattice_point_any_order(M, z, disc, [&](std::int64_t, std::int64_t, Vec2 p) {
        const double f = std::exp(-p.norm2());
        s1 += f;
        s2 += f * f;
      });
      return s1 * s1 - s2;
    });
  }
  return res;
}

// ---------------------------------------------------------------------------
// Bounds relating the finite-T count to the space of lattices

/// Smallest T at which the triangle bound is asserted for window I and margin
/// theta: the relative count error (at most ~10/T for the disc) times max|I|
/// must stay below theta / 2.
inline double crude_bound_T0(Interval window, double theta) {
  if (!(theta > 0.0)) return HUGE_VAL;
  const double reach = std::max(std::abs(window.lo), std::abs(window.hi));
  return std::max(10.0, 20.0 * reach / theta);
}

struct CrudeBoundResult {
  std::size_t lhs = 0;
  std::int64_t rhs = 0;
  bool holds = false;
};

/// Compares N_{0,T}(I, alpha) (from the disc direction set of `lat` at T) with
/// the lattice count of (1, xi) M0 k(2 pi alpha) Phi^t in the enlarged
/// triangle, T = e^{t/2}.
inline CrudeBoundResult crude_bound_check(const DirectionSet& disc_dirs, const AffineLatticeSpec& lat, double alpha,
                                          Interval window, double theta) {
  const auto* ann = std::get_if<Annulus>(&disc_dirs.shape);
  if (!ann || ann->c != 0.0) throw InvalidInput("crude bound is stated for the disc (c = 0)");
  const double T = disc_dirs.T;
  if (!(T >= crude_bound_T0(window, theta))) {
    throw InvalidInput("T = " + std::to_string(T) + " is below T0 = " + std::to_string(crude_bound_T0(window, theta)));
  }
  CrudeBoundResult r;
  r.lhs = counting_stat(disc_dirs, window, alpha);
  const Mat2 g = lat.basis * k_of(kTwoPi * alpha) * flow_of(T);
  r.rhs = count_in_cone(g, lat.shift, ConeRegion(0.0, {window.lo - theta, window.hi + theta}));
  r.holds = static_cast<std::int64_t>(r.lhs) <= r.rhs;
  return r;
}

struct CuspBoundResult {
  std::int64_t count = 0;       // points in the closed disc of radius r
  double line_factor = 0.0;     // 2 r v^{1/2} + 1
  std::int64_t strip_hits = 0;  // #((Z + xi_1) n [-r v^{-1/2}, r v^{-1/2}])
  bool holds_linear = false;
  bool power_checked = false;  // v > 4 r^2
  bool holds_power = true;     // for sigma in {1.5, 2, 2.5}
};

/// Cusp bound for the disc of radius r at a sample with v >= 1.
inline CuspBoundResult cusp_bound_check(const HomSample& s, double r) {
  if (!(s.point.v >= 1.0)) throw InvalidInput("cusp bound needs v >= 1");
  if (!(r >= 0.0)) throw InvalidInput("radius must be nonnegative");
  CuspBoundResult res;
  const Mat2 g = s.point.matrix();
  res.count = count_lattice_points(g, s.xi, DiscRegion{r, -1.0, true});
  const double sv = std::sqrt(s.point.v);
  res.line_factor = 2.0 * r * sv + 1.0;
  const double w = r / sv;
  const auto lo = static_cast<std::int64_t>(std::ceil(-w - s.xi.x));
  const auto hi = static_cast<std::int64_t>(std::floor(w - s.xi.x));
  res.strip_hits = std::max<std::int64_t>(0, hi - lo + 1);
  const double rhs = res.line_factor * static_cast<double>(res.strip_hits);
  res.holds_linear = static_cast<double>(res.count) <= rhs;
  if (s.point.v > 4.0 * r * r) {
    res.power_checked = true;
    for (const double sigma : {1.5, 2.0, 2.5}) {
      const double l = std::pow(static_cast<double>(res.count), sigma);
      const double rr = std::pow(res.line_factor, sigma) * static_cast<double>(res.strip_hits);
      res.holds_power = res.holds_power && l <= rr;
    }
  }
  return res;
}

}  // namespace latdir
