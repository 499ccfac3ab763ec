#pragma once

// Finite-T statistics of a direction set: the window counting function,
// k-th neighbour spacings, the two-point correlation and mixed moments.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latdir/errors.hpp"
#include "latdir/lattice_core.hpp"
#include "latdir/lattice_walk.hpp"
#include "latdir/parallel.hpp"

namespace latdir {

/// Product of bounded windows I_1 x ... x I_m.
struct IntervalBox {
  std::vector<Interval> intervals;

  std::size_t dim() const { return intervals.size(); }

  void validate() const {
    if (intervals.empty()) throw InvalidInput("interval box needs at least one window");
    for (const auto& iv : intervals) {
      if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
        throw InvalidInput("windows must be bounded with lo < hi");
      }
    }
  }
};

inline Interval intersect(Interval a, Interval b) {
  Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  if (r.hi < r.lo) r.hi = r.lo;
  return r;
}

inline double frac(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;
  return f;
}

// ---------------------------------------------------------------------------
// Counting function

namespace detail {

inline std::size_t count_in_arc(std::span<const double> a, double lo, double hi) {
  return static_cast<std::size_t>(std::lower_bound(a.begin(), a.end(), hi) -
                                  std::lower_bound(a.begin(), a.end(), lo));
}

}  // namespace detail

/// Number of alpha_j in the circle window [alpha + lo/N, alpha + hi/N) mod 1.
/// A window of length >= 1 is the whole circle.
inline std::size_t counting_stat(std::span<const double> alphas, Interval window, double alpha) {
  const std::size_t n = alphas.size();
  if (n == 0) return 0;
  const double N = static_cast<double>(n);
  const double len = (window.hi - window.lo) / N;
  if (len >= 1.0) return n;
  if (len <= 0.0) return 0;
  const double lo = frac(alpha + window.lo / N);
  const double hi = lo + len;
  if (hi <= 1.0) return detail::count_in_arc(alphas, lo, hi);
  return detail::count_in_arc(alphas, lo, 1.0) + detail::count_in_arc(alphas, 0.0, hi - 1.0);
}

inline std::size_t counting_stat(const DirectionSet& dirs, Interval window, double alpha) {
  return counting_stat(std::span<const double>(dirs.alphas), window, alpha);
}

// ---------------------------------------------------------------------------
// Histograms

enum class Normalization { density, count };

struct Histogram {
  std::vector<double> edges;
  std::vector<double> values;
  Normalization normalization = Normalization::density;

  std::size_t bins() const { return values.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }

  /// Integral of the density (or the sum of counts).
  double total() const {
    double t = 0.0;
    for (std::size_t i = 0; i < bins(); ++i) {
      t += normalization == Normalization::density ? values[i] * width(i) : values[i];
    }
    return t;
  }
};

/// Edges lo, lo + width, ..., hi. The last bin is clipped at hi.
inline std::vector<double> make_edges(double lo, double hi, double width) {
  if (!(hi > lo) || !(width > 0.0)) throw InvalidInput("bins need lo < hi and width > 0");
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / width - 1e-9));
  std::vector<double> e(n + 1);
  for (std::size_t i = 0; i <= n; ++i) e[i] = lo + width * static_cast<double>(i);
  e[n] = hi;
  return e;
}

inline void validate_edges(const std::vector<double>& edges) {
  if (edges.size() < 2) throw InvalidInput("need at least two bin edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw InvalidInput("bin edges must be strictly increasing");
  }
}

namespace detail {

/// Bin of x in [edges.front(), edges.back()), or npos.
inline std::size_t find_bin(const std::vector<double>& edges, double x) {
  if (!(x >= edges.front()) || !(x < edges.back())) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin()) - 1;
}

inline constexpr std::size_t kNoBin = static_cast<std::size_t>(-1);

}  // namespace detail

/// Histogram of N (alpha_{j+k} - alpha_j mod 1) over all j (cyclic),
/// normalised so that the density over the whole line integrates to 1.
inline Histogram spacing_histogram(const DirectionSet& dirs, std::size_t k, const std::vector<double>& edges) {
  validate_edges(edges);
  const std::size_t n = dirs.size();
  if (k == 0 || k >= n) throw InvalidInput("neighbour index k must satisfy 1 <= k < N");
  const double N = static_cast<double>(n);
  Histogram h{edges, std::vector<double>(edges.size() - 1, 0.0), Normalization::density};
  std::vector<std::uint64_t> counts(h.bins(), 0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = j + k;
    double d = i < n ? dirs.alphas[i] - dirs.alphas[j] : dirs.alphas[i - n] + 1.0 - dirs.alphas[j];
    const std::size_t b = detail::find_bin(edges, N * d);
    if (b != detail::kNoBin) ++counts[b];
  }
  for (std::size_t b = 0; b < h.bins(); ++b) h.values[b] = static_cast<double>(counts[b]) / (N * h.width(b));
  return h;
}

// ---------------------------------------------------------------------------
// Pairs

/// Calls fn(delta, j1, j2) for every ordered pair j1 != j2 with
/// delta = N (alpha_{j1} - alpha_{j2} + m) in [-reach, reach] for some m.
/// Requires reach < N/2 so that at most one m contributes per pair. The pairs
/// with base index j in [first, last) are visited (each unordered pair once
/// from its left end).
template <class Fn>
void for_each_close_pair(std::span<const double> a, double reach, std::size_t first, std::size_t last, Fn&& fn) {
  const std::size_t n = a.size();
  const double N = static_cast<double>(n);
  for (std::size_t j = first; j < last; ++j) {
    for (std::size_t k = 1; k < n; ++k) {
      std::size_t i = j + k;
      double d;
      if (i < n) {
        d = a[i] - a[j];
      } else {
        i -= n;
        d = a[i] + 1.0 - a[j];
      }
      d *= N;
      if (d > reach) break;
      fn(d, i, j);
      fn(-d, j, i);
    }
  }
}

inline void check_reach(std::size_t n, double reach) {
  if (!(reach < static_cast<double>(n) / 2.0)) {
    throw InvalidInput("pair window must be narrower than N/2 (reach " + std::to_string(reach) + ", N " +
                       std::to_string(n) + ")");
  }
}

struct PairCorrelationOptions {
  bool fold = false;  // histogram |delta| instead of signed delta
  /// Optional local density rho; each pair is weighted by 1 / rho(alpha_{j1}).
  std::function<double(double)> density;
  unsigned threads = default_threads();
};

/// Two-point correlation density: for each bin, (1/N) #{ordered pairs with
/// scaled separation in the bin} divided by the bin width.
inline Histogram pair_correlation(const DirectionSet& dirs, const std::vector<double>& edges,
                                  const PairCorrelationOptions& opt = {}) {
  validate_edges(edges);
  const std::size_t n = dirs.size();
  if (n < 2) throw InvalidInput("pair correlation needs at least two directions");
  const double reach = std::max(std::abs(edges.front()), std::abs(edges.back()));
  check_reach(n, reach);
  const std::size_t bins = edges.size() - 1;
  const std::size_t chunks = std::min<std::size_t>(64, n);
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(bins, 0.0));
  const std::span<const double> a(dirs.alphas);
  parallel_chunks(chunks, opt.threads, [&](std::size_t c) {
    auto& hist = partial[c];
    const std::size_t first = n * c / chunks, last = n * (c + 1) / chunks;
    for_each_close_pair(a, reach, first, last, [&](double delta, std::size_t j1, std::size_t) {
      const double x = opt.fold ? std::abs(delta) : delta;
      const std::size_t b = detail::find_bin(edges, x);
      if (b == detail::kNoBin) return;
      hist[b] += opt.density ? 1.0 / opt.density(a[j1]) : 1.0;
    });
  });
  Histogram h{edges, std::vector<double>(bins, 0.0), Normalization::density};
  for (const auto& p : partial) {
    for (std::size_t b = 0; b < bins; ++b) h.values[b] += p[b];
  }
  const double N = static_cast<double>(n);
  for (std::size_t b = 0; b < bins; ++b) h.values[b] /= N * h.width(b);
  return h;
}

// ---------------------------------------------------------------------------
// Mixed moments

/// Probability measure on the circle with a continuous density, integrated on
/// a midpoint grid.
struct MeasureSpec {
  std::function<double(double)> density;  // empty means uniform
  std::size_t quadrature_points = 20'001;

  static MeasureSpec uniform(std::size_t points = 20'001) { return {{}, points}; }

  double weight_at(double alpha) const {
    const double w = density ? density(alpha) : 1.0;
    return w / static_cast<double>(quadrature_points);
  }

  double node(std::size_t i) const {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(quadrature_points);
  }

  void validate() const {
    if (quadrature_points == 0) throw InvalidInput("quadrature_points must be positive");
    double total = 0.0;
    for (std::size_t i = 0; i < quadrature_points; ++i) {
      const double w = weight_at(node(i));
      if (!(w >= 0.0)) throw InvalidInput("density must be nonnegative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-6) throw InvalidInput("density does not integrate to 1 on the grid");
  }
};

/// Exponents s_1..s_m and an optional cap K for the restricted moment.
struct MomentSpec {
  std::vector<std::complex<double>> exponents;
  std::optional<std::int64_t> cap;

  /// Sum of positive real parts.
  double sigma() const {
    double s = 0.0;
    for (const auto& e : exponents) s += std::max(e.real(), 0.0);
    return s;
  }

  /// Finite-moment condition that holds for every shift vector.
  bool convergent_for_any_shift() const { return sigma() < 2.0; }

  /// Finite-moment condition for shifts of Diophantine type kappa.
  bool convergent_for_diophantine(double kappa) const { return sigma() < 2.0 + 2.0 / kappa; }
};

/// shifted: prod (N_j + 1)^{s_j}; raw: prod N_j^{s_j} with 0^0 = 1.
enum class MomentForm { shifted, raw };

namespace detail {

inline std::complex<double> power_of_count(std::size_t k, std::complex<double> s, MomentForm form) {
  if (s == std::complex<double>(0.0, 0.0)) return 1.0;
  double base = static_cast<double>(k) + (form == MomentForm::shifted ? 1.0 : 0.0);
  if (base == 0.0) {
    if (s.real() > 0.0) return 0.0;
    throw InvalidInput("raw moment 0^s is undefined for Re s <= 0, s != 0");
  }
  if (s.imag() == 0.0) return std::pow(base, s.real());
  return std::exp(s * std::log(base));
}

}  // namespace detail

/// Integral over lambda of prod_j (N(I_j, alpha) [+1])^{s_j}; grid points where
/// max_j N(I_j, alpha) > K are dropped when a cap is set.
inline std::complex<double> mixed_moment(const DirectionSet& dirs, const IntervalBox& box, const MomentSpec& spec,
                                         const MeasureSpec& lam = MeasureSpec::uniform(),
                                         MomentForm form = MomentForm::shifted) {
  box.validate();
  if (spec.exponents.size() != box.dim()) throw InvalidInput("need one exponent per window");
  if (lam.quadrature_points == 0) throw InvalidInput("quadrature_points must be positive");
  const std::span<const double> a(dirs.alphas);
  std::complex<double> total = 0.0;
  std::vector<std::size_t> counts(box.dim());
  for (std::size_t i = 0; i < lam.quadrature_points; ++i) {
    const double alpha = lam.node(i);
    std::size_t mx = 0;
    for (std::size_t j = 0; j < box.dim(); ++j) {
      counts[j] = counting_stat(a, box.intervals[j], alpha);
      mx = std::max(mx, counts[j]);
    }
    if (spec.cap && static_cast<std::int64_t>(mx) > *spec.cap) continue;
    std::complex<double> term = lam.weight_at(alpha);
    for (std::size_t j = 0; j < box.dim(); ++j) {
      term *= detail::power_of_count(counts[j], spec.exponents[j], form);
    }
    total += term;
  }
  return total;
}

/// Values of N(I, alpha) on the measure grid (empirical law of the counting
/// function under uniform alpha).
inline std::vector<std::size_t> counts_on_grid(const DirectionSet& dirs, Interval window, std::size_t points) {
  std::vector<std::size_t> out(points);
  const std::span<const double> a(dirs.alphas);
  for (std::size_t i = 0; i < points; ++i) {
    out[i] = counting_stat(a, window, (static_cast<double>(i) + 0.5) / static_cast<double>(points));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Second mixed moment vs. pair correlation: two exact evaluations of
//   int_T sum_{j1 != j2} chi_{I1}(N(alpha_{j1} - alpha + m1)) chi_{I2}(N(alpha_{j2} - alpha + m2)) d alpha.

/// Moment route: the integrand equals N(I1,a) N(I2,a) - N(I1 n I2, a), a step
/// function of alpha; integrate it exactly by sweeping its breakpoints.
inline double pair_correlation_via_moment(const DirectionSet& dirs, Interval i1, Interval i2) {
  const std::size_t n = dirs.size();
  if (n == 0) return 0.0;
  const double N = static_cast<double>(n);
  const Interval windows[3] = {i1, i2, intersect(i1, i2)};
  for (const auto& w : windows) {
    if (!(w.length() < N)) throw InvalidInput("window must be shorter than N");
  }
  struct Event {
    double pos;
    int which;
    int delta;
  };
  std::vector<Event> events;
  events.reserve(6 * n);
  long long count[3] = {0, 0, 0};
  for (int w = 0; w < 3; ++w) {
    if (windows[w].length() <= 0.0) continue;
    for (const double aj : dirs.alphas) {
      // N(I, alpha) counts j with alpha in (aj - hi/N, aj - lo/N] mod 1.
      const double s = frac(aj - windows[w].hi / N);
      const double e = frac(aj - windows[w].lo / N);
      if (s > e) ++count[w];  // arc wraps through 0
      events.push_back({s, w, +1});
      events.push_back({e, w, -1});
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) { return x.pos < y.pos; });
  double integral = 0.0;
  double prev = 0.0;
  for (const auto& ev : events) {
    const double gap = ev.pos - prev;
    if (gap > 0.0) {
      integral += static_cast<double>(count[0] * count[1] - count[2]) * gap;
      prev = ev.pos;
    }
    count[ev.which] += ev.delta;
  }
  integral += static_cast<double>(count[0] * count[1] - count[2]) * (1.0 - prev);
  return integral;
}

/// Pair route: (1/N) sum over ordered pairs of |I1 n (I2 + delta)|.
inline double pair_correlation_direct(const DirectionSet& dirs, Interval i1, Interval i2) {
  const std::size_t n = dirs.size();
  if (n < 2) return 0.0;
  const double reach = std::max(std::abs(i1.lo - i2.hi), std::abs(i1.hi - i2.lo));
  check_reach(n, reach);
  double sum = 0.0;
  for_each_close_pair(std::span<const double>(dirs.alphas), reach, 0, n, [&](double delta, std::size_t, std::size_t) {
    sum += intersect(i1, Interval{i2.lo + delta, i2.hi + delta}).length();
  });
  return sum / static_cast<double>(n);
}

}  // namespace latdir
