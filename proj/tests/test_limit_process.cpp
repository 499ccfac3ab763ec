#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "latdir/constants.hpp"
#include "latdir/limit_process.hpp"
#include "oracles.hpp"

using namespace latdir;

namespace {

// Independent membership test for the cone region.
bool in_cone(double c, Interval I, double x, double y) {
  if (!(x > c && x < 1.0)) return false;
  const double t = (1.0 - c * c) * y / (2.0 * x);
  return t > I.lo && t < I.hi;
}

std::int64_t brute_cone_count(const Mat2& g, Vec2 xi, double c, Interval I) {
  // Cone points have |y| <= R; preimages satisfy |m| <= R ||g^-1|| + 1.
  const double R = std::hypot(1.0, 2.0 * std::max(std::abs(I.lo), std::abs(I.hi)) / (1.0 - c * c));
  const Mat2 gi = g.inverse();
  const double norm = std::abs(gi.a) + std::abs(gi.b) + std::abs(gi.c) + std::abs(gi.d);
  const auto L = static_cast<std::int64_t>(R * norm) + 2;
  std::int64_t n = 0;
  for (std::int64_t m1 = -L; m1 <= L; ++m1) {
    for (std::int64_t m2 = -L; m2 <= L; ++m2) {
      const Vec2 y = Vec2{m1 + xi.x, m2 + xi.y} * g;
      if (in_cone(c, I, y.x, y.y)) ++n;
    }
  }
  return n;
}

}  // namespace

TEST(Iwasawa, RoundTrip) {
  Rng rng(5, 0);
  for (int i = 0; i < 100; ++i) {
    const IwasawaPoint p{rng.uniform(-3, 3), rng.uniform(0.1, 20), rng.uniform(0, kTwoPi)};
    const IwasawaPoint q = iwasawa(p.matrix());
    EXPECT_NEAR(q.u, p.u, 1e-9);
    EXPECT_NEAR(q.v, p.v, 1e-9 * p.v);
    EXPECT_NEAR(std::remainder(q.phi - p.phi, kTwoPi), 0.0, 1e-9);
    EXPECT_NEAR(p.matrix().det(), 1.0, 1e-12);
  }
}

TEST(HaarSample, DomainAndMarginals) {
  Rng rng(17, 0);
  const std::size_t n = 100'000;
  std::vector<double> vs;
  double phi_mean = 0.0, u_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const IwasawaPoint p = haar_sample(rng);
    ASSERT_LE(std::abs(p.u), 0.5);
    ASSERT_GE(p.u * p.u + p.v * p.v, 1.0);
    ASSERT_GE(p.phi, 0.0);
    ASSERT_LT(p.phi, kTwoPi);
    vs.push_back(p.v);
    phi_mean += p.phi / n;
    u_mean += p.u / n;
  }
  std::sort(vs.begin(), vs.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double F = 1.0 - oracle::v_tail(vs[i]);
    ks = std::max({ks, std::abs(F - static_cast<double>(i) / n), std::abs(F - static_cast<double>(i + 1) / n)});
  }
  EXPECT_LE(ks, 0.01);
  EXPECT_NEAR(phi_mean, std::numbers::pi, 0.03);
  EXPECT_NEAR(u_mean, 0.0, 0.005);
}

TEST(HaarSample, TailOfHeight) {
  // P(v >= 2) = 3 / (2 pi).
  Rng rng(1, 9);
  const int n = 200'000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += haar_sample(rng).v >= 2.0;
  const double p = 3.0 / (2.0 * std::numbers::pi);
  EXPECT_NEAR(static_cast<double>(hits) / n, p, 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST(Cone, AreaIsWindowLength) {
  Rng rng(2, 0);
  for (double c : {0.0, 0.3, 0.7}) {
    const ConeRegion cone(c, {-0.4, 1.3});
    EXPECT_DOUBLE_EQ(cone.area(), 1.7);
    // Trapezoid with vertical sides 2c|I|/(1-c^2) at x = c and 2|I|/(1-c^2) at x = 1.
    const double k = 2.0 * 1.7 / (1.0 - c * c);
    EXPECT_NEAR((1.0 - c) * (k * c + k) / 2.0, 1.7, 1e-12);
    const Interval xb = cone.xbox(), yb = cone.ybox();
    const double box = (xb.hi - xb.lo) * (yb.hi - yb.lo);
    const int n = 200'000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      const double x = rng.uniform(xb.lo, xb.hi), y = rng.uniform(yb.lo, yb.hi);
      EXPECT_EQ(cone.contains({x, y}), in_cone(c, cone.window, x, y));
      hits += cone.contains({x, y});
    }
    const double p = static_cast<double>(hits) / n;
    EXPECT_NEAR(p * box, 1.7, 3.0 * box * std::sqrt(p * (1 - p) / n));
  }
  EXPECT_THROW(ConeRegion(1.0, {0, 1}), InvalidInput);
  EXPECT_THROW(ConeRegion(0.2, {1, 1}), InvalidInput);
}

TEST(Cone, CountsMatchBruteForce) {
  Rng rng(8, 0);
  std::int64_t total = 0;
  for (int i = 0; i < 300; ++i) {
    const IwasawaPoint p = haar_sample(rng);
    if (p.v > 30.0) continue;  // keep the brute-force box small
    const Vec2 xi{rng.uniform(), rng.uniform()};
    const double c = i % 3 == 0 ? 0.0 : 0.4;
    const Interval I{rng.uniform(-2, 1), 0.0};
    const Interval W{I.lo, I.lo + rng.uniform(0.2, 3)};
    const auto got = count_in_cone(p.matrix(), xi, ConeRegion(c, W));
    EXPECT_EQ(got, brute_cone_count(p.matrix(), xi, c, W));
    total += got;
  }
  EXPECT_GT(total, 100);
}

TEST(Cone, TranslationIsExact) {
  // y in C_c(I + r)  <=>  y n(-2r / (1 - c^2)) in C_c(I).
  Rng rng(21, 0);
  for (double c : {0.0, 0.5}) {
    for (double r : {0.3, 1.7}) {
      const double u = 2.0 * r / (1.0 - c * c);
      for (int i = 0; i < 1000; ++i) {
        const IwasawaPoint p = haar_sample(rng);
        const Vec2 xi{rng.uniform(), rng.uniform()};
        const auto a = count_in_cone(p.matrix(), xi, ConeRegion(c, {0.0 + r, 1.0 + r}));
        const auto b = count_in_cone(p.matrix() * n_of(-u), xi, ConeRegion(c, {0.0, 1.0}));
        EXPECT_EQ(a, b);
      }
    }
  }
}

TEST(Cosets, AreExactlySL2ModQ) {
  const std::map<std::int64_t, std::size_t> order{{2, 6}, {3, 24}, {4, 48}, {5, 120}};
  for (const auto& [q, size] : order) {
    const auto reps = coset_reps(q);
    EXPECT_EQ(reps.size(), size);
    std::set<std::array<std::int64_t, 4>> got, want;
    for (const auto& m : reps) {
      EXPECT_EQ(m.det(), 1);
      const auto md = [q](std::int64_t x) { return ((x % q) + q) % q; };
      got.insert({md(m.a), md(m.b), md(m.c), md(m.d)});
    }
    for (std::int64_t a = 0; a < q; ++a)
      for (std::int64_t b = 0; b < q; ++b)
        for (std::int64_t c = 0; c < q; ++c)
          for (std::int64_t d = 0; d < q; ++d)
            if (((a * d - b * c) % q + q) % q == 1) want.insert({a, b, c, d});
    EXPECT_EQ(got, want);
  }
  EXPECT_THROW(coset_reps(6), Unsupported);
  EXPECT_THROW(coset_reps(1), InvalidInput);
}

TEST(Sampling, ThreadCountDoesNotChangeCounts) {
  const IntervalBox box{{{0.0, 1.0}, {0.5, 2.0}}};
  for (const XiClass& cls : std::vector<XiClass>{IrrationalClass{}, IntegerClass{}, RationalClass{1, 2, 3}}) {
    const auto a = sample_counts(0.2, cls, box, 10'000, 42, 1);
    const auto b = sample_counts(0.2, cls, box, 10'000, 42, 3);
    EXPECT_EQ(a.counts, b.counts) << to_string(cls);
    // A shorter run is a prefix of a longer one with the same seed.
    const auto c = sample_counts(0.2, cls, box, 5'000, 42, 2);
    EXPECT_TRUE(std::equal(c.counts.begin(), c.counts.end(), a.counts.begin()));
  }
}

TEST(Sampling, FirstMomentEqualsWindowLength) {
  const IntervalBox box{{{0.0, 1.0}}};
  for (const XiClass& cls : std::vector<XiClass>{IrrationalClass{}, IntegerClass{}, RationalClass{1, 1, 2}}) {
    const LimitRun run = sample_counts(0.0, cls, box, 200'000, 3, 1);
    const Estimate e = mean_estimate(run_products(run, {1}));
    EXPECT_NEAR(e.estimate, 1.0, 4.0 * e.se) << to_string(cls);
  }
  // With a hole, the mean is still |I|.
  const LimitRun run = sample_counts(0.6, IrrationalClass{}, IntervalBox{{{-1.0, 0.5}}}, 200'000, 4, 1);
  const Estimate e = mean_estimate(run_products(run, {1}));
  EXPECT_NEAR(e.estimate, 1.5, 4.0 * e.se);
}

TEST(Sampling, TranslationInvarianceInLaw) {
  // Same seed streams: P(N = k) for I and I + r agree within 3 SE.
  const std::size_t n = 100'000;
  const auto base = estimate_E(0.0, IrrationalClass{}, IntervalBox{{{0.0, 1.0}}}, n, 9, 1);
  for (double r : {0.3, 1.7}) {
    const auto moved = estimate_E(0.0, IrrationalClass{}, IntervalBox{{{r, 1.0 + r}}}, n, 9, 1);
    const auto p = base.marginal(0), q = moved.marginal(0);
    for (std::size_t k = 0; k < 4; ++k) {
      const double se = std::sqrt(2.0 * p[k] * (1 - p[k]) / n);
      EXPECT_NEAR(p[k], q[k], 3.0 * se) << "k=" << k << " r=" << r;
    }
  }
}

TEST(Sampling, RejectsBadInput) {
  EXPECT_THROW(sample_counts(0.0, RationalClass{2, 0, 2}, IntervalBox{{{0, 1}}}, 10, 1), InvalidInput);
  EXPECT_THROW(sample_counts(0.0, IrrationalClass{}, IntervalBox{{{0, 1}}}, 0, 1), InvalidInput);
  EXPECT_THROW(sample_counts(0.0, IrrationalClass{}, IntervalBox{}, 10, 1), InvalidInput);
}

TEST(Estimators, MedianOfMeans) {
  const std::vector<double> flat(640, 2.5);
  const Estimate e = median_of_means(flat);
  EXPECT_EQ(e.estimate, 2.5);
  EXPECT_EQ(e.se, 0.0);
  EXPECT_EQ(e.n, 640u);
  EXPECT_THROW(median_of_means(std::vector<double>(10, 1.0)), InsufficientData);
  // Blocks are contiguous: the median ignores one block with a huge outlier.
  std::vector<double> x(3200, 1.0);
  x[5] = 1e9;
  EXPECT_EQ(median_of_means(x).estimate, 1.0);
  const Estimate m = mean_estimate({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m.estimate, 2.5);
  EXPECT_NEAR(m.se, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
}

TEST(Estimators, TailExponentOfExactPowerLaw) {
  // Counts with P(N >= k) = k^-3 for k >= 1.
  KDistribution d;
  const std::uint64_t total = 1'000'000'000;
  std::uint64_t prev = total;
  for (std::int64_t k = 1; k <= 60; ++k) {
    const auto tail_next = static_cast<std::uint64_t>(std::llround(total / std::pow(k + 1.0, 3)));
    d.counts[{k}] = prev - tail_next;
    prev = tail_next;
  }
  d.counts[{61}] = prev;
  d.total = total;
  const TailFit fit = tail_exponent(d, 5, 40);
  EXPECT_NEAR(fit.slope, -3.0, 1e-3);
  EXPECT_EQ(fit.k_max, 40);
  EXPECT_THROW(tail_exponent(KDistribution{}, 5), InsufficientData);
}

TEST(Estimators, KDistributionMarginals) {
  const LimitRun run{3, 2, 0, {0, 1, 2, 1, 0, 1}};
  const auto d = KDistribution::from_run(run);
  EXPECT_EQ(d.total, 3u);
  EXPECT_EQ(d.counts.size(), 2u);  // (0,1) twice, (2,1) once
  const auto m0 = d.marginal(0);
  ASSERT_EQ(m0.size(), 3u);
  EXPECT_DOUBLE_EQ(m0[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m0[2], 1.0 / 3.0);
}

TEST(Siegel, ClassicAndAffine) {
  for (const auto kind : {SiegelKind::classic, SiegelKind::affine_pair}) {
    const SiegelResult r = siegel_check(kind, 20'000, 5, 1);
    EXPECT_NEAR(r.lhs.estimate, r.exact, 4.0 * r.lhs.se);
    EXPECT_EQ(r.lhs.n, 20'000u);
    EXPECT_EQ(r.seed, 5u);
  }
  EXPECT_NEAR(std::exp(-gaussian_cutoff() * gaussian_cutoff()), 1e-16, 1e-20);
}

TEST(Bounds, CrudeBoundOnRandomDirections) {
  const Vec2 xi{static_cast<double>(parse_real_ld("cbrt4")), static_cast<double>(parse_real_ld("cbrt2"))};
  const AffineLatticeSpec lat{Mat2::identity(), xi};
  const DirectionSet d = direction_set(lat, Annulus{0.0}, 200.0, {200'000'000, 1});
  Rng rng(6, 0);
  for (int i = 0; i < 50; ++i) {
    const auto r = crude_bound_check(d, lat, rng.uniform(), {0.0, 1.0}, 0.5);
    EXPECT_TRUE(r.holds) << r.lhs << " > " << r.rhs;
  }
  EXPECT_THROW(crude_bound_check(d, lat, 0.1, {0.0, 1.0}, 0.01), InvalidInput);
  const DirectionSet ann = direction_set(lat, Annulus{0.5}, 200.0, {200'000'000, 1});
  EXPECT_THROW(crude_bound_check(ann, lat, 0.1, {0.0, 1.0}, 0.5), InvalidInput);
}

TEST(Bounds, CuspBoundOnRandomSamples) {
  Rng rng(12, 0);
  int checked = 0, power = 0;
  while (checked < 200) {
    HomSample s;
    s.point = haar_sample(rng);
    if (s.point.v < 1.0) continue;
    s.xi = {rng.uniform(), rng.uniform()};
    for (double r : {0.3, 1.0, 2.5}) {
      const auto b = cusp_bound_check(s, r);
      EXPECT_TRUE(b.holds_linear);
      EXPECT_TRUE(b.holds_power);
      power += b.power_checked;
    }
    ++checked;
  }
  EXPECT_GT(power, 0);
  HomSample low;
  low.point = {0.0, 0.9, 0.0};
  EXPECT_THROW(cusp_bound_check(low, 1.0), InvalidInput);
}
