#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <algorithm>
#include <cmath>

#include "latdir/constants.hpp"
#include "latdir/diophantine.hpp"

using namespace latdir;

namespace {

const LongVec2 kCubic{parse_real_ld("cbrt4"), parse_real_ld("cbrt2")};

/// Scan in 50-digit arithmetic (no rounding clamp).
double reference_scan(double kappa, std::int64_t radius) {
  using F = boost::multiprecision::cpp_bin_float_50;
  const F x1 = boost::multiprecision::cbrt(F(4)), x2 = boost::multiprecision::cbrt(F(2));
  F best = 1e300;
  for (std::int64_t r1 = -radius; r1 <= radius; ++r1) {
    for (std::int64_t r2 = -radius; r2 <= radius; ++r2) {
      const std::int64_t h = std::abs(r1) + std::abs(r2);
      if (h == 0 || h > radius) continue;
      const F x = r1 * x1 + r2 * x2;
      const F resid = abs(x - round(x));
      const F value = resid * pow(F(h), F(kappa));
      if (value < best) best = value;
    }
  }
  return best.convert_to<double>();
}

}  // namespace

TEST(Constants, ExtendedPrecision) {
  EXPECT_NEAR(static_cast<double>(kCubic.x), std::cbrt(4.0), 1e-15);
  EXPECT_NEAR(static_cast<double>(kCubic.y * kCubic.y * kCubic.y), 2.0, 1e-15);
  EXPECT_NEAR(parse_real("golden"), (1 + std::sqrt(5.0)) / 2, 1e-16);
  EXPECT_NEAR(parse_real("-sqrt2"), -std::sqrt(2.0), 1e-16);
  EXPECT_DOUBLE_EQ(parse_real("1/3"), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(parse_real("2.5e-1"), 0.25);
  EXPECT_THROW(parse_real("cbrt3"), InvalidInput);
  EXPECT_THROW(parse_real("1/0"), InvalidInput);
  EXPECT_THROW(parse_real(""), InvalidInput);
  EXPECT_EQ(parse_rational("-3/6"), Rational(-1, 2));
  EXPECT_FALSE(parse_rational("0.5"));
}

TEST(DiophScan, RationalRelationGivesZero) {
  const DiophReport r = dioph_scan(LongVec2{0.5L, 0.5L}, 3.0, 5);
  EXPECT_EQ(r.min_value, 0.0);
  EXPECT_EQ(r.argmin, (std::array<std::int64_t, 3>{1, 1, -1}));
  EXPECT_EQ(dioph_scan(LongVec2{0.5L, 0.5L}, 1.0, 2).argmin, (std::array<std::int64_t, 3>{1, 1, -1}));
  EXPECT_GT(dioph_scan(LongVec2{0.5L, 0.5L}, 1.0, 1).min_value, 0.0);
}

TEST(DiophScan, ZeroOnceRadiusReachesRelationHeight) {
  // 2 xi_1 + 3 xi_2 = 1 with xi_1 = sqrt2: height 5, not representable exactly.
  const long double s = parse_real_ld("sqrt2");
  const LongVec2 xi{s, (1.0L - 2.0L * s) / 3.0L};
  for (std::int64_t radius = 1; radius <= 8; ++radius) {
    const DiophReport r = dioph_scan(xi, 2.0, radius);
    if (radius >= 5) {
      EXPECT_EQ(r.min_value, 0.0) << radius;
    } else {
      EXPECT_GT(r.min_value, 1e-6) << radius;
    }
  }
}

TEST(DiophScan, MonotoneInRadiusAndKappa) {
  double prev = HUGE_VAL;
  for (std::int64_t radius : {1, 5, 25, 50, 100}) {
    const double v = dioph_scan(kCubic, 2.0, radius).min_value;
    EXPECT_LE(v, prev);
    prev = v;
  }
  for (std::int64_t radius : {10, 60}) {
    double below = -1.0;
    for (double kappa : {0.5, 1.0, 1.5, 2.0, 2.5}) {
      const double v = dioph_scan(kCubic, kappa, radius).min_value;
      EXPECT_GE(v, below);
      below = v;
    }
  }
}

TEST(DiophScan, MatchesHighPrecisionReference) {
  for (double kappa : {1.5, 2.0}) {
    for (std::int64_t radius : {10, 40}) {
      const double got = dioph_scan(kCubic, kappa, radius).min_value;
      EXPECT_NEAR(got, reference_scan(kappa, radius), 1e-12 * std::max(1.0, got));
    }
  }
}

TEST(DiophScan, CubicShiftTypeTwoFloorAndTypeBelowTwo) {
  double floor200 = dioph_scan(kCubic, 2.0, 200).min_value;
  EXPECT_GT(floor200, 0.1);
  EXPECT_GT(dioph_scan(kCubic, 2.0, 400).min_value, 0.5 * floor200);
  // Below type 2 the floor keeps dropping: nonincreasing, with a clear overall decrease.
  std::vector<double> sweep;
  for (std::int64_t radius : {25, 50, 100, 200}) sweep.push_back(dioph_scan(kCubic, 1.5, radius).min_value);
  EXPECT_TRUE(std::is_sorted(sweep.rbegin(), sweep.rend()));
  EXPECT_LT(sweep.back(), 0.5 * sweep.front());
}

TEST(DiophScan, ThreadCountDoesNotChangeReport) {
  const auto a = dioph_scan(kCubic, 2.0, 150, 1);
  const auto b = dioph_scan(kCubic, 2.0, 150, 4);
  EXPECT_EQ(a.min_value, b.min_value);
  EXPECT_EQ(a.argmin, b.argmin);
  EXPECT_THROW(dioph_scan(kCubic, 2.0, 0), InvalidInput);
}

TEST(SingularVector, Construction) {
  const Vec2 a = singular_vector({1, 0}, parse_real_ld("sqrt2"), {Rational(0), Rational(1, 2)});
  EXPECT_DOUBLE_EQ(a.x, std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(a.y, 0.5);
  EXPECT_THROW(singular_vector({1, 0}, 0.3L, {Rational(0), Rational(1)}), InvalidInput);
  const Vec2 b = singular_vector({2, 1}, parse_real_ld("golden"), {Rational(1, 3), Rational(0)});
  EXPECT_NEAR(b.x, 2 * 1.6180339887498949 + 1.0 / 3.0, 1e-15);
  EXPECT_THROW(singular_vector({0, 0}, 1.0L, {Rational(1, 2), Rational(1, 3)}), InvalidInput);
  // det = 2 * (1/2) - 0 = 1 is an integer.
  EXPECT_THROW(singular_vector({2, 0}, 1.0L, {Rational(0), Rational(1, 2)}), InvalidInput);
}

TEST(DivergenceProbe, LinearGrowthAlongRationalLine) {
  const auto p = rational_divergence_probe({Rational(1, 2), Rational(1, 2)}, {1, 1}, 0.5, {250, 500, 1000});
  EXPECT_DOUBLE_EQ(p.alpha_r, 0.875);
  ASSERT_EQ(p.counts.size(), 3u);
  EXPECT_GT(p.counts[0], 0u);
  EXPECT_NEAR(static_cast<double>(p.counts[1]) / p.counts[0], 2.0, 0.5);
  EXPECT_NEAR(static_cast<double>(p.counts[2]) / p.counts[0], 4.0, 1.0);
}

TEST(DivergenceProbe, EdgeCases) {
  // Nearest point of Z^2 + (1/2, 1/2) is at distance 1/sqrt2.
  const auto p = rational_divergence_probe({Rational(1, 2), Rational(1, 2)}, {1, 1}, 0.5, {0.5});
  EXPECT_EQ(p.counts.at(0), 0u);
  EXPECT_THROW(rational_divergence_probe({Rational(1, 2), Rational(1, 3)}, {1, 1}, 0.5, {10}), InvalidInput);
  EXPECT_THROW(rational_divergence_probe({Rational(1, 2), Rational(1, 2)}, {0, 0}, 0.5, {10}), InvalidInput);
  EXPECT_THROW(rational_divergence_probe({Rational(1, 2), Rational(1, 2)}, {1, 1}, 0.0, {10}), InvalidInput);
}
