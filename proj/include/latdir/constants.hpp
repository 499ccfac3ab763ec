#pragma once

// Real and rational literals for user input: decimals, fractions p/q and the
// named constants cbrt2, cbrt4, sqrt2, golden (with an optional sign), the
// latter evaluated with 50 significant digits and rounded once.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/rational.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "latdir/errors.hpp"

namespace latdir {

using Rational = boost::rational<std::int64_t>;

namespace detail {

using Float50 = boost::multiprecision::cpp_bin_float_50;

inline std::optional<Float50> named_constant(std::string_view name) {
  if (name == "cbrt2") return boost::multiprecision::cbrt(Float50(2));
  if (name == "cbrt4") return boost::multiprecision::cbrt(Float50(4));
  if (name == "sqrt2") return boost::multiprecision::sqrt(Float50(2));
  if (name == "golden") return (1 + boost::multiprecision::sqrt(Float50(5))) / 2;
  return std::nullopt;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

}  // namespace detail

/// Parse "p/q" or an integer exactly; nullopt for anything else.
inline std::optional<Rational> parse_rational(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) {
    const auto n = detail::parse_int(s);
    if (!n) return std::nullopt;
    return Rational(*n);
  }
  const auto p = detail::parse_int(s.substr(0, slash));
  const auto q = detail::parse_int(s.substr(slash + 1));
  if (!p || !q || *q == 0) return std::nullopt;
  return Rational(*p, *q);
}

inline long double to_long_double(const Rational& r) {
  return static_cast<long double>(r.numerator()) / static_cast<long double>(r.denominator());
}

/// Parse a real literal in extended precision.
inline long double parse_real_ld(std::string_view s) {
  if (s.empty()) throw InvalidInput("empty number");
  bool neg = false;
  std::string_view body = s;
  if (body.front() == '-' || body.front() == '+') {
    neg = body.front() == '-';
    body.remove_prefix(1);
  }
  if (const auto c = detail::named_constant(body)) {
    const auto v = c->convert_to<long double>();
    return neg ? -v : v;
  }
  if (const auto r = parse_rational(s)) return to_long_double(*r);
  try {
    std::size_t used = 0;
    const std::string str(s);
    const long double v = std::stold(str, &used);
    if (used != str.size() || !std::isfinite(v)) throw InvalidInput("not a number: " + str);
    return v;
  } catch (const std::logic_error&) {
    throw InvalidInput("not a number: " + std::string(s));
  }
}

inline double parse_real(std::string_view s) { return static_cast<double>(parse_real_ld(s)); }

}  // namespace latdir
