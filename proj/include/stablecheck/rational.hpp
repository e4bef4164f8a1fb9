#pragma once

// Exact rational arithmetic for market math, plus the fixed-point micro-unit
// conversions used at the timed-automaton variable boundary.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::int64_t kMicro = 1'000'000;

// Truncates toward zero, e.g. 1/3 -> 333333 micro, -1/3 -> -333333 micro.
inline std::int64_t to_micro(const Rational& r) {
    BigInt scaled = numerator(r) * kMicro / denominator(r);
    return scaled.convert_to<std::int64_t>();
}

inline Rational from_micro(std::int64_t v) { return Rational(v, kMicro); }

// Exact decimal literal -> rational ("1.35" -> 27/20). No exponent syntax.
Rational parse_decimal(std::string_view text);

// Exact fixed-point rendering with `digits` fractional places, rounding half
// away from zero ("1.35" for 27/20 at 2 digits). digits in [0, 18].
std::string format_decimal(const Rational& r, int digits);

// Micro-unit integer -> exact 6-digit decimal string.
inline std::string format_micro(std::int64_t v) { return format_decimal(from_micro(v), 6); }

}  // namespace stablecheck
