#pragma once

// Exact fixed-point helpers. Money amounts are carried as integers in units
// of 1/scale so that every budget comparison is exact.

#include <cctype>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "bealloc/error.hpp"

namespace bealloc {

using Scaled = std::int64_t;

inline Scaled checked_add(Scaled a, Scaled b) {
  Scaled r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "integer overflow in exact arithmetic");
  return r;
}

inline Scaled checked_mul(Scaled a, Scaled b) {
  Scaled r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "integer overflow in exact arithmetic");
  return r;
}

inline bool is_power_of_ten(Scaled v) {
  if (v < 1) return false;
  while (v % 10 == 0) v /= 10;
  return v == 1;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Parses a plain decimal ("12", "-0.25", "+3.") into value*scale. Throws
/// ParseError when the text is not a decimal or is not a whole number of
/// 1/scale units.
inline Scaled parse_scaled(std::string_view text, Scaled scale) {
  if (scale < 1) throw Error(ErrorCode::InvalidInput, "scale must be a positive integer");
  const std::string_view s = trim(text);
  std::size_t pos = 0;
  bool negative = false;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) negative = s[pos++] == '-';

  __int128 numerator = 0;
  __int128 denominator = 1;
  bool any_digit = false;
  bool seen_point = false;
  constexpr __int128 limit = static_cast<__int128>(1) << 100;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (c == '.' && !seen_point) {
      seen_point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw Error(ErrorCode::ParseError, "not a decimal number: '" + std::string(s) + "'");
    any_digit = true;
    numerator = numerator * 10 + (c - '0');
    if (seen_point) denominator *= 10;
    if (numerator > limit || denominator > limit)
      throw Error(ErrorCode::ParseError, "too many digits: '" + std::string(s) + "'");
  }
  if (!any_digit) throw Error(ErrorCode::ParseError, "not a decimal number: '" + std::string(s) + "'");

  const __int128 product = numerator * scale;
  if (product % denominator != 0)
    throw Error(ErrorCode::ParseError,
                "'" + std::string(s) + "' is not a multiple of 1/" + std::to_string(scale));
  const __int128 value = product / denominator;
  if (value > INT64_MAX) throw Error(ErrorCode::Overflow, "value out of range: '" + std::string(s) + "'");
  return negative ? -static_cast<Scaled>(value) : static_cast<Scaled>(value);
}

/// Renders value/scale exactly: a decimal when scale is a power of ten,
/// otherwise a reduced "num/den" fraction.
inline std::string format_scaled(Scaled value, Scaled scale) {
  if (is_power_of_ten(scale)) {
    const bool negative = value < 0;
    const unsigned long long magnitude =
        negative ? 0ULL - static_cast<unsigned long long>(value) : static_cast<unsigned long long>(value);
    const auto uscale = static_cast<unsigned long long>(scale);
    std::string out = std::to_string(magnitude / uscale);
    unsigned long long frac = magnitude % uscale;
    if (frac != 0) {
      std::string digits;
      for (unsigned long long d = uscale / 10; d > 0; d /= 10) {
        digits.push_back(static_cast<char>('0' + frac / d));
        frac %= d;
      }
      while (!digits.empty() && digits.back() == '0') digits.pop_back();
      out += "." + digits;
    }
    return negative ? "-" + out : out;
  }
  const Scaled g = std::gcd(value, scale);
  const Scaled num = value / g;
  const Scaled den = scale / g;
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

}  // namespace bealloc
