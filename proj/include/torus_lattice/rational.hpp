#pragma once

// Exact integer and rational helpers shared by every module.

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace torus {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using i128 = __int128;

/// Thrown when an exact computation cannot be carried out (limits, missing
/// exact data, uncertain float decisions).
struct ComputationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline BigInt num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline std::string to_string(const Rational& q) {
  if (den(q) == 1) return num(q).str();
  return num(q).str() + "/" + den(q).str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline long double to_long_double(const Rational& q) {
  return q.convert_to<long double>();
}

// floor(sqrt(n)) for n >= 0, exact.
inline std::int64_t isqrt(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("isqrt of negative value");
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && static_cast<i128>(r) * r > n) --r;
  while (static_cast<i128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline BigInt isqrt(const BigInt& n) {
  if (n < 0) throw std::invalid_argument("isqrt of negative value");
  return boost::multiprecision::sqrt(n);
}

inline bool is_square(std::int64_t n, std::int64_t* root = nullptr) {
  if (n < 0) return false;
  const auto r = isqrt(n);
  if (root) *root = r;
  return r * r == n;
}

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline BigInt floor(const Rational& q) { return floor_div(num(q), den(q)); }
inline BigInt ceil(const Rational& q) { return -floor_div(-num(q), den(q)); }

/// floor(sqrt(q)) for a nonnegative rational: start from isqrt(floor(q)) and
/// correct by exact comparison.
inline BigInt floor_sqrt(const Rational& q) {
  if (q < 0) throw std::invalid_argument("floor_sqrt of negative rational");
  BigInt r = isqrt(floor(q));
  while (r > 0 && Rational(r * r) > q) --r;
  while (Rational((r + 1) * (r + 1)) <= q) ++r;
  return r;
}

inline BigInt lcm(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  return boost::multiprecision::abs(a / boost::multiprecision::gcd(a, b) * b);
}

inline bool fits_int64(const BigInt& v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

inline std::int64_t to_int64(const BigInt& v) {
  if (!fits_int64(v)) throw ComputationError("integer exceeds 64-bit range: " + v.str());
  return v.convert_to<std::int64_t>();
}

/// Bit length of |v|.
inline unsigned bit_length(const BigInt& v) {
  if (v == 0) return 0;
  return static_cast<unsigned>(boost::multiprecision::msb(boost::multiprecision::abs(v))) + 1;
}

/// True when |v| < 2^limit.
inline bool fits_bits(const BigInt& v, unsigned limit) { return bit_length(v) <= limit; }

inline i128 to_i128(const BigInt& v) {
  if (!fits_bits(v, 126)) throw ComputationError("integer exceeds 126-bit range");
  const bool neg = v < 0;
  BigInt a = boost::multiprecision::abs(v);
  const BigInt lo_mask = (BigInt(1) << 64) - 1;
  const auto lo = static_cast<unsigned __int128>((a & lo_mask).convert_to<std::uint64_t>());
  const auto hi = static_cast<unsigned __int128>((a >> 64).convert_to<std::uint64_t>());
  const auto mag = static_cast<i128>((hi << 64) | lo);
  return neg ? -mag : mag;
}

namespace detail {

inline BigInt parse_integer(std::string_view s, std::string_view whole) {
  if (s.empty()) throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  std::size_t i = 0;
  if (s[0] == '+' || s[0] == '-') i = 1;
  if (i == s.size()) throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  for (std::size_t j = i; j < s.size(); ++j)
    if (s[j] < '0' || s[j] > '9')
      throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  BigInt v(std::string(s.substr(i)));
  return s[0] == '-' ? BigInt(-v) : v;
}

inline Rational parse_decimal(std::string_view s, std::string_view whole) {
  std::string_view mantissa = s;
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = s.substr(0, e);
    exponent = static_cast<long>(to_int64(parse_integer(s.substr(e + 1), whole)));
  }
  bool neg = false;
  if (!mantissa.empty() && (mantissa[0] == '+' || mantissa[0] == '-')) {
    neg = mantissa[0] == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  for (char c : mantissa) {
    if (c == '.') {
      if (seen_point) throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) ++frac_digits;
    } else {
      throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    }
  }
  if (digits.empty()) throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  if (std::labs(exponent) > 4000) throw std::invalid_argument("exponent out of range in '" + std::string(whole) + "'");
  Rational value{BigInt(digits)};
  const long shift = exponent - frac_digits;
  const BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(shift)));
  value = shift >= 0 ? value * Rational(scale) : value / Rational(scale);
  return neg ? Rational(-value) : value;
}

}  // namespace detail

/// Parses "p/q", integers and decimal literals ("0.1" is exactly 1/10,
/// "2.5e-3" is 1/400).
inline Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const BigInt p = detail::parse_integer(text.substr(0, slash), text);
    const BigInt q = detail::parse_integer(text.substr(slash + 1), text);
    if (q == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(p, q);
  }
  if (text.find_first_of(".eE") != std::string_view::npos) return detail::parse_decimal(text, text);
  return Rational(detail::parse_integer(text, text));
}

}  // namespace torus
