#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fermispin {

/// Exact rational on 64-bit integers, always stored in lowest terms with
/// a positive denominator. Intermediate products go through 128-bit
/// arithmetic and overflow past 64 bits raises std::overflow_error.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n) : num(n), den(1) {}
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  std::string to_string() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }
};

namespace detail {

inline std::int64_t narrow128(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("Rational: 64-bit overflow");
  return static_cast<std::int64_t>(v);
}

inline Rational make128(__int128 num, __int128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 a = num < 0 ? -num : num;
  __int128 b = den;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  Rational r;
  r.num = narrow128(num);
  r.den = narrow128(den);
  return r;
}

}  // namespace detail

inline Rational operator+(const Rational& a, const Rational& b) {
  return detail::make128(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                         static_cast<__int128>(a.den) * b.den);
}

inline Rational operator-(const Rational& a, const Rational& b) {
  return detail::make128(static_cast<__int128>(a.num) * b.den - static_cast<__int128>(b.num) * a.den,
                         static_cast<__int128>(a.den) * b.den);
}

inline Rational operator-(const Rational& a) { return Rational(-a.num, a.den); }

inline Rational operator*(const Rational& a, const Rational& b) {
  return detail::make128(static_cast<__int128>(a.num) * b.num, static_cast<__int128>(a.den) * b.den);
}

inline Rational operator/(const Rational& a, const Rational& b) {
  if (b.num == 0) throw std::invalid_argument("Rational: division by zero");
  return detail::make128(static_cast<__int128>(a.num) * b.den, static_cast<__int128>(a.den) * b.num);
}

inline Rational& operator+=(Rational& a, const Rational& b) { return a = a + b; }
inline Rational& operator-=(Rational& a, const Rational& b) { return a = a - b; }
inline Rational& operator*=(Rational& a, const Rational& b) { return a = a * b; }

inline bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
inline bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
inline bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}
inline bool operator>(const Rational& a, const Rational& b) { return b < a; }
inline bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
inline bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

}  // namespace fermispin
