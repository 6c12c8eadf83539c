#pragma once

#include <cstdlib>
#include <numeric>
#include <string>

#include "blgeo/errors.hpp"

namespace blgeo {

/// Exact rational number with overflow-checked arithmetic. Always stored in
/// lowest terms with a positive denominator.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;

  Rational(long long numerator, long long denominator) {
    if (denominator == 0) throw Error("rational with zero denominator");
    if (denominator < 0) {
      numerator = checked_neg(numerator);
      denominator = checked_neg(denominator);
    }
    const long long g = std::gcd(numerator, denominator);
    num = (g == 0) ? 0 : numerator / g;
    den = (g == 0) ? 1 : denominator / g;
  }

  [[nodiscard]] double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  [[nodiscard]] std::string str() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    // a.num/a.den + b.num/b.den over the lcm denominator.
    const long long g = std::gcd(a.den, b.den);
    const long long lhs = checked_mul(a.num, b.den / g);
    const long long rhs = checked_mul(b.num, a.den / g);
    return Rational(checked_add(lhs, rhs), checked_mul(a.den, b.den / g));
  }

  friend Rational operator*(const Rational& a, const Rational& b) {
    // Cross-cancel before multiplying to delay overflow.
    const long long g1 = std::gcd(std::abs(a.num), b.den);
    const long long g2 = std::gcd(std::abs(b.num), a.den);
    const long long n1 = (g1 == 0) ? a.num : a.num / g1;
    const long long n2 = (g2 == 0) ? b.num : b.num / g2;
    const long long d1 = (g2 == 0) ? a.den : a.den / g2;
    const long long d2 = (g1 == 0) ? b.den : b.den / g1;
    return Rational(checked_mul(n1, n2), checked_mul(d1, d2));
  }

  static long long checked_add(long long a, long long b) {
    long long out = 0;
    if (__builtin_add_overflow(a, b, &out))
      throw Error("rational arithmetic overflow in addition");
    return out;
  }

  static long long checked_mul(long long a, long long b) {
    long long out = 0;
    if (__builtin_mul_overflow(a, b, &out))
      throw Error("rational arithmetic overflow in multiplication");
    return out;
  }

  static long long checked_neg(long long a) {
    long long out = 0;
    if (__builtin_sub_overflow(0LL, a, &out))
      throw Error("rational arithmetic overflow in negation");
    return out;
  }
};

/// Least common multiple with overflow checking. Arguments must be positive.
[[nodiscard]] inline long long checked_lcm(long long a, long long b) {
  const long long g = std::gcd(a, b);
  return Rational::checked_mul(a / g, b);
}

}  // namespace blgeo
