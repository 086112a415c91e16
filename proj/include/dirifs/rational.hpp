// SPDX-License-Identifier: Apache-2.0
#pragma once

// Exact rational scalar used everywhere in the library, plus the handful of
// integer helpers (powers, floors, integer logarithms and roots) that keep
// every schedule and every reported bound free of floating point.

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>

#include "dirifs/errors.hpp"

namespace dirifs {

using Integer = mpz_class;

/// Reduced fraction with positive denominator. Every constructor reduces.
class Rational {
 public:
  Rational() = default;
  Rational(long n) : v_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(int n) : v_(static_cast<long>(n)) {}  // NOLINT
  Rational(const Integer& n) : v_(n) {}  // NOLINT
  Rational(const Integer& num, const Integer& den) {
    if (den == 0) throw InvalidArgument("zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }
  Rational(long num, long den) : Rational(Integer(num), Integer(den)) {}

  static Rational from_mpq(mpq_class q) {
    Rational r;
    r.v_ = std::move(q);
    r.v_.canonicalize();
    return r;
  }

  /// Parses "n" or "n/d".
  static Rational parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(Integer(s));
    return Rational(Integer(s.substr(0, slash)), Integer(s.substr(slash + 1)));
  }

  const Integer& num() const { return v_.get_num(); }
  const Integer& den() const { return v_.get_den(); }
  const mpq_class& mpq() const { return v_; }

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return den() == 1; }
  int sign() const { return sgn(v_); }

  Rational operator-() const { return from_mpq(-v_); }
  friend Rational operator+(const Rational& a, const Rational& b) { return from_mpq(a.v_ + b.v_); }
  friend Rational operator-(const Rational& a, const Rational& b) { return from_mpq(a.v_ - b.v_); }
  friend Rational operator*(const Rational& a, const Rational& b) { return from_mpq(a.v_ * b.v_); }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw InvalidArgument("division by zero");
    return from_mpq(a.v_ / b.v_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.v_, b.v_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  /// "n" for integers, "n/d" otherwise.
  std::string str() const {
    if (is_integer()) return num().get_str();
    return num().get_str() + "/" + den().get_str();
  }

  double to_double() const { return v_.get_d(); }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class v_;
};

inline Rational abs(const Rational& x) { return x.sign() < 0 ? -x : x; }

inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

inline Integer ipow(const Integer& base, std::uint64_t e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Integer ipow(long base, std::uint64_t e) { return ipow(Integer(base), e); }

/// x^e for any integer e; x must be nonzero when e < 0.
inline Rational rpow(const Rational& x, long e) {
  if (e >= 0) return Rational(ipow(x.num(), static_cast<std::uint64_t>(e)),
                              ipow(x.den(), static_cast<std::uint64_t>(e)));
  if (x.is_zero()) throw InvalidArgument("zero to a negative power");
  auto n = static_cast<std::uint64_t>(-e);
  return Rational(ipow(x.den(), n), ipow(x.num(), n));
}

inline Integer floor(const Rational& x) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), x.num().get_mpz_t(), x.den().get_mpz_t());
  return r;
}

inline Integer ceil(const Rational& x) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), x.num().get_mpz_t(), x.den().get_mpz_t());
  return r;
}

inline bool divides(const Integer& d, const Integer& n) {
  if (d == 0) return n == 0;
  return mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t()) != 0;
}

inline Integer gcd(const Integer& a, const Integer& b) {
  Integer r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Integer lcm(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

/// Natural log of a positive integer, accurate to double precision for any size.
inline double log_integer(const Integer& n) {
  if (n <= 0) throw InvalidArgument("log of a non-positive integer");
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, n.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

inline double log_rational(const Rational& x) {
  if (x.sign() <= 0) throw InvalidArgument("log of a non-positive rational");
  return log_integer(x.num()) - log_integer(x.den());
}

/// Largest e with base^e <= x, for integer base >= 2 and rational x > 0.
inline long floor_log(const Integer& base, const Rational& x) {
  if (base < 2) throw InvalidArgument("floor_log base must be >= 2");
  if (x.sign() <= 0) throw InvalidArgument("floor_log of a non-positive value");
  // Estimate from bit lengths, then correct by exact comparisons.
  double est = log_rational(x) / log_integer(base);
  long e = static_cast<long>(std::floor(est));
  auto le = [&](long k) { return rpow(Rational(base), k) <= x; };
  while (!le(e)) --e;
  while (le(e + 1)) ++e;
  return e;
}

/// Floor of the m-th root of a non-negative integer.
inline Integer iroot(const Integer& n, unsigned long m) {
  if (n < 0) throw InvalidArgument("root of a negative integer");
  Integer r;
  mpz_root(r.get_mpz_t(), n.get_mpz_t(), m);
  return r;
}

/// Certified bracket [lo, hi] of n^(1/m), with relative resolution 2^-extra_bits.
inline std::pair<Rational, Rational> root_bracket(const Integer& n, unsigned long m,
                                                  unsigned long extra_bits = 64) {
  Integer scale = ipow(Integer(2), extra_bits);
  Integer scaled = n * ipow(scale, m);
  Integer r = iroot(scaled, m);
  Integer lo = r;
  Integer hi = (ipow(r, m) == scaled) ? r : r + 1;
  return {Rational(lo, scale), Rational(hi, scale)};
}

/// Rational lower bound of a double, rounded down to a multiple of 1/scale.
inline Rational rational_floor(double x, long scale = 1000000) {
  return Rational(Integer(static_cast<long>(std::floor(x * static_cast<double>(scale)))),
                  Integer(scale));
}

inline Rational rational_ceil(double x, long scale = 1000000) {
  return Rational(Integer(static_cast<long>(std::ceil(x * static_cast<double>(scale)))),
                  Integer(scale));
}

}  // namespace dirifs
