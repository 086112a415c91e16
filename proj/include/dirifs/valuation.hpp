// SPDX-License-Identifier: Apache-2.0
#pragma once

// p-adic valuations, radicals and small-integer factorization. The primes
// that reach these routines come from factoring the IFS denominators, so
// trial division is sufficient.

#include <compare>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirifs/rational.hpp"

namespace dirifs {

/// A finite valuation or INFINITY (the valuation of zero).
class Valuation {
 public:
  static Valuation finite(long v) { return Valuation(v); }
  static Valuation infinity() { return Valuation(); }

  bool is_infinite() const { return !value_.has_value(); }
  long value() const {
    if (!value_) throw InvalidArgument("valuation is infinite");
    return *value_;
  }

  friend bool operator==(const Valuation&, const Valuation&) = default;
  friend std::strong_ordering operator<=>(const Valuation& a, const Valuation& b) {
    if (a.is_infinite() || b.is_infinite()) {
      return static_cast<int>(a.is_infinite()) <=> static_cast<int>(b.is_infinite());
    }
    return *a.value_ <=> *b.value_;
  }

  std::string str() const { return value_ ? std::to_string(*value_) : "INFINITY"; }

 private:
  Valuation() = default;
  explicit Valuation(long v) : value_(v) {}
  std::optional<long> value_;
};

inline Valuation min(const Valuation& a, const Valuation& b) { return b < a ? b : a; }

/// Deterministic trial division.
inline bool is_prime(const Integer& n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (mpz_even_p(n.get_mpz_t())) return false;
  for (Integer d = 3; d * d <= n; d += 2) {
    if (divides(d, n)) return false;
  }
  return true;
}

/// Multiplicity of p in the nonzero integer n, for p >= 2.
inline long multiplicity(const Integer& p, const Integer& n) {
  Integer rest;
  return static_cast<long>(mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

inline Valuation vp(const Integer& p, const Rational& x) {
  if (!is_prime(p)) throw InvalidPrime("not a prime: " + p.get_str());
  if (x.is_zero()) return Valuation::infinity();
  return Valuation::finite(multiplicity(p, x.num()) - multiplicity(p, x.den()));
}

/// Prime factorization of n >= 1 as (prime, multiplicity) pairs, ascending.
inline std::vector<std::pair<Integer, long>> factorize(const Integer& n) {
  if (n < 1) throw InvalidArgument("factorize expects a positive integer");
  std::vector<std::pair<Integer, long>> out;
  Integer rest = n;
  for (Integer d = 2; d * d <= rest; d += (d == 2 ? 1 : 2)) {
    if (divides(d, rest)) {
      long e = 0;
      while (divides(d, rest)) {
        rest /= d;
        ++e;
      }
      out.emplace_back(d, e);
    }
  }
  if (rest > 1) out.emplace_back(rest, 1);
  return out;
}

inline std::vector<Integer> prime_divisors(const Integer& n) {
  std::vector<Integer> out;
  for (auto& [p, e] : factorize(n)) out.push_back(p);
  return out;
}

/// Product of the distinct primes dividing n; radical(1) = 1.
inline Integer radical(const Integer& n) {
  if (n <= 0) throw InvalidArgument("radical expects a positive integer");
  Integer r = 1;
  for (auto& [p, e] : factorize(n)) r *= p;
  return r;
}

/// Largest prime multiplicity in n (0 for n = 1).
inline long max_multiplicity(const Integer& n) {
  long best = 0;
  for (auto& [p, e] : factorize(n)) best = std::max(best, e);
  return best;
}

/// vp(e1 + e2), the quantity constrained by the min rule.
inline Valuation vp_sum_rule(const Integer& p, const Rational& e1, const Rational& e2) {
  return vp(p, e1 + e2);
}

/// What the min rule predicts for vp(e1 + e2): defined only when the valuations differ.
inline std::optional<Valuation> min_rule_prediction(const Integer& p, const Rational& e1,
                                                    const Rational& e2) {
  Valuation a = vp(p, e1);
  Valuation b = vp(p, e2);
  if (a == b) return std::nullopt;
  return min(a, b);
}

}  // namespace dirifs
