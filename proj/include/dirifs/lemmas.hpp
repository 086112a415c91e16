// SPDX-License-Identifier: Apache-2.0
#pragma once

// Exact, zero-tolerance checks of the divisibility and length identities the
// construction relies on. Each check reports the first offending row.

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "dirifs/verification.hpp"

namespace dirifs {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::uint64_t cases = 0;
  std::string counterexample;  // empty when passed
};

namespace detail {

inline std::string row_tag(int j, int k) { return "j=" + std::to_string(j) + ",k=" + std::to_string(k); }

inline void fail(CheckResult& r, const std::string& what) {
  if (r.passed) r.counterexample = what;
  r.passed = false;
}

}  // namespace detail

/// q = S P with S an integer dividing s s1 s2 (reciprocal rates); otherwise q | P s s1 s2.
inline CheckResult check_roc(const Construction& c) {
  CheckResult r{"roc"};
  const Integer bound = c.S();
  for (const auto& row : c.rows()) {
    ++r.cases;
    if (row.q() != row.S * Rational(row.P)) detail::fail(r, detail::row_tag(row.j, row.k) + ": q != S P");
    const bool ok = c.ifs().reciprocal_rates() ? (row.S.is_integer() && divides(row.S.num(), bound))
                                               : divides(row.q(), row.P * bound);
    if (!ok) detail::fail(r, detail::row_tag(row.j, row.k) + ": S = " + row.S.str());
  }
  return r;
}

/// P_{1,k} | P_{2,k} | ... | P_{m,k} | P_{1,k+1}.
inline CheckResult check_ap_chain(const Construction& c) {
  CheckResult r{"ap_chain"};
  for (int k = 0; k <= c.kmax(); ++k) {
    for (int j = 1; j <= c.m(); ++j) {
      const bool last = j == c.m();
      if (last && k == c.kmax()) continue;
      ++r.cases;
      const Integer& next = last ? c.P(1, k + 1) : c.P(j + 1, k);
      if (!divides(c.P(j, k), next)) detail::fail(r, detail::row_tag(j, k));
    }
  }
  return r;
}

/// |t| = f_k + g_{j,k} with matching letter counts, and |v| = |t| + N.
inline CheckResult check_ab1(const Construction& c) {
  CheckResult r{"ab1"};
  const auto& s = c.schedule();
  for (const auto& row : c.rows()) {
    ++r.cases;
    const auto fk = static_cast<std::uint64_t>(s.f(row.k));
    const auto gk = static_cast<std::uint64_t>(s.g(row.j, row.k));
    const bool ok = row.t.size() == fk + gk && row.t.count(Letter::F) == fk && row.t.count(Letter::G) == gk &&
                    row.v.size() == row.t.size() + static_cast<std::uint64_t>(c.N());
    if (!ok) detail::fail(r, detail::row_tag(row.j, row.k));
  }
  return r;
}

namespace detail {

inline Integer letter_power(const Construction& c, const ApproximantRow& row) {
  return ipow(c.ifs().b1(), row.t.count(Letter::F)) * ipow(c.ifs().b2(), row.t.count(Letter::G));
}

}  // namespace detail

/// b1^h1 b2^h2 | q, with h1, h2 the letter counts of t.
inline CheckResult check_wicht(const Construction& c) {
  CheckResult r{"wicht"};
  for (const auto& row : c.rows()) {
    ++r.cases;
    if (!divides(detail::letter_power(c, row), row.q())) {
      detail::fail(r, detail::row_tag(row.j, row.k) + ": b1^h1 b2^h2 does not divide q = " + row.q().get_str());
    }
  }
  return r;
}

/// The strengthened form s b1^h1 b2^h2 | q. Primes of s outside b1 b2 may cancel, so this can fail.
inline CheckResult check_wicht_remark(const Construction& c) {
  CheckResult r{"wicht_remark"};
  const Integer& s = c.r_over_s().den();
  for (const auto& row : c.rows()) {
    ++r.cases;
    if (!divides(s * detail::letter_power(c, row), row.q())) {
      detail::fail(r, detail::row_tag(row.j, row.k) + ": s = " + s.get_str() + ", b1^h1 b2^h2 = " +
                          detail::letter_power(c, row).get_str() + ", q = " + row.q().get_str());
    }
  }
  return r;
}

/// |g^inf(0) - f^N g^inf(0)|.
inline Rational jo_constant(const IfsPair& ifs, long N) {
  const Rational sigma = ifs.g().fixed_point();
  const Rational nu = ifs.f().iterate(sigma, static_cast<std::uint64_t>(N));
  return abs(sigma - nu);
}

/// Consecutive approximants differ by exactly the contraction along v_{j,k+1} times the constant.
inline CheckResult check_jo_exact(const Construction& c) {
  CheckResult r{"jo_exact"};
  const Rational constant = jo_constant(c.ifs(), c.N());
  const auto& s = c.schedule();
  for (int k = 0; k < c.kmax(); ++k) {
    for (int j = 1; j <= c.m(); ++j) {
      ++r.cases;
      const Rational diff = abs(c.row(j, k).value - c.row(j, k + 1).value);
      Rational scaled;
      if (c.ifs().reciprocal_rates()) {
        scaled = diff * Rational(ipow(c.ifs().b1(), static_cast<std::uint64_t>(s.f(k + 1))) *
                                 ipow(c.ifs().b2(), static_cast<std::uint64_t>(s.g(j, k + 1) + c.N())));
      } else {
        scaled = diff / contraction_product(c.row(j, k + 1).v, c.ifs());
      }
      if (scaled != constant) detail::fail(r, detail::row_tag(j, k) + ": " + scaled.str() + " != " + constant.str());
    }
  }
  return r;
}

inline CheckResult check_intrinsic(const Construction& c) {
  CheckResult r{"intrinsic"};
  for (const auto& row : c.rows()) {
    ++r.cases;
    if (!intrinsic_check(row, c.schedule(), c.ifs())) detail::fail(r, detail::row_tag(row.j, row.k));
  }
  return r;
}

/// The floor definitions of g_{j,k}: b2^g <= X < b2^{g+1} (without omega, m >= 3).
inline CheckResult check_ufoa_band(const Construction& c) {
  CheckResult r{"ufoa_band"};
  const auto& p = c.params();
  if (p.omega || p.m < 3) return r;
  const auto& s = c.schedule();
  const Rational b2(c.ifs().b2());
  for (int k = 1; k <= c.kmax(); ++k) {
    const std::int64_t fk = s.f(k);
    const std::int64_t g1 = s.g(1, k);
    for (int j = 2; j <= p.m; ++j) {
      ++r.cases;
      Rational X = detail::b1b2(c.ifs(), (j - 1) * fk, j * g1);
      if (j == p.m) X *= rpow(p.c, j);
      const Rational lo = rpow(b2, s.g(j, k));
      if (!(lo <= X && X < lo * b2)) detail::fail(r, detail::row_tag(j, k));
    }
  }
  return r;
}

/// (b1 b2)^ell | s at the chosen N, and b1^ell b2^ell | rad(b1 b2)^{2 ell maxmult}.
inline CheckResult check_lemur(const Construction& c) {
  CheckResult r{"lemur", true, 2};
  const Integer bb = c.ifs().b1() * c.ifs().b2();
  const auto ell = static_cast<std::uint64_t>(c.ell());
  if (!divides(ipow(bb, ell), c.r_over_s().den())) detail::fail(r, "(b1 b2)^ell does not divide s");
  const auto mult = static_cast<std::uint64_t>(max_multiplicity(bb));
  if (!divides(ipow(bb, ell), ipow(radical(bb), 2 * ell * mult))) detail::fail(r, "radical power bound");
  return r;
}

/// Random words: den(word(u/v)) | b1^h1 b2^h2 s1 s2 v, and symbolic_form agrees with apply_word.
inline CheckResult check_ppp(const IfsPair& ifs, std::mt19937_64& rng, int cases, int max_len = 24) {
  CheckResult r{"ppp"};
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> bit(0, 1);
  std::uniform_int_distribution<long> num(-50, 50);
  std::uniform_int_distribution<long> den(1, 60);
  for (int i = 0; i < cases; ++i) {
    Word w;
    const int n = len(rng);
    for (int t = 0; t < n; ++t) w.append(bit(rng) ? Letter::F : Letter::G);
    const Rational x(num(rng), den(rng));
    const Rational y = apply_word(w, x, ifs);
    ++r.cases;
    const Integer bound = ipow(ifs.b1(), w.count(Letter::F)) * ipow(ifs.b2(), w.count(Letter::G)) * ifs.s1() *
                          ifs.s2() * x.den();
    if (!divides(y.den(), bound)) detail::fail(r, w.str() + " at " + x.str());
    if (symbolic_form(w, ifs)(x) != y) detail::fail(r, "symbolic form differs on " + w.str());
  }
  return r;
}

/// For F(x) = x/b + r/s and u/v not fixed: b^t | den(F^{2t}(u/v)) whenever t > max_{p | b} z_p.
inline CheckResult check_pro(const AffineMap& F, std::mt19937_64& rng, int cases, int tmax = 6) {
  CheckResult r{"pro"};
  if (F.contraction_num() != 1) throw InvalidArgument("Pro applies to reciprocal contractions");
  const Integer& b = F.contraction_den();
  const Integer& rr = F.shift().num();
  const Integer& s = F.shift().den();
  std::uniform_int_distribution<long> num(-40, 40);
  std::uniform_int_distribution<long> den(1, 40);
  for (int i = 0; i < cases; ++i) {
    const Rational x(num(rng), den(rng));
    if (x == F.fixed_point()) continue;
    const Integer z0 = x.num() * s * (b - 1) - rr * b * x.den();
    long zmax = 0;
    for (const Integer& p : prime_divisors(b)) zmax = std::max(zmax, multiplicity(p, z0));
    for (long t = zmax + 1; t <= tmax; ++t) {
      ++r.cases;
      const Rational y = F.iterate(x, static_cast<std::uint64_t>(2 * t));
      if (!divides(ipow(b, static_cast<std::uint64_t>(t)), y.den())) {
        detail::fail(r, "t=" + std::to_string(t) + " at " + x.str());
      }
    }
  }
  return r;
}

/// The exact checks reported by `verify`.
inline std::vector<CheckResult> exact_checks(const Construction& c) {
  return {check_roc(c),      check_ap_chain(c), check_wicht(c), check_wicht_remark(c), check_ab1(c),
          check_jo_exact(c), check_intrinsic(c), check_lemur(c), check_ufoa_band(c)};
}

}  // namespace dirifs
