// SPDX-License-Identifier: Apache-2.0
#pragma once

// Certified estimators on constructed vectors. Every distance reported here is
// a rational bracket that provably contains the true value; floating point
// only enters the advisory slope fit and the exponent estimates, and both are
// rounded outward before being turned back into rationals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dirifs/construction.hpp"
#include "dirifs/scan.hpp"

namespace dirifs {

struct DistBracket {
  Rational lo;
  Rational hi;
};

namespace detail {

inline Rational frac_dist(const Rational& x) {
  Rational f = x - Rational(floor(x));
  return min(f, Rational(1) - f);
}

inline std::uint64_t small_or_zero(const Integer& q) { return q.fits_ulong_p() ? q.get_ui() : 0; }

}  // namespace detail

/// Bracket of ||q x|| for x in the enclosure; requires q * width < 1/4.
inline DistBracket dist_to_integer(const Integer& q, const Enclosure& e) {
  if (q < 1) throw InvalidArgument("q must be >= 1");
  Rational a = Rational(q) * e.lo();
  Rational b = Rational(q) * e.hi();
  if (b - a >= Rational(1, 4)) throw TooWide(detail::small_or_zero(q), "q * enclosure width >= 1/4");
  const Rational n(floor(a));
  a -= n;
  b -= n;
  const Rational half(1, 2);
  // On [a, b] the distance is a tent with zeros at 0 and 1 and its peak at 1/2.
  DistBracket out;
  out.lo = (a.is_zero() || b >= Rational(1)) ? Rational(0) : min(detail::frac_dist(a), detail::frac_dist(b));
  out.hi = (a <= half && half <= b) ? half : max(detail::frac_dist(a), detail::frac_dist(b));
  return out;
}

/// Bracket of max_j ||q xi_j||.
inline DistBracket dist_to_integers(const Integer& q, const std::vector<Enclosure>& encs) {
  if (encs.empty()) throw InvalidArgument("need at least one coordinate");
  DistBracket out{Rational(0), Rational(0)};
  for (const auto& e : encs) {
    DistBracket d = dist_to_integer(q, e);
    out.lo = max(out.lo, d.lo);
    out.hi = max(out.hi, d.hi);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Upper bound: witnesses S P_k and S P_k* on [S P_k, S P_{k+1}).

struct UpperSample {
  Integer Q;
  int case_id = 1;  // 1: Q < S P_k*, witness S P_k; 2: witness S P_k*
  Integer q;
  DistBracket dist;
  Rational theta_lo;  // ||q xi|| Q^{1/m}
  Rational theta_hi;
};

struct UpperBoundReport {
  int k = 0;
  std::vector<UpperSample> samples;
  bool case1_integrality = true;
  bool case2_integrality = true;
  Rational ratio_max_lo;  // max over samples of theta / c
  Rational ratio_max_hi;
};

/// Geometric samples S P_k r^i (r = floor((P_{k+1}/P_k)^{1/n})) plus the critical points
/// S P_k* - 1, S P_k* and S P_{k+1} - 1.
inline std::vector<Integer> upper_bound_grid(const Construction& c, int k, int n) {
  if (k < 1 || k + 1 > c.kmax()) throw NeedMoreDepth(k + 1, "upper bound needs rows through k+1");
  if (n < 1) throw InvalidArgument("need at least one sample");
  const Integer S = c.S();
  const Integer lo = S * c.P(1, k);
  const Integer hi = S * c.P(1, k + 1);
  const Integer r = std::max(Integer(2), iroot(c.P(1, k + 1) / c.P(1, k), static_cast<unsigned long>(n)));
  std::vector<Integer> grid;
  Integer Q = lo;
  for (int i = 0; i < n && Q < hi; ++i, Q *= r) grid.push_back(Q);
  for (const Integer& extra : {Integer(S * c.P(c.m(), k) - 1), Integer(S * c.P(c.m(), k)), Integer(hi - 1)}) {
    if (extra >= lo && extra < hi) grid.push_back(extra);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

inline UpperBoundReport upper_bound_check(const Construction& c, int k, const std::vector<Integer>& Qs) {
  if (k < 1 || k + 1 > c.kmax()) throw NeedMoreDepth(k + 1, "upper bound needs rows through k+1");
  const int m = c.m();
  const Integer S = c.S();
  const Integer q1 = S * c.P(1, k);
  const Integer q2 = S * c.P(m, k);
  UpperBoundReport rep;
  rep.k = k;

  auto integral = [](const Integer& q, const ApproximantRow& row) { return divides(row.q(), q * row.p()); };
  for (int j = 2; j <= m; ++j) rep.case1_integrality = rep.case1_integrality && integral(q1, c.row(j, k - 1));
  rep.case1_integrality = rep.case1_integrality && integral(q1, c.row(1, k));
  for (int j = 1; j <= m; ++j) rep.case2_integrality = rep.case2_integrality && integral(q2, c.row(j, k));

  const DistBracket d1 = dist_to_integers(q1, c.xi_enclosures());
  const DistBracket d2 = dist_to_integers(q2, c.xi_enclosures());
  const Rational inv_c = Rational(1) / c.params().c;
  bool first = true;
  for (const Integer& Q : Qs) {
    if (Q < q1 || Q >= S * c.P(1, k + 1)) throw InvalidArgument("sample Q outside [S P_k, S P_{k+1})");
    UpperSample s;
    s.Q = Q;
    s.case_id = Q < q2 ? 1 : 2;
    s.q = s.case_id == 1 ? q1 : q2;
    s.dist = s.case_id == 1 ? d1 : d2;
    auto [rlo, rhi] = root_bracket(Q, static_cast<unsigned long>(m));
    s.theta_lo = s.dist.lo * rlo;
    s.theta_hi = s.dist.hi * rhi;
    Rational lo = s.theta_lo * inv_c;
    Rational hi = s.theta_hi * inv_c;
    if (first || lo > rep.ratio_max_lo) rep.ratio_max_lo = lo;
    if (first || hi > rep.ratio_max_hi) rep.ratio_max_hi = hi;
    first = false;
    rep.samples.push_back(std::move(s));
  }
  return rep;
}

inline UpperBoundReport upper_bound_check(const Construction& c, int k, int samples = 20) {
  return upper_bound_check(c, k, upper_bound_grid(c, k, samples));
}

// ---------------------------------------------------------------------------
// Lower bound: full scan below P_k* plus the exact structural step.

struct LowerBoundReport {
  int k = 0;
  Integer P_k;
  std::uint64_t Q = 0;  // P_k* - 1
  ScanResult scan;
  Rational c_prime_lo;  // scan.dist_lo * P_k
  bool structural_ok = true;
  std::uint64_t structural_checked = 0;
  std::optional<std::uint64_t> first_failure;
};

namespace detail {

/// For q < P_{m,k}: h = max{h : P_{h,k} | q} and ||q p_{h+1,k}/q_{h+1,k}|| >= P_{h,k} / (S P_{h+1,k}).
inline bool structural_step_holds(const Construction& c, int k, const Integer& q, const Integer& S) {
  const int m = c.m();
  int h = 0;
  while (h < m && divides(c.P(h + 1, k), q)) ++h;
  if (h >= m) return false;
  const ApproximantRow& row = c.row(h + 1, k);
  Integer r;
  Integer prod = q * row.p();
  mpz_fdiv_r(r.get_mpz_t(), prod.get_mpz_t(), row.q().get_mpz_t());
  const Integer d = std::min(r, Integer(row.q() - r));
  return d * S * c.P(h + 1, k) >= c.P(h, k) * row.q();
}

}  // namespace detail

inline LowerBoundReport lower_bound_scan(const Construction& c, int k, const ScanOptions& opt = {}) {
  if (k < 1 || k + 1 > c.kmax()) throw NeedMoreDepth(k + 1, "lower bound scan needs rows through k+1");
  const Integer top = c.P(c.m(), k) - 1;
  if (!top.fits_ulong_p() || top.get_ui() > opt.cap) {
    throw BudgetExceeded(0, "P_k* - 1 = " + top.get_str() + " exceeds the scan cap");
  }
  LowerBoundReport rep;
  rep.k = k;
  rep.P_k = c.P(1, k);
  rep.Q = top.get_ui();
  rep.scan = scan_min(c.xi_enclosures(), rep.Q, opt);
  rep.c_prime_lo = rep.scan.dist_lo * Rational(rep.P_k);

  const Integer S = c.S();
  const std::uint64_t chunk = 1 << 14;
  const std::size_t blocks = static_cast<std::size_t>((rep.Q + chunk - 1) / chunk);
  std::vector<std::uint64_t> failures(blocks, 0);
  parallel_for(blocks, opt.threads, [&](std::size_t b) {
    const std::uint64_t begin = b * chunk + 1;
    const std::uint64_t end = std::min<std::uint64_t>(rep.Q, (b + 1) * chunk);
    for (std::uint64_t q = begin; q <= end; ++q) {
      if (!detail::structural_step_holds(c, k, Integer(static_cast<unsigned long>(q)), S)) {
        failures[b] = q;
        return;
      }
    }
  });
  rep.structural_checked = rep.Q;
  for (std::uint64_t f : failures) {
    if (f != 0) {
      rep.structural_ok = false;
      rep.first_failure = f;
      break;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Liouville witnesses.

struct LiouvilleWitness {
  int k = 0;
  Integer q;
  Rational dist_hi;
  Rational exponent_lo;  // certified lower bound on -log ||q xi|| / log q
};

/// Witness q = S P_k* for k = 1 .. min(kmax_witness, kmax - 1).
inline std::vector<LiouvilleWitness> liouville_witnesses(const Construction& c, int kmax_witness) {
  std::vector<LiouvilleWitness> out;
  const int last = std::min(kmax_witness, c.kmax() - 1);
  for (int k = 1; k <= last; ++k) {
    LiouvilleWitness w;
    w.k = k;
    w.q = c.S() * c.P(c.m(), k);
    w.dist_hi = dist_to_integers(w.q, c.xi_enclosures()).hi;
    if (w.dist_hi.is_zero()) throw ExactRationalPoint("witness hits xi exactly");
    const double num = -log_rational(w.dist_hi);
    const double den = log_integer(w.q);
    // Both logs carry relative error far below 1e-12; the margin absorbs it.
    w.exponent_lo = rational_floor(num / den - 1e-9 * (1.0 + std::fabs(num / den)));
    out.push_back(std::move(w));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Uniform exponent slope fit.

/// D(Q) in [lo, hi].
struct DirichletSample {
  Integer Q;
  Rational lo;
  Rational hi;
};

struct SlopeBracket {
  Rational lo;
  Rational hi;
  double lo_decimal = 0;
  double hi_decimal = 0;
};

/// Least-squares slope of log D against log Q, bracketed over all choices of D inside the samples.
inline SlopeBracket omega_hat_fit(const std::vector<DirichletSample>& samples) {
  if (samples.size() < 5) throw InvalidArgument("slope fit needs at least 5 samples");
  Integer qmin = samples.front().Q;
  Integer qmax = samples.front().Q;
  for (const auto& s : samples) {
    qmin = std::min(qmin, s.Q);
    qmax = std::max(qmax, s.Q);
    if (s.hi.is_zero()) throw ExactRationalPoint("D(Q) = 0 at Q = " + s.Q.get_str());
    if (s.lo.is_zero()) throw TooWide(detail::small_or_zero(s.Q), "lower bracket of D(Q) is zero");
  }
  if (qmax < qmin * 1000) throw InvalidArgument("Q grid must span at least three orders of magnitude");
  const std::size_t n = samples.size();
  std::vector<double> x(n);
  double xbar = 0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = log_integer(samples[i].Q);
    xbar += x[i];
  }
  xbar /= static_cast<double>(n);
  double sxx = 0;
  for (double xi : x) sxx += (xi - xbar) * (xi - xbar);
  double lo = 0;
  double hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (x[i] - xbar) / sxx;
    double ylo = log_rational(samples[i].lo);
    double yhi = log_rational(samples[i].hi);
    ylo -= 1e-12 * (1.0 + std::fabs(ylo));
    yhi += 1e-12 * (1.0 + std::fabs(yhi));
    lo += w * (w > 0 ? ylo : yhi);
    hi += w * (w > 0 ? yhi : ylo);
  }
  SlopeBracket out;
  out.lo = rational_floor(lo - 1e-9, 1000000000);
  out.hi = rational_ceil(hi + 1e-9, 1000000000);
  out.lo_decimal = out.lo.to_double();
  out.hi_decimal = out.hi.to_double();
  return out;
}

inline std::vector<DirichletSample> scan_samples(const std::vector<Enclosure>& encs, const std::vector<std::uint64_t>& grid,
                                                 const ScanOptions& opt = {}) {
  std::vector<DirichletSample> out;
  for (const ScanResult& r : scan_min_grid(encs, grid, opt)) {
    out.push_back({Integer(static_cast<unsigned long>(r.Q)), r.dist_lo, r.dist_hi});
  }
  return out;
}

/// Slope fit with D(Q) from the exhaustive scan.
inline SlopeBracket omega_hat_fit(const std::vector<Enclosure>& encs, const std::vector<std::uint64_t>& grid,
                                  const ScanOptions& opt = {}) {
  return omega_hat_fit(scan_samples(encs, grid, opt));
}

/// Certified ||q xi|| upper ends for the witnesses q = 1 and q = S P_{h,k}.
struct WitnessTable {
  std::vector<std::pair<Integer, Rational>> entries;  // (q, dist_hi), ascending q

  static WitnessTable build(const Construction& c) {
    WitnessTable t;
    const auto& encs = c.xi_enclosures();
    t.entries.emplace_back(Integer(1), dist_to_integers(Integer(1), encs).hi);
    const Integer S = c.S();
    for (int k = 1; k <= c.kmax(); ++k) {
      for (int h = 1; h <= c.m(); ++h) {
        const Integer q = S * c.P(h, k);
        try {
          t.entries.emplace_back(q, dist_to_integers(q, encs).hi);
        } catch (const TooWide&) {
        }
      }
    }
    return t;
  }

  /// Smallest certified upper end among witnesses q <= Q.
  Rational best_up_to(const Integer& Q) const {
    Rational best = entries.front().second;
    for (const auto& [q, d] : entries) {
      if (q <= Q && d < best) best = d;
    }
    return best;
  }
};

/// Bracket of D(Q) from the construction's structure, for Q too large to scan.
///
/// With k minimal such that Q < P_{m,k}, every q <= Q has h = max{h : P_{h,k} | q} < m, so
/// ||q xi|| >= ||q p_{h+1,k}/q_{h+1,k}|| - Q err_{h+1,k} >= P_{h,k}/(S_{h+1,k} P_{h+1,k}) - Q err_{h+1,k}.
/// The upper end is the best certified witness S P_{h,k'} <= Q.
inline DirichletSample structural_dirichlet_bracket(const Construction& c, const Integer& Q, const WitnessTable& witnesses) {
  if (Q < 1) throw InvalidArgument("Q must be >= 1");
  const int m = c.m();
  int k = 1;
  while (k <= c.kmax() && Q >= c.P(m, k)) ++k;
  if (k > c.kmax()) throw NeedMoreDepth(c.kmax() + 1, "Q beyond P_{m,kmax}");
  for (int h = 1; h < m; ++h) {
    if (!divides(c.P(h, k), c.P(h + 1, k))) throw LemmaViolation("prefix factors do not form a divisibility chain");
  }
  const auto& encs = c.xi_enclosures();
  std::optional<Rational> lower;
  for (int h = 0; h < m; ++h) {
    const ApproximantRow& row = c.row(h + 1, k);
    Rational err = encs[static_cast<std::size_t>(h)].max_distance(row.value);
    Rational b = Rational(c.P(h, k), row.S.num() * c.P(h + 1, k)) - Rational(Q) * err;
    if (!lower || b < *lower) lower = b;
  }
  return {Q, max(*lower, Rational(0)), witnesses.best_up_to(Q)};
}

inline DirichletSample structural_dirichlet_bracket(const Construction& c, const Integer& Q) {
  return structural_dirichlet_bracket(c, Q, WitnessTable::build(c));
}

/// Q = P_{m,k} - 1 and floor((P_{m,k} - 1) / 2) for k in [k_first, k_last].
inline std::vector<Integer> critical_grid(const Construction& c, int k_first, int k_last) {
  std::vector<Integer> grid;
  for (int k = k_first; k <= k_last; ++k) {
    const Integer top = c.P(c.m(), k) - 1;
    grid.push_back(top / 2);
    grid.push_back(top);
  }
  return grid;
}

inline SlopeBracket omega_hat_fit(const Construction& c, const std::vector<Integer>& grid) {
  const WitnessTable witnesses = WitnessTable::build(c);
  std::vector<DirichletSample> samples;
  for (const Integer& Q : grid) samples.push_back(structural_dirichlet_bracket(c, Q, witnesses));
  return omega_hat_fit(samples);
}

// ---------------------------------------------------------------------------
// Intrinsic membership.

/// The stored approximant equals the evaluation of its address w_{j,k}.
inline bool intrinsic_check(const ApproximantRow& row, const Schedule& sched, const IfsPair& ifs) {
  try {
    return eval_tail(build_words(sched, row.j, row.k).w, ifs) == row.value;
  } catch (const Error&) {
    return false;
  }
}

inline bool intrinsic_check(const Construction& c, int j, int k) {
  return intrinsic_check(c.row(j, k), c.schedule(), c.ifs());
}

// ---------------------------------------------------------------------------
// Bounded-height relation search. NONE only rules out relations of height <= H
// that are consistent with the enclosures; it proves nothing about total irrationality.

inline std::optional<std::vector<long>> relation_search(const std::vector<Enclosure>& encs, long H) {
  if (H <= 0) throw InvalidArgument("height bound must be positive");
  if (encs.empty()) throw InvalidArgument("need at least one coordinate");
  const Rational limit(Integer(1), Integer(16) * Integer(H) * Integer(H));
  for (const auto& e : encs) {
    if (e.width() >= limit) throw TooWide(0, "enclosure too wide for the height bound");
  }
  constexpr unsigned kBits = 256;
  const Rational scale(ipow(Integer(2), kBits));
  const Integer one = scale.num();
  std::vector<Integer> L;
  std::vector<Integer> U;
  for (const auto& e : encs) {
    L.push_back(floor(e.lo() * scale));
    U.push_back(ceil(e.hi() * scale));
  }
  const std::size_t n = encs.size() + 1;
  std::vector<long> a(n);
  Integer lo;
  Integer hi;
  for (long h = 1; h <= H; ++h) {
    std::fill(a.begin(), a.end(), -h);
    while (true) {
      bool at_height = std::any_of(a.begin(), a.end(), [h](long v) { return v == h || v == -h; });
      if (at_height) {
        lo = one * a[0];
        hi = lo;
        for (std::size_t j = 1; j < n; ++j) {
          const Integer& low = a[j] >= 0 ? L[j - 1] : U[j - 1];
          const Integer& high = a[j] >= 0 ? U[j - 1] : L[j - 1];
          lo += low * a[j];
          hi += high * a[j];
        }
        if (lo <= 0 && hi >= 0) return a;
      }
      std::size_t i = n;
      while (i > 0 && a[i - 1] == h) a[--i] = -h;
      if (i == 0) break;
      ++a[i - 1];
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Diagonal demo: f(x) = x/2, g(x) = x/3 + 1/4 acting on x1 = ... = xm.

inline IfsPair diagonal_ifs() { return IfsPair(AffineMap::reciprocal(2, 0), AffineMap::reciprocal(3, Rational(1, 4))); }

/// g f g f^2 g f^3 ... truncated after `blocks` blocks.
inline Word diagonal_address(int blocks) {
  Word w;
  for (int i = 1; i <= blocks; ++i) {
    w.append(Letter::G);
    w.append(Letter::F, static_cast<std::uint64_t>(i));
  }
  return w;
}

struct DiagonalPoint {
  std::uint64_t Q = 0;
  std::uint64_t q = 0;
  Rational dist_lo;
  Rational dist_hi;
  bool certified = false;  // dist_hi <= 1/Q
};

struct DiagonalReport {
  int m = 0;
  Enclosure coordinate = Enclosure::point(Rational(0));
  std::vector<DiagonalPoint> points;
  bool all_certified = true;
};

inline DiagonalReport diagonal_demo(int m, const std::vector<std::uint64_t>& grid, const Enclosure& coordinate,
                                    const ScanOptions& opt = {}) {
  if (m < 2) throw InvalidArgument("diagonal demo needs m >= 2");
  DiagonalReport rep;
  rep.m = m;
  rep.coordinate = coordinate;
  const std::vector<Enclosure> encs(static_cast<std::size_t>(m), coordinate);
  for (const ScanResult& r : scan_min_grid(encs, grid, opt)) {
    DiagonalPoint p;
    p.Q = r.Q;
    p.q = r.best_q;
    p.dist_lo = r.dist_lo;
    p.dist_hi = r.dist_hi;
    p.certified = r.Q > 1 && r.dist_hi <= Rational(Integer(1), Integer(static_cast<unsigned long>(r.Q)));
    rep.all_certified = rep.all_certified && p.certified;
    rep.points.push_back(std::move(p));
  }
  return rep;
}

/// Uses the default irrational address, refined until its width is far below 1/Q^2.
inline DiagonalReport diagonal_demo(int m, const std::vector<std::uint64_t>& grid, const ScanOptions& opt = {}) {
  if (m < 2) throw InvalidArgument("diagonal demo needs m >= 2");
  if (grid.empty()) throw InvalidArgument("empty Q grid");
  const std::uint64_t top = *std::max_element(grid.begin(), grid.end());
  const Rational target(Integer(1), Integer(static_cast<unsigned long>(top)) * Integer(static_cast<unsigned long>(top)) *
                                        Integer(1 << 20));
  const IfsPair ifs = diagonal_ifs();
  int blocks = 1;
  Enclosure e = enclose_prefix(diagonal_address(blocks), ifs);
  while (e.width() > target) e = enclose_prefix(diagonal_address(++blocks), ifs);
  return diagonal_demo(m, grid, e, opt);
}

}  // namespace dirifs
