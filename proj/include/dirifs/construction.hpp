// SPDX-License-Identifier: Apache-2.0
#pragma once

// Builds the vector xi inside C^m: the gap parameter ell, the block length N,
// the integer schedules f_k and g_{j,k}, the words t/v/w and the table of
// exact approximants p_{j,k}/q_{j,k} = P_{j,k} S_{j,k}.
//
// xi itself is an infinite object. A schedule of depth K fixes the prefix
// v_{j,K} f^N of every address; enclosures certify xi_j for every feasible
// continuation of the sequence M beyond K.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirifs/ifs.hpp"
#include "dirifs/parallel.hpp"
#include "dirifs/valuation.hpp"

namespace dirifs {

struct ConstructionParams {
  IfsPair ifs;
  int m = 2;
  Rational c{1, 2};
  std::vector<std::int64_t> M;
  std::optional<Rational> omega;
  std::optional<long> N_override;
  std::optional<long> ell_override;

  void validate() const {
    if (m < 2) throw InvalidArgument("m must be >= 2");
    if (c <= Rational(0) || c >= Rational(1)) throw InvalidArgument("c must lie in (0, 1)");
    if (M.empty()) throw InvalidArgument("M must be nonempty");
    for (std::size_t i = 0; i < M.size(); ++i) {
      if (M[i] <= 0) throw InvalidArgument("M must be positive");
      if (i > 0 && M[i] <= M[i - 1]) throw InvalidArgument("M must be strictly increasing");
    }
    if (validate_pair(ifs) == PairStatus::degenerate) throw InvalidArgument("degenerate IFS pair");
    if (omega) {
      Rational lo(1, m);
      Rational hi(1, m - 1);
      if (*omega < lo || *omega > hi) {
        throw InvalidArgument("omega must lie in [1/m, 1/(m-1)]; use Omega1Vector for omega = 1");
      }
    }
  }
};

/// Smallest integer ell exceeding max over i, p | b_i of max(v_p(s1), v_p(s2)) / v_p(b_i).
inline long choose_ell(const IfsPair& ifs) {
  Rational worst = 0;
  for (const Integer& b : {ifs.b1(), ifs.b2()}) {
    for (const Integer& p : prime_divisors(b)) {
      long in_s = std::max(multiplicity(p, ifs.s1()), multiplicity(p, ifs.s2()));
      worst = max(worst, Rational(Integer(in_s), Integer(multiplicity(p, b))));
    }
  }
  return floor(worst).get_si() + 1;
}

/// The word q = g^N f^N g^infinity.
inline TailWord gap_word(long N) {
  Word pre = Word::power(Letter::G, static_cast<std::uint64_t>(N));
  pre.append(Letter::F, static_cast<std::uint64_t>(N));
  return TailWord(pre, Word{Letter::G});
}

struct GapChoice {
  long N;
  Rational r_over_s;  // q(0), reduced
};

/// Smallest N >= 1 with b1^ell b2^ell dividing the reduced denominator of q(0).
inline GapChoice find_N(const IfsPair& ifs, long ell, long cap = 10000) {
  if (validate_pair(ifs) == PairStatus::degenerate) throw InvalidArgument("degenerate IFS pair");
  const Integer target = ipow(ifs.b1() * ifs.b2(), static_cast<std::uint64_t>(ell));
  for (long N = 1; N <= cap; ++N) {
    Rational rs = eval_tail(gap_word(N), ifs);
    if (divides(target, rs.den())) return {N, rs};
  }
  throw SearchExhausted("no N <= " + std::to_string(cap) + " makes (b1 b2)^ell divide s");
}

class Schedule {
 public:
  Schedule(int m, long N, long ell, std::vector<std::int64_t> f, std::vector<std::vector<std::int64_t>> g)
      : m_(m), N_(N), ell_(ell), f_(std::move(f)), g_(std::move(g)) {}

  int m() const { return m_; }
  int kmax() const { return static_cast<int>(f_.size()) - 1; }
  long N() const { return N_; }
  long ell() const { return ell_; }

  std::int64_t f(int k) const { return f_.at(static_cast<std::size_t>(k)); }
  /// g_{j,k}, 1 <= j <= m.
  std::int64_t g(int j, int k) const { return g_.at(static_cast<std::size_t>(j - 1)).at(static_cast<std::size_t>(k)); }
  std::int64_t eta(int j, int k) const { return g(j, k) - g(j, k - 1); }

  /// f_k <= f_{k+1} and g_{1,k} <= ... <= g_{m,k} <= g_{1,k+1}.
  bool exponent_chain_holds() const {
    for (int k = 0; k <= kmax(); ++k) {
      for (int j = 1; j < m_; ++j) {
        if (g(j, k) > g(j + 1, k)) return false;
      }
      if (k < kmax() && (f(k) > f(k + 1) || g(m_, k) > g(1, k + 1))) return false;
    }
    return true;
  }

 private:
  int m_;
  long N_;
  long ell_;
  std::vector<std::int64_t> f_;
  std::vector<std::vector<std::int64_t>> g_;
};

namespace detail {

inline std::int64_t floor_log_b2(const IfsPair& ifs, const Rational& x) { return floor_log(ifs.b2(), x); }

inline Rational b1b2(const IfsPair& ifs, std::int64_t e1, std::int64_t e2) {
  return rpow(Rational(ifs.b1()), e1) * rpow(Rational(ifs.b2()), e2);
}

}  // namespace detail

inline Schedule build_schedule(const ConstructionParams& params, long N, long ell, int kmax) {
  params.validate();
  if (kmax < 0 || static_cast<std::size_t>(kmax) > params.M.size()) {
    throw InvalidArgument("kmax must lie in [0, |M|]");
  }
  const int m = params.m;
  const IfsPair& ifs = params.ifs;
  std::vector<std::int64_t> f(static_cast<std::size_t>(kmax) + 1);
  std::vector<std::vector<std::int64_t>> g(static_cast<std::size_t>(m), std::vector<std::int64_t>(f.size(), 0));
  for (int k = 1; k <= kmax; ++k) {
    const std::int64_t fk = N * k;
    const std::int64_t g1 = params.M[static_cast<std::size_t>(k - 1)];
    f[static_cast<std::size_t>(k)] = fk;
    g[0][static_cast<std::size_t>(k)] = g1;
    for (int j = 2; j <= m - 1; ++j) {
      g[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k)] =
          detail::floor_log_b2(ifs, detail::b1b2(ifs, (j - 1) * fk, j * g1));
    }
    std::int64_t gm = 0;
    if (params.omega) {
      // Largest g with (b1^f b2^g)^a <= (b1^f b2^g1)^b for omega = a/b.
      const Integer a = params.omega->num();
      const Integer b = params.omega->den();
      const std::int64_t L = detail::floor_log_b2(ifs, detail::b1b2(ifs, Integer(b - a).get_si() * fk, b.get_si() * g1));
      gm = L / a.get_si();
      if (*params.omega == Rational(1, m - 1)) gm += k;
    } else if (m == 2) {
      gm = detail::floor_log_b2(ifs, rpow(params.c, -2) * detail::b1b2(ifs, (k - 2) * N, 2 * g1));
    } else {
      gm = detail::floor_log_b2(ifs, rpow(params.c, m) * detail::b1b2(ifs, (m - 1) * fk, m * g1));
    }
    g[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(k)] = gm;
  }
  Schedule sched(m, N, ell, std::move(f), std::move(g));
  auto tag = [](int j, int k) { return "{" + std::to_string(j) + "," + std::to_string(k) + "}"; };
  for (int k = 1; k <= kmax; ++k) {
    for (int j = 1; j <= m; ++j) {
      if (sched.eta(j, k) <= 0) {
        throw ScheduleInfeasible(j, k, "eta_" + tag(j, k) + " = " + std::to_string(sched.eta(j, k)) +
                                           " is not positive; M grows too slowly");
      }
      // g_{1,k} <= ... <= g_{m,k} <= g_{1,k+1}
      const bool last = j == m;
      if (last && k == kmax) continue;
      const int jn = last ? 1 : j + 1;
      const int kn = last ? k + 1 : k;
      if (sched.g(j, k) > sched.g(jn, kn)) {
        throw ScheduleInfeasible(jn, kn, "g_" + tag(jn, kn) + " = " + std::to_string(sched.g(jn, kn)) + " < g_" +
                                             tag(j, k) + " = " + std::to_string(sched.g(j, k)) +
                                             "; M grows too slowly");
      }
    }
  }
  return sched;
}

struct RowWords {
  Word t;
  Word v;
  TailWord w;
};

/// t_{j,k}, v_{j,k} and w_{j,k} = t_{j,k} q = v_{j,k} p.
inline RowWords build_words(const Schedule& sched, int j, int k) {
  if (j < 1 || j > sched.m() || k < 0 || k > sched.kmax()) throw InvalidArgument("row index out of range");
  const auto N = static_cast<std::uint64_t>(sched.N());
  Word v = Word::power(Letter::G, N);
  for (int i = 1; i <= k; ++i) {
    v.append(Letter::F, N);
    v.append(Letter::G, static_cast<std::uint64_t>(sched.eta(j, i)));
  }
  Word t;
  if (k > 0) {
    if (sched.eta(j, k) < sched.N()) {
      throw WordInfeasible(j, k, "eta_{" + std::to_string(j) + "," + std::to_string(k) + "} < N");
    }
    t = v.drop_back(N);
  }
  Word head = v;
  head.append(Letter::F, N);
  TailWord w(head, Word{Letter::G});
  Word via_q = t + gap_word(sched.N()).preamble();
  if (!(via_q == head)) throw LemmaViolation("t.q and v.p disagree");
  return {std::move(t), std::move(v), std::move(w)};
}

struct ApproximantRow {
  int j = 0;
  int k = 0;
  Word t;
  Word v;
  Rational value;  // p/q = w_{j,k}(0)
  Integer P;       // b1^{f_k} b2^{g_{j,k}}
  Rational S;      // q / P; an integer dividing s s1 s2 for reciprocal rates

  const Integer& p() const { return value.num(); }
  const Integer& q() const { return value.den(); }
};

inline Integer prefix_factor(const Schedule& sched, const IfsPair& ifs, int j, int k) {
  return ipow(ifs.b1(), static_cast<std::uint64_t>(sched.f(k))) *
         ipow(ifs.b2(), static_cast<std::uint64_t>(sched.g(j, k)));
}

/// Row (j, k). `s` is the reduced denominator of q(0); the cofactor bound is enforced
/// when both contraction rates are reciprocals of integers.
inline ApproximantRow approximant(const Schedule& sched, const IfsPair& ifs, int j, int k, const Integer& s) {
  RowWords words = build_words(sched, j, k);
  ApproximantRow row;
  row.j = j;
  row.k = k;
  row.value = eval_tail(words.w, ifs);
  row.P = prefix_factor(sched, ifs, j, k);
  row.S = Rational(row.value.den(), row.P);
  if (ifs.reciprocal_rates()) {
    const Integer bound = s * ifs.s1() * ifs.s2();
    if (!row.S.is_integer() || !divides(row.S.num(), bound)) {
      throw LemmaViolation("q_{" + std::to_string(j) + "," + std::to_string(k) + "} / P = " + row.S.str() +
                           " does not divide s s1 s2 = " + bound.get_str());
    }
  }
  row.t = std::move(words.t);
  row.v = std::move(words.v);
  return row;
}

class Construction {
 public:
  /// Builds schedule and rows through kmax (default: all of M).
  static Construction build(ConstructionParams params, std::optional<int> kmax = std::nullopt, int threads = 1) {
    params.validate();
    const int depth = kmax.value_or(static_cast<int>(params.M.size()));
    const long min_ell = choose_ell(params.ifs);
    const long ell = params.ell_override.value_or(min_ell);
    if (ell < min_ell) throw InvalidArgument("ell override below the admissible minimum");
    GapChoice gap;
    if (params.N_override) {
      Rational rs = eval_tail(gap_word(*params.N_override), params.ifs);
      if (!divides(ipow(params.ifs.b1() * params.ifs.b2(), static_cast<std::uint64_t>(ell)), rs.den())) {
        throw InvalidArgument("N override does not give (b1 b2)^ell | s");
      }
      gap = {*params.N_override, rs};
    } else {
      gap = find_N(params.ifs, ell);
    }
    Schedule sched = build_schedule(params, gap.N, ell, depth);
    Construction c(std::move(params), std::move(sched), gap.r_over_s);
    const int m = c.params_.m;
    const std::size_t count = static_cast<std::size_t>(m) * static_cast<std::size_t>(depth + 1);
    c.rows_.resize(count);
    parallel_for(count, threads, [&](std::size_t i) {
      int k = static_cast<int>(i) / m;
      int j = static_cast<int>(i) % m + 1;
      c.rows_[i] = approximant(c.sched_, c.params_.ifs, j, k, c.r_over_s_.den());
    });
    c.enclosures_.resize(static_cast<std::size_t>(m), Enclosure::point(Rational(0)));
    parallel_for(static_cast<std::size_t>(m), threads, [&](std::size_t i) {
      c.enclosures_[i] = c.xi_enclosure(static_cast<int>(i) + 1, depth);
    });
    return c;
  }

  const ConstructionParams& params() const { return params_; }
  const IfsPair& ifs() const { return params_.ifs; }
  const Schedule& schedule() const { return sched_; }
  int m() const { return params_.m; }
  int kmax() const { return sched_.kmax(); }
  long N() const { return sched_.N(); }
  long ell() const { return sched_.ell(); }
  /// q(0) = r/s.
  const Rational& r_over_s() const { return r_over_s_; }

  /// s s1 s2.
  Integer S() const { return r_over_s_.den() * ifs().s1() * ifs().s2(); }

  /// P_{j,k}, with P_{0,k} = 1.
  Integer P(int j, int k) const { return j == 0 ? Integer(1) : row(j, k).P; }

  const ApproximantRow& row(int j, int k) const {
    if (j < 1 || j > m() || k < 0 || k > kmax()) throw InvalidArgument("row index out of range");
    return rows_[static_cast<std::size_t>(k) * static_cast<std::size_t>(m()) + static_cast<std::size_t>(j - 1)];
  }
  /// k-major, j-minor.
  const std::vector<ApproximantRow>& rows() const { return rows_; }

  /// The known prefix v_{j,K} f^N of the address of xi_j.
  Word known_prefix(int j, int K) const {
    Word w = build_words(sched_, j, K).v;
    w.append(Letter::F, static_cast<std::uint64_t>(N()));
    return w;
  }

  /// Enclosure of xi_j from the prefix fixed at depth K.
  Enclosure xi_enclosure(int j, int K) const { return enclose_prefix(known_prefix(j, K), ifs()); }

  /// Enclosure of xi_j of width at most target_width, using depth K.
  Enclosure xi_enclosure(int j, int K, const Rational& target_width) const {
    Enclosure e = (K == kmax()) ? enclosures_.at(static_cast<std::size_t>(j - 1)) : xi_enclosure(j, K);
    if (e.width() > target_width) {
      throw NeedMoreDepth(K + 1, "enclosure of xi_" + std::to_string(j) + " at depth " + std::to_string(K) +
                                     " is wider than requested");
    }
    return e;
  }

  /// Deepest enclosures of all coordinates.
  const std::vector<Enclosure>& xi_enclosures() const { return enclosures_; }

 private:
  Construction(ConstructionParams p, Schedule s, Rational rs)
      : params_(std::move(p)), sched_(std::move(s)), r_over_s_(std::move(rs)) {}

  ConstructionParams params_;
  Schedule sched_;
  Rational r_over_s_;
  std::vector<ApproximantRow> rows_;
  std::vector<Enclosure> enclosures_;
};

/// A sequence M through kmax for which every row is word-feasible. Each entry starts at
/// growth * max_j g_{j,k-1} + N (or `first`) and is raised until the schedule through k is feasible.
inline std::vector<std::int64_t> feasible_lacunary_sequence(ConstructionParams params, int kmax, std::int64_t first,
                                                            std::int64_t growth = 2) {
  if (kmax < 1) throw InvalidArgument("kmax must be >= 1");
  const long ell = params.ell_override.value_or(choose_ell(params.ifs));
  const long N = params.N_override.value_or(find_N(params.ifs, ell).N);
  auto feasible = [&](int k) {
    try {
      const Schedule s = build_schedule(params, N, ell, k);
      for (int j = 1; j <= params.m; ++j) {
        if (s.eta(j, k) < N) return false;
      }
      return true;
    } catch (const ScheduleInfeasible&) {
      return false;
    }
  };
  params.M.clear();
  std::int64_t candidate = std::max<std::int64_t>(first, N);
  for (int k = 1; k <= kmax; ++k) {
    params.M.push_back(candidate);
    for (int tries = 0; !feasible(k); ++tries) {
      if (tries == 1'000'000) throw SearchExhausted("no feasible M_" + std::to_string(k) + " found");
      ++params.M.back();
    }
    const Schedule s = build_schedule(params, N, ell, k);
    std::int64_t top = 0;
    for (int j = 1; j <= params.m; ++j) top = std::max(top, s.g(j, k));
    candidate = growth * top + N;
  }
  return params.M;
}

/// Addresses g^{a_1^{(j)}} f g^{a_2^{(j)}} f ... with a_i^{(j)} = a_i + v_i^{(j)}.
class Omega1Vector {
 public:
  static Omega1Vector build(IfsPair ifs, const std::vector<std::int64_t>& a,
                            const std::vector<std::vector<std::int64_t>>& perturb, std::int64_t bound) {
    if (perturb.size() < 2) throw InvalidArgument("need m >= 2 perturbation rows");
    for (std::size_t i = 1; i < a.size(); ++i) {
      if (a[i] <= a[i - 1]) throw InvalidArgument("a must be increasing");
    }
    std::vector<std::vector<std::int64_t>> exps;
    for (const auto& row : perturb) {
      if (row.size() != a.size()) throw InvalidPerturbation("perturbation row length differs from a");
      std::vector<std::int64_t> e(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (row[i] > bound || row[i] < -bound) throw InvalidPerturbation("perturbation exceeds its bound");
        e[i] = a[i] + row[i];
        if (e[i] < 1) throw InvalidPerturbation("nonpositive exponent a_i + v_i");
      }
      exps.push_back(std::move(e));
    }
    return Omega1Vector(std::move(ifs), std::move(exps));
  }

  int m() const { return static_cast<int>(exps_.size()); }
  std::size_t blocks() const { return exps_.front().size(); }
  const IfsPair& ifs() const { return ifs_; }
  const std::vector<std::int64_t>& exponents(int j) const { return exps_.at(static_cast<std::size_t>(j - 1)); }

  /// g^{a_1} f g^{a_2} f ... g^{a_n} f for coordinate j.
  Word prefix(int j, std::size_t n) const {
    Word w;
    const auto& e = exponents(j);
    for (std::size_t i = 0; i < n; ++i) {
      w.append(Letter::G, static_cast<std::uint64_t>(e.at(i)));
      w.append(Letter::F);
    }
    return w;
  }

  TailWord approximant_word(int j, std::size_t n) const { return TailWord(prefix(j, n), Word{Letter::G}); }
  Rational approximant(int j, std::size_t n) const { return eval_tail(approximant_word(j, n), ifs_); }
  Enclosure enclosure(int j) const { return enclose_prefix(prefix(j, blocks()), ifs_); }
  std::vector<Enclosure> enclosures() const {
    std::vector<Enclosure> out;
    for (int j = 1; j <= m(); ++j) out.push_back(enclosure(j));
    return out;
  }

 private:
  Omega1Vector(IfsPair ifs, std::vector<std::vector<std::int64_t>> e) : ifs_(std::move(ifs)), exps_(std::move(e)) {}
  IfsPair ifs_;
  std::vector<std::vector<std::int64_t>> exps_;
};

}  // namespace dirifs
