// SPDX-License-Identifier: Apache-2.0
#pragma once

// Two-map affine IFS on the line, digit words over {F, G} and their exact
// evaluation. Words are stored run-length encoded because the construction
// produces words with millions of letters arranged in a few long runs; each
// run is applied through the closed form of an iterated affine map.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "dirifs/rational.hpp"

namespace dirifs {

enum class Letter : std::uint8_t { F, G };

inline char to_char(Letter l) { return l == Letter::F ? 'F' : 'G'; }

/// x -> (u/b) x + shift, with 0 < u < b and gcd(u, b) = 1.
class AffineMap {
 public:
  AffineMap(Integer u, Integer b, Rational shift)
      : u_(std::move(u)), b_(std::move(b)), shift_(std::move(shift)) {
    if (b_ < 2) throw InvalidArgument("contraction denominator must be >= 2");
    if (u_ <= 0 || u_ >= b_) throw InvalidArgument("contraction rate must lie in (0, 1)");
    if (gcd(u_, b_) != 1) throw InvalidArgument("contraction rate u/b must be reduced");
  }

  /// x / b + shift.
  static AffineMap reciprocal(long b, Rational shift) { return AffineMap(1, b, std::move(shift)); }

  const Integer& contraction_num() const { return u_; }
  const Integer& contraction_den() const { return b_; }
  Rational rate() const { return Rational(u_, b_); }
  const Rational& shift() const { return shift_; }

  Rational operator()(const Rational& x) const { return rate() * x + shift_; }

  Rational fixed_point() const { return shift_ / (Rational(1) - rate()); }

  /// The n-fold iterate applied to x: rate^n (x - fix) + fix.
  Rational iterate(const Rational& x, std::uint64_t n) const {
    if (n == 0) return x;
    Rational fix = fixed_point();
    return Rational(ipow(u_, n), ipow(b_, n)) * (x - fix) + fix;
  }

  friend bool operator==(const AffineMap&, const AffineMap&) = default;

 private:
  Integer u_;
  Integer b_;
  Rational shift_;
};

class IfsPair {
 public:
  IfsPair(AffineMap f, AffineMap g) : f_(std::move(f)), g_(std::move(g)) {}

  const AffineMap& f() const { return f_; }
  const AffineMap& g() const { return g_; }
  const AffineMap& map(Letter l) const { return l == Letter::F ? f_ : g_; }

  const Integer& b1() const { return f_.contraction_den(); }
  const Integer& b2() const { return g_.contraction_den(); }
  const Integer& u1() const { return f_.contraction_num(); }
  const Integer& s1() const { return f_.shift().den(); }
  const Integer& s2() const { return g_.shift().den(); }

  /// Both contraction rates are reciprocals of integers.
  bool reciprocal_rates() const { return f_.contraction_num() == 1 && g_.contraction_num() == 1; }

  friend bool operator==(const IfsPair&, const IfsPair&) = default;

 private:
  AffineMap f_;
  AffineMap g_;
};

inline Rational fixed_point(const AffineMap& map) { return map.fixed_point(); }

enum class PairStatus { ok, degenerate };

/// Degenerate iff both maps share their fixed point (the attractor is a single point).
inline PairStatus validate_pair(const IfsPair& ifs) {
  return ifs.f().fixed_point() == ifs.g().fixed_point() ? PairStatus::degenerate : PairStatus::ok;
}

struct Run {
  Letter letter;
  std::uint64_t count;
  friend bool operator==(const Run&, const Run&) = default;
};

/// Finite word over {F, G}, run-length encoded; adjacent runs always differ in letter.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<Letter> letters) {
    for (Letter l : letters) append(l);
  }

  static Word power(Letter l, std::uint64_t n) {
    Word w;
    w.append(l, n);
    return w;
  }

  /// Parses a string over {F, G, f, g}.
  static Word parse(const std::string& s) {
    Word w;
    for (char c : s) {
      if (c == 'F' || c == 'f') {
        w.append(Letter::F);
      } else if (c == 'G' || c == 'g') {
        w.append(Letter::G);
      } else {
        throw InvalidArgument(std::string("not a word letter: ") + c);
      }
    }
    return w;
  }

  Word& append(Letter l, std::uint64_t n = 1) {
    if (n == 0) return *this;
    if (!runs_.empty() && runs_.back().letter == l) {
      runs_.back().count += n;
    } else {
      runs_.push_back({l, n});
    }
    size_ += n;
    if (l == Letter::F) count_f_ += n;
    return *this;
  }

  Word& append(const Word& other) {
    for (const Run& r : other.runs_) append(r.letter, r.count);
    return *this;
  }

  friend Word operator+(Word a, const Word& b) { return a.append(b); }

  std::uint64_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::uint64_t count(Letter l) const { return l == Letter::F ? count_f_ : size_ - count_f_; }
  const std::vector<Run>& runs() const { return runs_; }

  Letter at(std::uint64_t i) const {
    for (const Run& r : runs_) {
      if (i < r.count) return r.letter;
      i -= r.count;
    }
    throw InvalidArgument("word index out of range");
  }

  /// The word without its last n letters.
  Word drop_back(std::uint64_t n) const {
    if (n > size_) throw InvalidArgument("drop_back longer than the word");
    return prefix(size_ - n);
  }

  Word prefix(std::uint64_t n) const {
    Word w;
    for (const Run& r : runs_) {
      if (n == 0) break;
      std::uint64_t take = std::min(n, r.count);
      w.append(r.letter, take);
      n -= take;
    }
    return w;
  }

  std::string str() const {
    std::string s;
    s.reserve(static_cast<std::size_t>(size_));
    for (const Run& r : runs_) s.append(static_cast<std::size_t>(r.count), to_char(r.letter));
    return s;
  }

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<Run> runs_;
  std::uint64_t size_ = 0;
  std::uint64_t count_f_ = 0;
};

/// preamble . period^infinity
class TailWord {
 public:
  TailWord(Word preamble, Word period) : preamble_(std::move(preamble)), period_(std::move(period)) {
    if (period_.empty()) throw InvalidArgument("tail period must be nonempty");
  }

  const Word& preamble() const { return preamble_; }
  const Word& period() const { return period_; }

  /// First n letters of the infinite expansion.
  Word expand(std::uint64_t n) const {
    Word w = preamble_.prefix(n);
    while (w.size() < n) w.append(period_.prefix(n - w.size()));
    return w;
  }

  friend TailWord operator+(const Word& head, const TailWord& t) {
    return TailWord(head + t.preamble_, t.period_);
  }

 private:
  Word preamble_;
  Word period_;
};

/// Certified interval [lo, hi].
class Enclosure {
 public:
  Enclosure(Rational lo, Rational hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (hi_ < lo_) throw InvalidArgument("enclosure with lo > hi");
  }
  static Enclosure point(const Rational& x) { return Enclosure(x, x); }
  static Enclosure around(const Rational& center, const Rational& radius) {
    return Enclosure(center - radius, center + radius);
  }

  const Rational& lo() const { return lo_; }
  const Rational& hi() const { return hi_; }
  Rational width() const { return hi_ - lo_; }
  Rational radius() const { return width() / 2; }
  Rational mid() const { return (lo_ + hi_) / 2; }
  bool contains(const Rational& x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Enclosure& e) const { return lo_ <= e.lo_ && e.hi_ <= hi_; }

  /// Largest distance from x to a point of the enclosure.
  Rational max_distance(const Rational& x) const { return max(abs(x - lo_), abs(hi_ - x)); }

  friend bool operator==(const Enclosure&, const Enclosure&) = default;

 private:
  Rational lo_;
  Rational hi_;
};

/// w_1 o w_2 o ... o w_k (x), innermost letter applied first.
inline Rational apply_word(const Word& word, const Rational& x, const IfsPair& ifs) {
  Rational y = x;
  const auto& runs = word.runs();
  for (auto it = runs.rbegin(); it != runs.rend(); ++it) y = ifs.map(it->letter).iterate(y, it->count);
  return y;
}

/// Product of the contraction rates read along the word.
inline Rational contraction_product(const Word& word, const IfsPair& ifs) {
  std::uint64_t h1 = word.count(Letter::F);
  std::uint64_t h2 = word.count(Letter::G);
  return Rational(ipow(ifs.f().contraction_num(), h1) * ipow(ifs.g().contraction_num(), h2),
                  ipow(ifs.b1(), h1) * ipow(ifs.b2(), h2));
}

/// Unreduced normal form word(x) = (A x + M) / D with D = b1^h1 b2^h2 s1 s2.
struct AffineForm {
  Integer A;
  Integer M;
  Integer D;

  Rational operator()(const Rational& x) const { return Rational(A * x.num() + M * x.den(), D * x.den()); }
};

/// Integer recurrence over the letters, independent of apply_word's rational path.
inline AffineForm symbolic_form(const Word& word, const IfsPair& ifs) {
  const Integer s12 = ifs.s1() * ifs.s2();
  Integer M = 0;
  Integer B = 1;      // b1^h1 b2^h2 of the prefix read so far
  Integer uacc = 1;   // product of contraction numerators read so far
  for (const Run& r : word.runs()) {
    const AffineMap& map = ifs.map(r.letter);
    const Integer& u = map.contraction_num();
    const Integer& b = map.contraction_den();
    const Integer t = s12 / map.shift().den();
    const Integer bn = ipow(b, r.count);
    const Integer un = ipow(u, r.count);
    // Appending n copies: M <- b^n M + uacc r b t (b^n - u^n) / (b - u).
    M = bn * M + uacc * map.shift().num() * b * t * ((bn - un) / (b - u));
    B *= bn;
    uacc *= un;
  }
  return {uacc * s12, M, B * s12};
}

/// Exact value of preamble . period^infinity at 0.
inline Rational eval_tail(const TailWord& tw, const IfsPair& ifs) {
  // The period block is x -> rho x + beta with rho < 1; its fixed point is beta / (1 - rho).
  Rational rho = contraction_product(tw.period(), ifs);
  Rational beta = apply_word(tw.period(), Rational(0), ifs);
  Rational fix = beta / (Rational(1) - rho);
  return apply_word(tw.preamble(), fix, ifs);
}

/// |fix(f) - fix(g)| / (1 - max rate): bounds the diameter of the attractor.
inline Rational diameter_bound(const IfsPair& ifs) {
  Rational spread = abs(ifs.f().fixed_point() - ifs.g().fixed_point());
  return spread / (Rational(1) - max(ifs.f().rate(), ifs.g().rate()));
}

/// Interval containing prefix(x) for every x in the attractor, centred at prefix(fix(g)).
inline Enclosure enclose_prefix(const Word& prefix, const IfsPair& ifs) {
  Rational center = apply_word(prefix, ifs.g().fixed_point(), ifs);
  return Enclosure::around(center, contraction_product(prefix, ifs) * diameter_bound(ifs));
}

}  // namespace dirifs
