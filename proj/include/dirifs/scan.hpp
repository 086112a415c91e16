// SPDX-License-Identifier: Apache-2.0
#pragma once

// Certified exhaustive scan of min_{1<=q<=Q} max_j ||q xi_j||.
//
// Each enclosure [lo, hi] of a coordinate is rounded outward to 128-bit
// fixed point: frac(lo) >= X / 2^128 and hi - floor(lo) <= (X + W) / 2^128.
// Then q xi_j mod 1 lies in the arc [qX, qX + qW] of the circle Z / 2^128 Z,
// and both ends of that arc are computed with wrapping integer arithmetic.
// The distance-to-nearest-integer of an arc is bracketed exactly from its
// endpoints. Nothing is rounded toward the answer, so every reported bracket
// contains the true minimum.
//
// When every enclosure is a single rational point the scan switches to an
// exact integer kernel, so rational vectors yield exact (0, 0) brackets.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dirifs/ifs.hpp"
#include "dirifs/parallel.hpp"

namespace dirifs {

using u128 = unsigned __int128;

struct ScanOptions {
  int threads = 1;
  std::uint64_t cap = 10'000'000;
  /// Halvings of the requested enclosure width before giving up.
  int refine_cap = 64;
};

struct ScanResult {
  std::uint64_t Q = 0;
  std::uint64_t best_q = 0;
  Rational dist_lo;
  Rational dist_hi;
  Rational theta_lo;
  Rational theta_hi;
};

/// Supplies an enclosure of width at most the requested one, or the tightest available.
using EnclosureSource = std::function<Enclosure(const Rational& target_width)>;

namespace detail {

inline const Integer& two128() {
  static const Integer v = ipow(Integer(2), 128);
  return v;
}

inline u128 to_u128(const Integer& n) {
  if (n < 0 || n >= two128()) throw InvalidArgument("value outside the 128-bit range");
  u128 out = 0;
  std::size_t limbs = mpz_size(n.get_mpz_t());
  for (std::size_t i = limbs; i-- > 0;) {
    out = (out << (8 * sizeof(mp_limb_t))) | static_cast<u128>(mpz_getlimbn(n.get_mpz_t(), static_cast<mp_size_t>(i)));
  }
  return out;
}

inline Rational from_u128(u128 v) {
  Integer hi(static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64)));
  Integer lo(static_cast<unsigned long>(static_cast<std::uint64_t>(v)));
  return Rational((hi << 64) + lo, two128());
}

struct FixedCoord {
  u128 base;   // floor(frac(lo) * 2^128)
  u128 width;  // ceil((hi - floor(lo)) * 2^128) - base
};

inline FixedCoord to_fixed(const Enclosure& e) {
  Integer fl = floor(e.lo());
  Rational lo = e.lo() - Rational(fl);
  Rational hi = e.hi() - Rational(fl);
  Integer base = floor(lo * Rational(two128()));
  Integer top = ceil(hi * Rational(two128()));
  Integer width = top - base;
  if (width >= two128() / 4) throw TooWide(0, "enclosure wider than 1/4");
  return {to_u128(base), to_u128(width)};
}

constexpr u128 kHalf = static_cast<u128>(1) << 127;

inline u128 circle_dist(u128 x) { return x <= kHalf ? x : static_cast<u128>(0) - x; }

struct Partial {
  u128 lo = ~static_cast<u128>(0);
  u128 hi = ~static_cast<u128>(0);
  std::uint64_t best_q = 0;

  void take(u128 l, u128 h, std::uint64_t q) {
    lo = std::min(lo, l);
    if (h < hi || best_q == 0) {
      hi = h;
      best_q = q;
    }
  }
  void merge(const Partial& o) {
    if (o.best_q == 0) return;
    lo = std::min(lo, o.lo);
    if (best_q == 0 || o.hi < hi || (o.hi == hi && o.best_q < best_q)) {
      hi = o.hi;
      best_q = o.best_q;
    }
  }
};

inline Partial scan_block_fixed(const std::vector<FixedCoord>& coords, std::uint64_t begin, std::uint64_t end) {
  Partial part;
  std::vector<u128> acc(coords.size());
  for (std::size_t j = 0; j < coords.size(); ++j) acc[j] = static_cast<u128>(begin) * coords[j].base;
  for (std::uint64_t q = begin; q <= end; ++q) {
    u128 qlo = 0;
    u128 qhi = 0;
    for (std::size_t j = 0; j < coords.size(); ++j) {
      const u128 a = acc[j];
      const u128 d = static_cast<u128>(q) * coords[j].width;
      const u128 b = a + d;
      const bool wraps = b < a;
      const u128 da = circle_dist(a);
      const u128 db = circle_dist(b);
      u128 lo = wraps ? 0 : std::min(da, db);
      u128 hi = (!wraps && a <= kHalf && kHalf <= b) ? kHalf : std::max(da, db);
      qlo = std::max(qlo, lo);
      qhi = std::max(qhi, hi);
      acc[j] += coords[j].base;
    }
    part.take(qlo, qhi, q);
  }
  return part;
}

struct ExactPartial {
  Rational value;
  std::uint64_t best_q = 0;
  void merge(const ExactPartial& o) {
    if (o.best_q == 0) return;
    if (best_q == 0 || o.value < value || (o.value == value && o.best_q < best_q)) *this = o;
  }
};

inline ExactPartial scan_block_exact(const std::vector<Rational>& pts, std::uint64_t begin, std::uint64_t end) {
  ExactPartial part;
  Integer r;
  for (std::uint64_t q = begin; q <= end; ++q) {
    Rational worst = 0;
    for (const Rational& x : pts) {
      mpz_class qn = x.num() * Integer(static_cast<unsigned long>(q));
      mpz_fdiv_r(r.get_mpz_t(), qn.get_mpz_t(), x.den().get_mpz_t());
      Integer d = std::min(r, Integer(x.den() - r));
      worst = max(worst, Rational(d, x.den()));
    }
    part.merge({worst, q});
  }
  return part;
}

struct Block {
  std::uint64_t begin;
  std::uint64_t end;
  std::size_t segment;
};

inline std::vector<Block> make_blocks(const std::vector<std::uint64_t>& grid, int threads) {
  const std::uint64_t total = grid.back();
  const std::uint64_t chunk = std::max<std::uint64_t>(4096, total / (static_cast<std::uint64_t>(std::max(threads, 1)) * 8) + 1);
  std::vector<Block> blocks;
  std::uint64_t start = 1;
  for (std::size_t s = 0; s < grid.size(); ++s) {
    for (std::uint64_t b = start; b <= grid[s]; b += chunk) blocks.push_back({b, std::min(grid[s], b + chunk - 1), s});
    start = grid[s] + 1;
  }
  return blocks;
}

inline ScanResult finish(std::uint64_t Q, std::uint64_t best_q, Rational lo, Rational hi, std::size_t m) {
  auto [rlo, rhi] = root_bracket(Integer(static_cast<unsigned long>(Q)), m);
  ScanResult res;
  res.Q = Q;
  res.best_q = best_q;
  res.theta_lo = lo * rlo;
  res.theta_hi = hi * rhi;
  res.dist_lo = std::move(lo);
  res.dist_hi = std::move(hi);
  return res;
}

}  // namespace detail

/// Certified min_{q <= Q} max_j ||q xi_j|| for every Q in `grid` (any order; duplicates allowed).
inline std::vector<ScanResult> scan_min_grid(const std::vector<Enclosure>& encs, std::vector<std::uint64_t> grid,
                                             const ScanOptions& opt = {}) {
  if (encs.empty()) throw InvalidArgument("scan needs at least one coordinate");
  if (grid.empty()) return {};
  std::vector<std::uint64_t> order = grid;
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  if (order.front() < 1) throw InvalidArgument("Q must be >= 1");
  if (order.back() > opt.cap) throw BudgetExceeded(0, "Q exceeds the scan cap");
  const auto blocks = detail::make_blocks(order, opt.threads);
  std::vector<ScanResult> by_q(order.size());

  const bool all_points = std::all_of(encs.begin(), encs.end(), [](const Enclosure& e) { return e.lo() == e.hi(); });
  if (all_points) {
    std::vector<Rational> pts;
    for (const auto& e : encs) pts.push_back(e.lo());
    std::vector<detail::ExactPartial> parts(blocks.size());
    parallel_for(blocks.size(), opt.threads,
                 [&](std::size_t i) { parts[i] = detail::scan_block_exact(pts, blocks[i].begin, blocks[i].end); });
    detail::ExactPartial run;
    std::size_t bi = 0;
    for (std::size_t s = 0; s < order.size(); ++s) {
      for (; bi < blocks.size() && blocks[bi].segment == s; ++bi) run.merge(parts[bi]);
      by_q[s] = detail::finish(order[s], run.best_q, run.value, run.value, encs.size());
    }
  } else {
    std::vector<detail::FixedCoord> coords;
    for (const auto& e : encs) coords.push_back(detail::to_fixed(e));
    // q * width must stay below 2^126, i.e. q * (enclosure width) < 1/4.
    for (const auto& c : coords) {
      if (c.width != 0 && static_cast<u128>(order.back()) > (detail::kHalf >> 1) / c.width) {
        throw TooWide(order.back(), "enclosure too wide for Q");
      }
    }
    std::vector<detail::Partial> parts(blocks.size());
    parallel_for(blocks.size(), opt.threads,
                 [&](std::size_t i) { parts[i] = detail::scan_block_fixed(coords, blocks[i].begin, blocks[i].end); });
    detail::Partial run;
    std::size_t bi = 0;
    for (std::size_t s = 0; s < order.size(); ++s) {
      for (; bi < blocks.size() && blocks[bi].segment == s; ++bi) run.merge(parts[bi]);
      by_q[s] = detail::finish(order[s], run.best_q, detail::from_u128(run.lo), detail::from_u128(run.hi), encs.size());
    }
  }
  std::vector<ScanResult> out;
  for (std::uint64_t Q : grid) {
    auto it = std::lower_bound(order.begin(), order.end(), Q);
    out.push_back(by_q[static_cast<std::size_t>(it - order.begin())]);
  }
  return out;
}

inline ScanResult scan_min(const std::vector<Enclosure>& encs, std::uint64_t Q, const ScanOptions& opt = {}) {
  return scan_min_grid(encs, {Q}, opt).front();
}

/// Scan with on-demand refinement: each source is asked for width 1/(8Q), halving up to refine_cap times.
inline ScanResult scan_min(const std::vector<EnclosureSource>& sources, std::uint64_t Q, const ScanOptions& opt = {}) {
  const Rational limit(Integer(1), Integer(4) * Integer(static_cast<unsigned long>(Q)));
  std::vector<Enclosure> encs;
  for (const auto& src : sources) {
    Rational target(Integer(1), Integer(8) * Integer(static_cast<unsigned long>(Q)));
    Enclosure e = src(target);
    for (int i = 0; i < opt.refine_cap && e.width() >= limit; ++i) {
      target /= 2;
      e = src(target);
    }
    if (e.width() >= limit) throw TooWide(Q, "refinement budget exhausted");
    encs.push_back(std::move(e));
  }
  return scan_min(encs, Q, opt);
}

}  // namespace dirifs
