#include <gtest/gtest.h>

#include <random>

#include "dirifs/verification.hpp"

using namespace dirifs;

namespace {

IfsPair cantor() { return IfsPair(AffineMap::reciprocal(3, 0), AffineMap::reciprocal(3, Rational(2, 3))); }

Construction small() { return Construction::build({cantor(), 3, Rational(1, 4), {3, 9, 90}}); }

Rational frac_dist_oracle(const Rational& y) {
  Integer r = y.num() % y.den();
  if (r < 0) r += y.den();
  const Rational f(r, y.den());
  return min(f, Rational(1) - f);
}

}  // namespace

TEST(Dist, Examples) {
  std::vector<Enclosure> pts = {Enclosure::point(Rational(1, 3)), Enclosure::point(Rational(2, 3))};
  DistBracket d = dist_to_integers(Integer(3), pts);
  EXPECT_EQ(d.lo, Rational(0));
  EXPECT_EQ(d.hi, Rational(0));
  DistBracket h = dist_to_integer(Integer(1), Enclosure::point(Rational(1, 2)));
  EXPECT_EQ(h.lo, Rational(1, 2));
  EXPECT_EQ(h.hi, Rational(1, 2));
  const Rational w(1, 1'000'000'000);
  DistBracket n = dist_to_integer(Integer(1), Enclosure(Rational(1, 4) - w / 2, Rational(1, 4) + w / 2));
  EXPECT_EQ(n.lo, Rational(1, 4) - w / 2);
  EXPECT_EQ(n.hi, Rational(1, 4) + w / 2);
  EXPECT_THROW(dist_to_integer(Integer(0), pts[0]), InvalidArgument);
  EXPECT_THROW(dist_to_integer(Integer(4), Enclosure(Rational(0), Rational(1, 16))), TooWide);
}

TEST(Dist, BracketsSampledPointsProperty) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> num(-5000, 5000);
  std::uniform_int_distribution<long> wid(1, 400);
  std::uniform_int_distribution<long> qd(1, 60);
  for (int i = 0; i < 3000; ++i) {
    const Rational lo(num(rng), 997);
    const Rational hi = lo + Rational(wid(rng), 997 * 1000);
    const Integer q(qd(rng));
    DistBracket d = dist_to_integer(q, Enclosure(lo, hi));
    ASSERT_LE(d.lo, d.hi);
    for (int t = 0; t <= 8; ++t) {
      Rational x = lo + (hi - lo) * Rational(t, 8);
      Rational v = frac_dist_oracle(Rational(q) * x);
      ASSERT_LE(d.lo, v);
      ASSERT_GE(d.hi, v);
    }
    // The bounds are attained at the ends or at a tent vertex inside.
    Rational a = frac_dist_oracle(Rational(q) * lo);
    Rational b = frac_dist_oracle(Rational(q) * hi);
    ASSERT_TRUE(d.hi == max(a, b) || d.hi == Rational(1, 2));
    ASSERT_TRUE(d.lo == min(a, b) || d.lo == Rational(0));
  }
}

TEST(UpperBound, IntegralityAndBoundedRatios) {
  Construction c = small();
  UpperBoundReport rep = upper_bound_check(c, 1, 12);
  EXPECT_TRUE(rep.case1_integrality);
  EXPECT_TRUE(rep.case2_integrality);
  EXPECT_GE(rep.samples.size(), 5u);
  for (const auto& s : rep.samples) {
    EXPECT_LE(s.theta_lo, s.theta_hi);
    EXPECT_EQ(s.q, s.case_id == 1 ? c.S() * c.P(1, 1) : c.S() * c.P(3, 1));
    EXPECT_LE(s.q, s.Q);
  }
  EXPECT_LE(rep.ratio_max_lo, rep.ratio_max_hi);
  EXPECT_THROW(upper_bound_check(c, c.kmax()), NeedMoreDepth);
  EXPECT_THROW(upper_bound_check(c, 1, std::vector<Integer>{Integer(1)}), InvalidArgument);
}

TEST(LowerBound, SmallInstanceIsCertified) {
  Construction c = small();
  LowerBoundReport rep = lower_bound_scan(c, 1);
  EXPECT_EQ(rep.Q, ipow(3, 11).get_ui() - 1);
  EXPECT_TRUE(rep.structural_ok);
  EXPECT_EQ(rep.structural_checked, rep.Q);
  EXPECT_GT(rep.c_prime_lo, Rational(0));
  EXPECT_EQ(rep.c_prime_lo, rep.scan.dist_lo * Rational(c.P(1, 1)));
  ScanOptions tight;
  tight.cap = 1000;
  EXPECT_THROW(lower_bound_scan(c, 1, tight), BudgetExceeded);
}

TEST(LowerBound, StructuralStepAgreesWithDirectComputation) {
  Construction c = small();
  const Integer S = c.S();
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<unsigned long> qd(1, ipow(3, 11).get_ui() - 1);
  for (int i = 0; i < 2000; ++i) {
    Integer q(qd(rng));
    int h = 0;
    while (h < 3 && divides(c.P(h + 1, 1), q)) ++h;
    const ApproximantRow& row = c.row(h + 1, 1);
    const Rational d = frac_dist_oracle(Rational(q) * row.value);
    const bool expect = d >= Rational(c.P(h, 1), S * c.P(h + 1, 1));
    ASSERT_EQ(detail::structural_step_holds(c, 1, q, S), expect);
  }
}

TEST(Liouville, WitnessesAreCertifiedAndGrow) {
  Construction c = Construction::build({cantor(), 3, Rational(1, 4), {12, 120, 4000, 400000}});
  auto ws = liouville_witnesses(c, 3);
  ASSERT_EQ(ws.size(), 3u);
  for (std::size_t i = 0; i < ws.size(); ++i) {
    EXPECT_EQ(ws[i].q, c.S() * c.P(3, ws[i].k));
    EXPECT_EQ(ws[i].dist_hi, dist_to_integers(ws[i].q, c.xi_enclosures()).hi);
    EXPECT_GT(ws[i].dist_hi, Rational(0));
    // Double-precision cross-check where the values are representable.
    const double e = -std::log(ws[i].dist_hi.to_double()) / std::log(ws[i].q.get_d());
    if (std::isfinite(e)) {
      EXPECT_LE(ws[i].exponent_lo.to_double(), e);
    }
    if (i > 0) {
      EXPECT_GT(ws[i].exponent_lo, ws[i - 1].exponent_lo);
    }
  }
  EXPECT_EQ(liouville_witnesses(c, 10).size(), 3u);
}

TEST(SlopeFit, RecoversKnownPowerLaw) {
  std::vector<DirichletSample> samples;
  for (long e = 1; e <= 8; ++e) {
    Integer Q = ipow(10, static_cast<std::uint64_t>(e));
    Rational D(Integer(1), ipow(10, static_cast<std::uint64_t>(e)));  // Q^{-1}
    samples.push_back({Q, D, D});
  }
  SlopeBracket b = omega_hat_fit(samples);
  EXPECT_LE(b.lo, Rational(-1));
  EXPECT_GE(b.hi, Rational(-1));
  EXPECT_LT(b.hi - b.lo, Rational(1, 1'000'000));
  samples[3].lo = samples[3].lo / 4;
  SlopeBracket wider = omega_hat_fit(samples);
  EXPECT_LE(wider.lo, b.lo);
}

TEST(SlopeFit, Errors) {
  std::vector<DirichletSample> few(4, {Integer(10), Rational(1, 10), Rational(1, 10)});
  EXPECT_THROW(omega_hat_fit(few), InvalidArgument);
  std::vector<DirichletSample> narrow;
  for (long q = 10; q < 15; ++q) narrow.push_back({Integer(q), Rational(1, q), Rational(1, q)});
  EXPECT_THROW(omega_hat_fit(narrow), InvalidArgument);
  std::vector<DirichletSample> exact;
  for (long e = 1; e <= 5; ++e) exact.push_back({ipow(10, static_cast<std::uint64_t>(e)), Rational(0), Rational(0)});
  EXPECT_THROW(omega_hat_fit(exact), ExactRationalPoint);
  for (auto& s : exact) s.hi = Rational(1, 5);
  EXPECT_THROW(omega_hat_fit(exact), TooWide);
}

TEST(StructuralBracket, ContainsScannedValue) {
  Construction c = small();
  const WitnessTable t = WitnessTable::build(c);
  for (std::uint64_t Q : {100ull, 2000ull, 50'000ull, 177'146ull}) {
    DirichletSample s = structural_dirichlet_bracket(c, Integer(static_cast<unsigned long>(Q)), t);
    ScanResult r = scan_min(c.xi_enclosures(), Q);
    EXPECT_LE(s.lo, r.dist_hi) << Q;
    EXPECT_GE(s.hi, r.dist_lo) << Q;
    EXPECT_LE(s.lo, s.hi);
  }
  EXPECT_THROW(structural_dirichlet_bracket(c, c.P(3, c.kmax())), NeedMoreDepth);
  auto grid = critical_grid(c, 1, 2);
  ASSERT_EQ(grid.size(), 4u);
  EXPECT_EQ(grid[1], c.P(3, 1) - 1);
}

TEST(Intrinsic, DetectsCorruption) {
  Construction c = small();
  for (const auto& row : c.rows()) EXPECT_TRUE(intrinsic_check(row, c.schedule(), c.ifs()));
  EXPECT_EQ(c.row(2, 0).value, c.r_over_s());
  ApproximantRow bad = c.row(2, 1);
  bad.value += Rational(Integer(1), bad.q() * 2);
  EXPECT_FALSE(intrinsic_check(bad, c.schedule(), c.ifs()));
  ApproximantRow out_of_range = c.row(1, 1);
  out_of_range.k = 99;
  EXPECT_FALSE(intrinsic_check(out_of_range, c.schedule(), c.ifs()));
}

TEST(Relations, FindsAndRejects) {
  std::vector<Enclosure> pts = {Enclosure::point(Rational(1, 2)), Enclosure::point(Rational(1, 3))};
  auto rel = relation_search(pts, 6);
  ASSERT_TRUE(rel.has_value());
  const std::vector<long>& a = *rel;
  EXPECT_EQ(Rational(a[0]) + Rational(a[1]) / 2 + Rational(a[2]) / 3, Rational(0));
  EXPECT_EQ(a, (std::vector<long>{-1, 2, 0}));
  EXPECT_THROW(relation_search(pts, 0), InvalidArgument);
  EXPECT_THROW(relation_search({Enclosure(Rational(0), Rational(1, 10))}, 2), TooWide);

  // sqrt(2)-like bracket: no small relation with 1.
  Rational lo(14142135623, 10'000'000'000);
  std::vector<Enclosure> irr = {Enclosure(lo, lo + Rational(1, 10'000'000'000))};
  EXPECT_FALSE(relation_search(irr, 20).has_value());
}

TEST(Relations, HeightOrderProperty) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<long> coef(-3, 3);
  std::uniform_int_distribution<long> den(2, 9);
  for (int i = 0; i < 100; ++i) {
    std::vector<Enclosure> pts = {Enclosure::point(Rational(coef(rng), den(rng))),
                                  Enclosure::point(Rational(coef(rng), den(rng)))};
    auto rel = relation_search(pts, 12);
    ASSERT_TRUE(rel.has_value());
    const auto& a = *rel;
    ASSERT_NE(a, (std::vector<long>{0, 0, 0}));
    Rational sum = Rational(a[0]) + Rational(a[1]) * pts[0].lo() + Rational(a[2]) * pts[1].lo();
    ASSERT_EQ(sum, Rational(0));
    long h = 0;
    for (long v : a) h = std::max(h, std::labs(v));
    auto lower = relation_search(pts, h - 1 > 0 ? h - 1 : 1);
    if (h > 1) {
      ASSERT_FALSE(lower.has_value());
    }
  }
}

TEST(Diagonal, CertifiesDirichletBound) {
  EXPECT_THROW(diagonal_demo(1, {10}), InvalidArgument);
  DiagonalReport rep = diagonal_demo(2, {10, 100, 1000, 10'000});
  EXPECT_TRUE(rep.all_certified);
  for (const auto& p : rep.points) {
    EXPECT_LE(p.q, p.Q);
    EXPECT_LE(p.dist_hi, Rational(Integer(1), Integer(static_cast<unsigned long>(p.Q))));
  }
  DiagonalReport rational = diagonal_demo(3, {10, 100}, Enclosure::point(Rational(3, 7)));
  EXPECT_EQ(rational.points[0].dist_hi, Rational(0));
  EXPECT_EQ(rational.points[0].q, 7u);
  EXPECT_EQ(diagonal_address(3).str(), "GFGFFGFFF");
}
