#include <gtest/gtest.h>

#include <random>

#include "dirifs/valuation.hpp"

using namespace dirifs;

TEST(Valuation, Examples) {
  EXPECT_EQ(vp(Integer(2), Rational(8)), Valuation::finite(3));
  EXPECT_EQ(vp(Integer(3), Rational(2, 9)), Valuation::finite(-2));
  EXPECT_TRUE(vp(Integer(5), Rational(0)).is_infinite());
  EXPECT_EQ(vp(Integer(5), Rational(0)).str(), "INFINITY");
}

TEST(Valuation, CompositeIsRejected) {
  EXPECT_THROW(vp(Integer(6), Rational(12)), InvalidPrime);
  EXPECT_THROW(vp(Integer(1), Rational(12)), InvalidPrime);
}

TEST(Valuation, InfinityIsLargest) {
  EXPECT_LT(Valuation::finite(1000), Valuation::infinity());
  EXPECT_EQ(min(Valuation::finite(2), Valuation::infinity()), Valuation::finite(2));
  EXPECT_THROW(Valuation::infinity().value(), InvalidArgument);
}

TEST(Valuation, Radical) {
  EXPECT_EQ(radical(Integer(12)), 6);
  EXPECT_EQ(radical(Integer(1)), 1);
  EXPECT_EQ(radical(Integer(360)), 30);
  EXPECT_THROW(radical(Integer(0)), InvalidArgument);
  EXPECT_EQ(max_multiplicity(Integer(360)), 3);
  EXPECT_EQ(max_multiplicity(Integer(1)), 0);
}

TEST(Valuation, SumRuleExamples) {
  EXPECT_EQ(vp_sum_rule(Integer(3), Rational(1, 3), Rational(1, 9)), Valuation::finite(-2));
  EXPECT_EQ(vp_sum_rule(Integer(2), Rational(1, 2), Rational(1, 2)), Valuation::finite(0));
  EXPECT_FALSE(min_rule_prediction(Integer(2), Rational(1, 2), Rational(1, 2)).has_value());
  EXPECT_EQ(vp_sum_rule(Integer(5), Rational(2, 5), Rational(3, 5)), Valuation::finite(0));
}

static Rational random_small(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-2000, 2000);
  std::uniform_int_distribution<long> den(1, 2000);
  return Rational(num(rng), den(rng));
}

TEST(Valuation, MinRuleProperty) {
  std::mt19937_64 rng(20240101);
  const long primes[] = {2, 3, 5, 7, 11};
  int checked = 0;
  for (int i = 0; i < 20000; ++i) {
    const Integer p(primes[i % 5]);
    const Rational a = random_small(rng);
    const Rational b = random_small(rng);
    auto pred = min_rule_prediction(p, a, b);
    if (!pred) continue;
    ++checked;
    ASSERT_EQ(vp_sum_rule(p, a, b), *pred) << a << " + " << b << " at p=" << p;
  }
  EXPECT_GE(checked, 10000);
}

TEST(Valuation, ShiftByPrimeProperty) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 10000; ++i) {
    const Integer p(i % 2 ? 3 : 2);
    const Rational x = random_small(rng);
    if (x.is_zero()) continue;
    ASSERT_EQ(vp(p, x * Rational(p)).value(), vp(p, x).value() + 1);
  }
}

TEST(Valuation, RadicalPowerBound) {
  const long pairs[][2] = {{3, 3}, {2, 3}, {4, 9}, {8, 3}, {12, 18}, {5, 7}, {16, 27}};
  for (const auto& pr : pairs) {
    const Integer bb = Integer(pr[0]) * pr[1];
    const auto mult = static_cast<std::uint64_t>(max_multiplicity(bb));
    for (std::uint64_t ell = 1; ell <= 4; ++ell) {
      ASSERT_TRUE(divides(ipow(bb, ell), ipow(radical(bb), 2 * ell * mult))) << bb << " ell=" << ell;
    }
  }
}

TEST(Valuation, FactorizeReassembles) {
  for (long n = 1; n < 3000; ++n) {
    Integer prod = 1;
    for (auto& [p, e] : factorize(Integer(n))) {
      ASSERT_TRUE(is_prime(p));
      prod *= ipow(p, static_cast<std::uint64_t>(e));
    }
    ASSERT_EQ(prod, n);
  }
}
