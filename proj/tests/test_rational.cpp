#include <gtest/gtest.h>

#include <random>

#include "dirifs/rational.hpp"

using namespace dirifs;

TEST(Rational, ReducesOnConstruction) {
  Rational r(6, -4);
  EXPECT_EQ(r.num(), -3);
  EXPECT_EQ(r.den(), 2);
  EXPECT_EQ(r.str(), "-3/2");
  EXPECT_EQ(Rational(8, 4).str(), "2");
}

TEST(Rational, ZeroDenominatorThrows) {
  EXPECT_THROW(Rational(1, 0), InvalidArgument);
  EXPECT_THROW(Rational(1) / Rational(0), InvalidArgument);
}

TEST(Rational, ParseRoundTrip) {
  for (const char* s : {"0", "7", "-7", "73/81", "-2/9", "123456789012345678901234567891/1000"}) {
    EXPECT_EQ(Rational::parse(s).str(), s);
  }
  EXPECT_EQ(Rational::parse("4/6"), Rational(2, 3));
}

TEST(Rational, Ordering) {
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_GT(Rational(-1, 3), Rational(-1, 2));
  EXPECT_EQ(min(Rational(1, 3), Rational(1, 2)), Rational(1, 3));
  EXPECT_EQ(max(Rational(1, 3), Rational(1, 2)), Rational(1, 2));
  EXPECT_EQ(abs(Rational(-5, 7)), Rational(5, 7));
}

TEST(Rational, FloorCeil) {
  EXPECT_EQ(floor(Rational(7, 2)), 3);
  EXPECT_EQ(ceil(Rational(7, 2)), 4);
  EXPECT_EQ(floor(Rational(-7, 2)), -4);
  EXPECT_EQ(ceil(Rational(-7, 2)), -3);
  EXPECT_EQ(floor(Rational(5)), 5);
}

TEST(Rational, Powers) {
  EXPECT_EQ(ipow(3, 4), 81);
  EXPECT_EQ(rpow(Rational(2, 3), 3), Rational(8, 27));
  EXPECT_EQ(rpow(Rational(2, 3), -2), Rational(9, 4));
  EXPECT_EQ(rpow(Rational(5), 0), Rational(1));
}

// Oracle: repeated multiplication.
static long floor_log_oracle(long base, const Rational& x) {
  long e = 0;
  Rational p = 1;
  if (p <= x) {
    while (p * Rational(base) <= x) {
      p *= Rational(base);
      ++e;
    }
  } else {
    while (p > x) {
      p /= Rational(base);
      --e;
    }
  }
  return e;
}

TEST(Rational, FloorLogMatchesOracle) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> num(1, 1'000'000);
  std::uniform_int_distribution<long> base(2, 12);
  for (int i = 0; i < 2000; ++i) {
    const long b = base(rng);
    const Rational x(num(rng), num(rng));
    ASSERT_EQ(floor_log(Integer(b), x), floor_log_oracle(b, x)) << b << " " << x;
  }
  EXPECT_EQ(floor_log(Integer(3), Rational(ipow(3, 19), Integer(1000))), 12);
  EXPECT_EQ(floor_log(Integer(3), Rational(ipow(3, 500))), 500);
  EXPECT_EQ(floor_log(Integer(3), Rational(ipow(3, 500) - 1)), 499);
}

TEST(Rational, RootBracketIsCertified) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> pick(1, 1'000'000'000);
  for (int i = 0; i < 500; ++i) {
    const Integer n = Integer(pick(rng)) * pick(rng);
    for (unsigned long m : {2UL, 3UL, 5UL}) {
      auto [lo, hi] = root_bracket(n, m);
      ASSERT_LE(rpow(lo, static_cast<long>(m)), Rational(n));
      ASSERT_GE(rpow(hi, static_cast<long>(m)), Rational(n));
      ASSERT_LE(hi - lo, Rational(Integer(1), ipow(2, 63)));
    }
  }
  auto [lo, hi] = root_bracket(Integer(27), 3);
  EXPECT_EQ(lo, Rational(3));
  EXPECT_EQ(hi, Rational(3));
  EXPECT_EQ(iroot(Integer(26), 3), 2);
}

TEST(Rational, ExactArithmeticProperties) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> pick(-1'000'000'000, 1'000'000'000);
  for (int i = 0; i < 5000; ++i) {
    const Rational a(Integer(pick(rng)) * pick(rng), Integer(std::abs(pick(rng))) + 1);
    Rational b(Integer(pick(rng)) * pick(rng), Integer(std::abs(pick(rng))) + 1);
    ASSERT_EQ((a + b) - b, a);
    if (!b.is_zero()) {
      ASSERT_EQ((a * b) / b, a);
    }
  }
}

TEST(Rational, LogAndRationalBounds) {
  EXPECT_NEAR(log_integer(ipow(3, 100000)), 100000 * std::log(3.0), 1e-6);
  EXPECT_NEAR(log_rational(Rational(1, 8)), -std::log(8.0), 1e-12);
  EXPECT_LE(rational_floor(0.1234567), Rational(1234567, 10000000));
  EXPECT_GE(rational_ceil(0.1234567), Rational(1234567, 10000000));
  EXPECT_THROW(log_integer(Integer(0)), InvalidArgument);
}
