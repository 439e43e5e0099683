#include <random>

#include <gtest/gtest.h>

#include "rarebase/dyadic.hpp"

using namespace rarebase;

namespace {

Dyadic d(const char* s) { return Dyadic::parse(s); }
Interval1D iv(const char* a, const char* b) { return {d(a), d(b)}; }

}  // namespace

TEST(Dyadic, CanonicalForm) {
  Dyadic x(bigint(12), 4);  // 12/16 = 3/4
  EXPECT_EQ(x.mantissa(), 3);
  EXPECT_EQ(x.exponent(), 2u);
  Dyadic z(bigint(0), 9);
  EXPECT_EQ(z.exponent(), 0u);
  EXPECT_EQ(Dyadic(bigint(8), 2), Dyadic(2));
  EXPECT_EQ(Dyadic(bigint(-6), 2).mantissa(), -3);
}

TEST(Dyadic, Arithmetic) {
  EXPECT_EQ(d("1/4") + d("1/4"), d("1/2"));
  EXPECT_EQ(d("3/8") - d("1/2"), d("-1/8"));
  EXPECT_EQ(d("3/8") * d("2^-3"), d("3/64"));
  EXPECT_EQ(d("5/16").halve(), d("5/32"));
  EXPECT_EQ(d("5/16").twice(), d("5/8"));
  EXPECT_EQ(Dyadic::divide(d("3/4"), d("3/8")), Dyadic(2));
  EXPECT_THROW(Dyadic::divide(1, 3), error);
}

TEST(Dyadic, ParseForms) {
  EXPECT_EQ(d("0.375"), Dyadic(bigint(3), 3));
  EXPECT_EQ(d("2^-10"), Dyadic::pow2(-10));
  EXPECT_EQ(d("3/2^5"), Dyadic(bigint(3), 5));
  EXPECT_EQ(d("-7"), Dyadic(-7));
  EXPECT_THROW(d("0.1"), error);
  EXPECT_THROW(d("abc"), error);
  EXPECT_EQ(d("5/8").to_string(), "5/8");
}

TEST(Dyadic, FloorDigitsAndLog) {
  EXPECT_EQ(d("-1/4").floor(), -1);
  EXPECT_EQ(d("9/4").floor(), 2);
  EXPECT_EQ(d("5/8").digit(1), 1);
  EXPECT_EQ(d("5/8").digit(2), 0);
  EXPECT_EQ(d("5/8").digit(3), 1);
  EXPECT_EQ(d("1/64").log2_exact(), -6);
  EXPECT_FALSE(d("3/64").log2_exact().has_value());
}

TEST(Dyadic, LargeExponents) {
  Dyadic tiny = Dyadic::pow2(-200);
  Dyadic sum = tiny + Dyadic(1);
  EXPECT_EQ(sum - Dyadic(1), tiny);
  EXPECT_EQ(sum.exponent(), 200u);
}

TEST(Set1D, MeasureTrivial) {
  EXPECT_EQ(Set1D{}.measure(), Dyadic(0));
  EXPECT_EQ(Set1D{iv("0", "1")}.measure(), Dyadic(1));
}

TEST(Set1D, IntersectExamples) {
  Set1D s{iv("0", "1/8"), iv("1/2", "5/8")};
  EXPECT_EQ(intersect(s, Set1D{iv("0", "1")}), s);
  EXPECT_EQ(intersect(Set1D{iv("0", "1/2")}, Set1D{iv("1/4", "3/4")}), Set1D{iv("1/4", "1/2")});
}

TEST(Set1D, TranslateScaleUnion) {
  EXPECT_EQ(translate(Set1D{iv("0", "1/4")}, d("1/2")), Set1D{iv("1/2", "3/4")});
  EXPECT_EQ(scale(Set1D{iv("0", "1/2")}, d("1/2")), Set1D{iv("0", "1/4")});
  Set1D u = unite(Set1D{iv("0", "1/4")}, Set1D{iv("1/4", "1/2")});
  ASSERT_EQ(u.size(), 1u);
  EXPECT_EQ(u, Set1D{iv("0", "1/2")});
  EXPECT_THROW(scale(u, 0), error);
  EXPECT_THROW(scale(u, -1), error);
}

TEST(Set1D, RestrictAndWithin) {
  Set1D s{iv("0", "1/4"), iv("1/2", "3/4")};
  EXPECT_EQ(restrict(s, iv("1/8", "5/8")), (Set1D{iv("1/8", "1/4"), iv("1/2", "5/8")}));
  EXPECT_EQ(s.measure_within(iv("1/8", "5/8")), d("1/4"));
  EXPECT_TRUE(s.contains(0));
  EXPECT_FALSE(s.contains(d("1/4")));
}

TEST(Set1D, InclusionExclusionRandom) {
  std::mt19937_64 rng(7);
  auto random_set = [&] {
    std::vector<Interval1D> v;
    int n = static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
      auto a = static_cast<long long>(rng() % 64), b = static_cast<long long>(rng() % 64);
      if (a > b) std::swap(a, b);
      v.emplace_back(Dyadic(bigint(a), 6), Dyadic(bigint(b), 6));
    }
    return Set1D(std::move(v));
  };
  for (int t = 0; t < 500; ++t) {
    Set1D a = random_set(), b = random_set();
    EXPECT_EQ(a.measure() + b.measure(), unite(a, b).measure() + intersect(a, b).measure());
    Dyadic delta = Dyadic(bigint(static_cast<long long>(rng() % 7 + 1)), 2);
    Set1D sc = scale(a, delta);
    EXPECT_EQ(sc.measure(), delta * a.measure());
    EXPECT_EQ(Set1D(sc.intervals()), sc);
    Set1D tr = translate(a, d("3/128"));
    EXPECT_EQ(Set1D(tr.intervals()), tr);
  }
}

TEST(Set1D, CanonicalMerge) {
  Set1D s{iv("1/2", "3/4"), iv("0", "1/4"), iv("1/4", "1/2"), iv("1/8", "1/8")};
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.intervals()[0], iv("0", "3/4"));
}

TEST(Interval1D, Validation) {
  EXPECT_THROW(iv("1/2", "1/4"), error);
  EXPECT_FALSE(overlaps(iv("0", "1/2"), iv("1/2", "1")));
  EXPECT_TRUE(overlaps(iv("0", "1/2"), iv("1/4", "1")));
}
