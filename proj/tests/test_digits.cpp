#include <random>

#include <gtest/gtest.h>

#include "rarebase/digits.hpp"

using namespace rarebase;

namespace {

DigitSet random_digits(std::mt19937_64& rng, std::uint64_t max_pos) {
  std::vector<DigitConstraint> c;
  int n = static_cast<int>(rng() % 4);
  for (int i = 0; i < n; ++i) c.push_back({rng() % max_pos + 1, static_cast<int>(rng() % 2)});
  return DigitSet(std::move(c));
}

}  // namespace

TEST(DigitSet, ClosedFormMeasure) {
  DigitSet s({{2, 0}, {5, 1}});
  EXPECT_EQ(s.measure(), Dyadic::pow2(-2));
  EXPECT_EQ(s.to_set1d(1 << 10).measure(), s.measure());
  EXPECT_TRUE(DigitSet({{1, 0}, {1, 1}}).empty());
  EXPECT_EQ(DigitSet({{1, 0}, {1, 1}}).measure(), Dyadic(0));
}

TEST(DigitSet, MembershipMatchesExpansion) {
  DigitSet s({{1, 1}, {3, 0}});
  Set1D e = s.to_set1d(1 << 10);
  for (int m = 0; m < 64; ++m) {
    Dyadic t(bigint(m), 6);
    EXPECT_EQ(s.contains(t), e.contains(t)) << m;
  }
}

TEST(DigitSet, MeasureWithinAgainstExpansion) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    DigitSet s = random_digits(rng, 7);
    Set1D e = s.to_set1d(1 << 12);
    for (int w = 0; w < 10; ++w) {
      auto a = static_cast<long long>(rng() % 300) - 20, b = static_cast<long long>(rng() % 300) - 20;
      if (a > b) std::swap(a, b);
      Interval1D win(Dyadic(bigint(a), 8), Dyadic(bigint(b), 8));
      EXPECT_EQ(s.measure_within(win), e.measure_within(win));
    }
  }
}

TEST(DigitSet, ExpansionCap) {
  DigitSet s({{40, 0}});
  EXPECT_THROW(s.to_set1d(1 << 10), error);
}

TEST(AnchorLattice, CountAndEnumerate) {
  AnchorLattice lat(4, {{2, 1}});
  EXPECT_EQ(lat.count(), 8);
  auto all = lat.enumerate(64);
  ASSERT_EQ(all.size(), 8u);
  EXPECT_EQ(all.front(), lat.representative());
  for (std::size_t i = 1; i < all.size(); ++i) EXPECT_LT(all[i - 1], all[i]);
  for (const auto& b : all) EXPECT_TRUE(lat.contains(b));
  EXPECT_FALSE(lat.contains(Dyadic::pow2(-1)));
  EXPECT_THROW(AnchorLattice(2, {{3, 0}}), error);
}

TEST(AnchorLattice, IntersectsMatchesEnumeration) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    auto make = [&] {
      std::uint64_t q = rng() % 5;
      std::vector<DigitConstraint> f;
      for (std::uint64_t p = 1; p <= q; ++p)
        if (rng() % 2) f.push_back({p, static_cast<int>(rng() % 2)});
      return AnchorLattice(q, f);
    };
    AnchorLattice a = make(), b = make();
    bool common = false;
    for (const auto& x : a.enumerate(64))
      if (b.contains(x)) common = true;
    EXPECT_EQ(a.intersects(b), common);
  }
}

TEST(DigitSet, StatusOnLatticeImpliesTranslatedWindows) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    DigitSet s = random_digits(rng, 6);
    std::uint64_t q = rng() % 5;
    std::vector<DigitConstraint> f;
    for (const auto& c : s.constraints())
      if (c.position <= q && rng() % 3) f.push_back({c.position, static_cast<int>(rng() % 2)});
    AnchorLattice lat(q, f);
    auto status = s.status_on(lat);
    if (!status) continue;
    Set1D e = s.to_set1d(1 << 12);
    const Dyadic w = lat.spacing();
    const Dyadic r = lat.representative();
    Set1D ref = translate(restrict(e, {r, r + w}), -r);
    EXPECT_EQ(ref.empty(), !*status);
    for (const auto& b : lat.enumerate(64)) {
      EXPECT_EQ(translate(restrict(e, {b, b + w}), -b), ref);
      EXPECT_TRUE(s.shift_preserves(r, q, b - r));
    }
  }
}
