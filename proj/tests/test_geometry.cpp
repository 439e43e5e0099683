#include <gtest/gtest.h>

#include "rarebase/crystal.hpp"
#include "rarebase/geometry.hpp"

using namespace rarebase;

namespace {

Dyadic d(const char* s) { return Dyadic::parse(s); }

ProductSet2<Set1D> e2_explicit() {
  const std::vector<std::int64_t> js{6, 3};
  return {Interval1D(0, d("1/2")), build_C(js)};
}

}  // namespace

TEST(Rect2, Validation) {
  EXPECT_THROW(Rect2(0, 0, 0, 1), error);
  EXPECT_THROW(Rect2(0, 0, 1, -1), error);
  EXPECT_THROW(Box3(Rect2(0, 0, 1, 1), Interval1D(1, 1)), error);
}

TEST(Homothety, Examples) {
  Rect2 r(0, 0, 1, d("2^-6"));
  EXPECT_EQ(homothety(r, 1), r);
  EXPECT_EQ(homothety(r, d("1/2")), Rect2(0, 0, d("1/2"), d("2^-7")));
  Rect2 s(d("3/8"), d("1/16"), d("1/4"), d("3/4"));
  EXPECT_EQ(homothety(s, d("1/4")).area(), d("1/16") * s.area());
  EXPECT_EQ(homothety(homothety(s, d("1/2")), d("1/8")), homothety(s, d("1/16")));
  EXPECT_THROW(homothety(r, 0), error);
}

TEST(VTranslate, Examples) {
  Rect2 r(0, 0, 1, d("2^-6"));
  EXPECT_EQ(vtranslate(r, 0), r);
  EXPECT_EQ(vtranslate(r, d("2^-6")), Rect2(0, d("2^-6"), 1, d("2^-6")));
  EXPECT_EQ(vtranslate(vtranslate(r, d("1/8")), d("3/16")), vtranslate(r, d("5/16")));
}

TEST(RightHalf, Examples) {
  EXPECT_EQ(right_half(Rect2(0, 0, 1, 1)), Rect2(d("1/2"), 0, d("1/2"), 1));
  Rect2 r(d("1/8"), d("1/4"), d("1/2"), d("1/8"));
  EXPECT_EQ(right_half(r).area(), r.area().halve());
  EXPECT_EQ(right_half(right_half(Rect2(0, 0, 1, 1))), Rect2(d("3/4"), 0, d("1/4"), 1));
}

TEST(Averages, ContainmentGivesOne) {
  ProductSet2<Set1D> e{Interval1D(0, 1), Set1D{Interval1D(0, d("1/2"))}};
  EXPECT_EQ(avg2(e, Rect2(d("1/4"), d("1/8"), d("1/8"), d("1/8"))), Dyadic(1));
  Cylinder3<Set1D> z{e, Interval1D(0, 1)};
  Box3 b(Rect2(0, 0, d("1/2"), d("1/4")), Interval1D(0, d("1/2")));
  EXPECT_EQ(avg3(z, b), Dyadic(1));
}

TEST(Averages, ConstructionValues) {
  auto e = e2_explicit();
  EXPECT_EQ(avg2(e, Rect2(0, 0, 1, d("2^-6"))), d("1/4"));
  // R_{1,j,2,1} for the first translate j: anchor 0
  Rect2 sub(0, 0, d("1/2"), d("2^-7"));
  EXPECT_EQ(avg2(e, sub), Dyadic(1));
  Cylinder3<Set1D> z{e, Interval1D(0, 1)};
  EXPECT_EQ(avg3(z, Box3(sub, Interval1D(0, 4))), d("1/4"));
}

TEST(Averages, MassIdentityAndTranslationInvariance) {
  auto e = e2_explicit();
  Cylinder3<Set1D> z{e, Interval1D(0, 1)};
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) {
      Rect2 r(Dyadic(bigint(a), 5), Dyadic(bigint(b), 4), d("1/8"), d("1/64"));
      EXPECT_EQ(avg2(e, r) * r.area(), e.mass(r));
      EXPECT_LE(avg2(e, r), Dyadic(1));
      Box3 box(r, Interval1D(d("1/2"), d("5/2")));
      const Dyadic s = d("5/32");
      Cylinder3<Set1D> zs{{e.x1, translate(e.x2set, s)}, z.x3};
      EXPECT_EQ(avg3(z, box), avg3(zs, box.vtranslated(s)));
    }
}

TEST(Pieces, VolumeAndOverlap) {
  Rect2 r1(0, 0, 1, d("2^-6"));
  Rect2 sub = homothety(r1, d("1/2"));
  EXPECT_EQ(piece_volume(right_half(sub), Interval1D(2, 4)), d("2^-8"));
  Box3 p(right_half(sub), Interval1D(2, 4));
  EXPECT_THROW(disjoint_union_volume({p, p}), error);
  try {
    disjoint_union_volume({p, p});
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::overlap_detected);
  }
  Box3 q = p.vtranslated(d("2^-7"));
  EXPECT_EQ(disjoint_union_volume({p, q}), d("2^-7"));
}
