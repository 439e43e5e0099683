#include <gtest/gtest.h>

#include "rarebase/harness.hpp"
#include "rarebase/serialize.hpp"

using namespace rarebase;

namespace {

const BasisSpec kAll = BasisSpec::zygmund(ExponentSet::all());

}  // namespace

TEST(Verify, SmallestNontrivialCase) {
  auto r = verify_construction({6, 3}, kAll);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.first_failure(), nullptr);
}

TEST(Verify, SingleLayer) {
  auto r = verify_construction({2}, kAll);
  EXPECT_TRUE(r.pass()) << r.first_failure()->name;
}

TEST(Verify, CanonicalSchedulesThroughEight) {
  for (int n = 2; n <= 8; ++n) {
    auto r = verify_construction(default_schedule(n), kAll, Orientation::normal, 2);
    ASSERT_TRUE(r.pass()) << "N=" << n << " " << r.first_failure()->name;
  }
}

TEST(Verify, UngappedExponentsFailOnlyTheGap) {
  auto r = verify_construction({5, 3, 1}, kAll);
  ASSERT_FALSE(r.pass());
  EXPECT_EQ(r.first_failure()->name, "hypothesis.gap_condition");
  int failed = 0;
  for (const auto& c : r.checks) failed += !c.pass;
  EXPECT_EQ(failed, 1);
}

TEST(Verify, BadExponentsStopEarly) {
  auto r = verify_construction({3, 3}, kAll);
  ASSERT_EQ(r.checks.size(), 1u);
  EXPECT_EQ(r.checks[0].name, "exponents");
  EXPECT_FALSE(r.pass());
}

TEST(Verify, BasisWithoutExponentFailsWitness) {
  auto r = verify_construction({6, 3}, BasisSpec::zygmund(ExponentSet::list({0})));
  ASSERT_FALSE(r.pass());
  EXPECT_EQ(r.first_failure()->name, "witness.in_basis");
}

TEST(Verify, ThreadCountDoesNotChangeReport) {
  auto a = to_json(verify_construction(default_schedule(5), kAll, Orientation::normal, 1)).dump();
  auto b = to_json(verify_construction(default_schedule(5), kAll, Orientation::normal, 4)).dump();
  EXPECT_EQ(a, b);
}

TEST(Sweep, ExactGrowthValues) {
  auto rows = sweep(2, 8);
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0].w, Dyadic::parse("1/4"));
  EXPECT_EQ(rows[1].w, Dyadic::parse("3/4"));
  EXPECT_EQ(rows[2].w, Dyadic::parse("3/2"));
  for (const auto& r : rows) {
    EXPECT_EQ(r.w, r.reference);
    EXPECT_EQ(r.w_over_log2, rational(r.n - 1, 8 * r.n));
    EXPECT_EQ(r.alpha, Dyadic::pow2(-r.n));
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GT(rows[i].w_over_log2, rows[i - 1].w_over_log2);
    EXPECT_LT(rows[i].w_over_log2, rational(1, 8));
  }
}

TEST(Sweep, ThreadsAndCaps) {
  EXPECT_EQ(sweep_csv(sweep(2, 6, 1)), sweep_csv(sweep(2, 6, 3)));
  EXPECT_THROW(sweep(2, 10, 1, 9), error);
  EXPECT_THROW(sweep(3, 2), error);
}

TEST(Sweep, CsvShape) {
  auto csv = sweep_csv(sweep(2, 3));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kSweepCsvHeader);
  EXPECT_NE(csv.find("\n2,6 3,1/8,1/8,1/4,1/4,1/4,"), std::string::npos);
}

TEST(Cube, FixedEccentricityGrowth) {
  const std::vector<int> ms{1, 2, 3, 4, 5, 6};
  auto rep = cube_test(BasisSpec::fixed_eccentricity(0), ms);
  ASSERT_EQ(rep.rows.size(), ms.size());
  EXPECT_TRUE(rep.strictly_increasing());
  ASSERT_TRUE(rep.min_increment());
  EXPECT_GE(*rep.min_increment(), Dyadic::parse("15/8"));
  for (const auto& r : rep.rows) EXPECT_GE(r.level, Dyadic(1));
}

TEST(Cube, StrongDominatesRestricted) {
  CubeOptions o;
  o.height_max = 3;
  const std::vector<int> ms{1, 2, 3};
  auto fixed = cube_test(BasisSpec::fixed_eccentricity(0), ms, o);
  auto strong = cube_test(BasisSpec::strong(), ms, o);
  for (std::size_t i = 0; i < ms.size(); ++i) EXPECT_GE(strong.rows[i].level, fixed.rows[i].level);
}

TEST(Cube, RejectsInfiniteExponentSet) {
  EXPECT_THROW(cube_test(kAll, {1}), error);
}

TEST(Cube, CandidateCap) {
  CubeOptions o;
  o.max_candidates = 10;
  try {
    cube_test(BasisSpec::fixed_eccentricity(0), {1}, o);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::resource_cap);
  }
}

TEST(Fava, RatioBelowRecordedCap) {
  auto rep = cube_test(BasisSpec::fixed_eccentricity(0), {1, 2, 3, 4, 5, 6});
  auto probe = fava_probe(rep, rational(5, 2));
  EXPECT_TRUE(probe.within_cap);
  EXPECT_EQ(probe.max_ratio, rational(971, 448));
  EXPECT_FALSE(fava_probe(rep, rational(2)).within_cap);
}

TEST(Document, ConstructThenCheck) {
  for (int n = 2; n <= 6; ++n) {
    Construction c(default_schedule(n));
    auto doc = construction_document(c, build_certificate(c, kAll));
    auto back = json::parse(doc.dump());
    auto r = check_document(back);
    EXPECT_TRUE(r.pass()) << "N=" << n << " " << r.first_failure()->name;
  }
}

TEST(Document, TamperedMeasureIsCaught) {
  Construction c({6, 3});
  auto doc = construction_document(c, build_certificate(c, kAll));
  doc["certificate"]["measure"] = to_json(Dyadic::parse("1/4"));
  auto r = check_document(doc);
  ASSERT_FALSE(r.pass());
  EXPECT_EQ(r.first_failure()->name, "certificate.stated_measure");
}

TEST(Document, TamperedZIsCaught) {
  Construction c({6, 3});
  auto doc = construction_document(c, build_certificate(c, kAll));
  doc["exponents"] = json::array({7, 3});
  EXPECT_FALSE(check_document(doc).pass());
}

TEST(Document, WrongSchemaIsCaught) {
  Construction c({6, 3});
  auto doc = construction_document(c, build_certificate(c, kAll));
  doc["schema"] = "other/9";
  auto r = check_document(doc);
  ASSERT_FALSE(r.pass());
  EXPECT_EQ(r.first_failure()->name, "schema");
}

TEST(Document, Deterministic) {
  Construction c(default_schedule(4));
  auto a = construction_document(c, build_certificate(c, kAll)).dump();
  auto b = construction_document(c, build_certificate(c, kAll)).dump();
  EXPECT_EQ(a, b);
}

TEST(Document, DyadicRoundTrip) {
  for (const char* s : {"0", "1", "-3/2^7", "5/2^64", "12"}) {
    auto d = Dyadic::parse(s);
    EXPECT_EQ(dyadic_from_json(to_json(d)), d);
  }
  EXPECT_THROW(dyadic_from_json(json{{"m", "2"}, {"e", 1}}), error);
}
