#pragma once

// JSON encodings. Dyadics are {"m": "<decimal mantissa>", "e": <exponent>};
// everything else is built from that.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rarebase/basis.hpp"
#include "rarebase/crystal.hpp"
#include "rarebase/digits.hpp"
#include "rarebase/dyadic.hpp"
#include "rarebase/error.hpp"
#include "rarebase/geometry.hpp"
#include "rarebase/harness.hpp"

namespace rarebase {

using json = nlohmann::json;

inline constexpr const char* kSchema = "rarebase/1";

namespace detail {

[[noreturn]] inline void bad_doc(const std::string& what) { throw error(errc::parse_error, "malformed document: " + what); }

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad_doc(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace detail

// ---- scalars and sets --------------------------------------------------------

inline json to_json(const Dyadic& d) { return {{"m", d.mantissa().str()}, {"e", d.exponent()}}; }

inline Dyadic dyadic_from_json(const json& j) {
  const json& m = detail::field(j, "m");
  const json& e = detail::field(j, "e");
  if (!m.is_string() || !e.is_number_unsigned()) detail::bad_doc("dyadic needs string m and unsigned e");
  const std::string ms = m.get<std::string>();
  Dyadic mant;
  try {
    mant = Dyadic::parse(ms);
  } catch (const error&) {
    detail::bad_doc("bad mantissa '" + ms + "'");
  }
  if (mant.exponent() != 0) detail::bad_doc("mantissa must be an integer");
  const auto ev = e.get<std::uint64_t>();
  Dyadic d(mant.mantissa(), ev);
  if (d.exponent() != ev) detail::bad_doc("dyadic not in canonical form");
  return d;
}

inline json to_json(const Interval1D& iv) { return json::array({to_json(iv.lo), to_json(iv.hi)}); }

inline Interval1D interval_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) detail::bad_doc("interval must be [lo, hi]");
  try {
    return {dyadic_from_json(j[0]), dyadic_from_json(j[1])};
  } catch (const error& e) {
    if (e.code() == errc::parse_error) throw;
    detail::bad_doc(e.what());
  }
}

inline json to_json(const Set1D& s) {
  json a = json::array();
  for (const auto& iv : s.intervals()) a.push_back(to_json(iv));
  return a;
}

inline Set1D set1d_from_json(const json& j) {
  if (!j.is_array()) detail::bad_doc("set must be an array of intervals");
  std::vector<Interval1D> v;
  for (const auto& x : j) v.push_back(interval_from_json(x));
  Set1D s(v);
  if (s.intervals() != v) detail::bad_doc("set is not canonical");
  return s;
}

inline json digits_json(const std::vector<DigitConstraint>& c) {
  json a = json::array();
  for (const auto& x : c) a.push_back(json::array({x.position, x.bit}));
  return a;
}

inline std::vector<DigitConstraint> digits_from_json(const json& j) {
  if (!j.is_array()) detail::bad_doc("digits must be an array");
  std::vector<DigitConstraint> c;
  for (const auto& x : j) {
    if (!x.is_array() || x.size() != 2 || !x[0].is_number_unsigned() || !x[1].is_number_integer())
      detail::bad_doc("digit must be [position, bit]");
    c.push_back({x[0].get<std::uint64_t>(), x[1].get<int>()});
  }
  return c;
}

inline json to_json(const DigitSet& s) { return {{"digits", digits_json(s.constraints())}}; }

inline DigitSet digitset_from_json(const json& j) {
  try {
    return DigitSet(digits_from_json(detail::field(j, "digits")));
  } catch (const error& e) {
    if (e.code() == errc::parse_error) throw;
    detail::bad_doc(e.what());
  }
}

inline json to_json(const AnchorLattice& l) {
  return {{"scale", l.scale_exponent()}, {"fixed", digits_json(l.fixed())}};
}

inline AnchorLattice lattice_from_json(const json& j) {
  const json& q = detail::field(j, "scale");
  if (!q.is_number_unsigned()) detail::bad_doc("lattice scale must be unsigned");
  try {
    return AnchorLattice(q.get<std::uint64_t>(), digits_from_json(detail::field(j, "fixed")));
  } catch (const error& e) {
    if (e.code() == errc::parse_error) throw;
    detail::bad_doc(e.what());
  }
}

// ---- geometry ----------------------------------------------------------------

inline json to_json(const Rect2& r) {
  return {{"anchor", json::array({to_json(r.x1), to_json(r.x2)})},
          {"sides", json::array({to_json(r.d1), to_json(r.d2)})}};
}

inline Rect2 rect_from_json(const json& j) {
  const json& a = detail::field(j, "anchor");
  const json& s = detail::field(j, "sides");
  if (!a.is_array() || a.size() != 2 || !s.is_array() || s.size() != 2) detail::bad_doc("rect needs anchor and sides pairs");
  try {
    return {dyadic_from_json(a[0]), dyadic_from_json(a[1]), dyadic_from_json(s[0]), dyadic_from_json(s[1])};
  } catch (const error& e) {
    if (e.code() == errc::parse_error) throw;
    detail::bad_doc(e.what());
  }
}

inline json to_json(const Box3& b) {
  json j = to_json(b.base);
  j["x3"] = to_json(b.x3);
  return j;
}

inline Box3 box_from_json(const json& j) {
  try {
    return {rect_from_json(j), interval_from_json(detail::field(j, "x3"))};
  } catch (const error& e) {
    if (e.code() == errc::parse_error) throw;
    detail::bad_doc(e.what());
  }
}

template <MeasurableSet1D S>
json to_json(const ProductSet2<S>& p) {
  return {{"x1", to_json(p.x1)}, {"x2set", to_json(p.x2set)}};
}

template <MeasurableSet1D S>
json to_json(const Cylinder3<S>& c) {
  json j = to_json(c.base);
  j["x3"] = to_json(c.x3);
  return j;
}

/// A cylinder whose x2set is either a digit set {"digits": ...} or an
/// interval list.
inline bool cylinder_is_digits(const json& j) { return detail::field(j, "x2set").is_object(); }

inline Cylinder3<DigitSet> digit_cylinder_from_json(const json& j) {
  return {{interval_from_json(detail::field(j, "x1")), digitset_from_json(detail::field(j, "x2set"))},
          interval_from_json(detail::field(j, "x3"))};
}

inline Cylinder3<Set1D> set_cylinder_from_json(const json& j) {
  return {{interval_from_json(detail::field(j, "x1")), set1d_from_json(detail::field(j, "x2set"))},
          interval_from_json(detail::field(j, "x3"))};
}

// ---- certificate ---------------------------------------------------------------

inline json to_json(const CertifiedPiece& p) {
  return {{"region", to_json(p.region)}, {"witness", to_json(p.witness)},
          {"claimed_average", to_json(p.claimed_average)}, {"k", p.k}, {"anchor", to_json(p.anchor)},
          {"l", p.l}, {"i", p.i}};
}

inline CertifiedPiece piece_from_json(const json& j) {
  CertifiedPiece p;
  p.region = box_from_json(detail::field(j, "region"));
  p.witness = box_from_json(detail::field(j, "witness"));
  p.claimed_average = dyadic_from_json(detail::field(j, "claimed_average"));
  p.anchor = dyadic_from_json(detail::field(j, "anchor"));
  const json& k = detail::field(j, "k");
  const json& l = detail::field(j, "l");
  const json& i = detail::field(j, "i");
  if (!k.is_number_integer() || !l.is_number_integer() || !i.is_number_integer()) detail::bad_doc("piece indices must be integers");
  p.k = k.get<int>();
  p.l = l.get<int>();
  p.i = i.get<std::int64_t>();
  return p;
}

inline json to_json(const PieceFamily& f) {
  return {{"representative", to_json(f.representative)}, {"anchors", to_json(f.anchors)}, {"count", f.count().str()}};
}

inline PieceFamily family_from_json(const json& j) {
  return {piece_from_json(detail::field(j, "representative")), lattice_from_json(detail::field(j, "anchors"))};
}

inline json exponents_json(const std::vector<std::int64_t>& js) {
  json a = json::array();
  for (auto x : js) a.push_back(x);
  return a;
}

/// Construction plus validated certificate as one document.
inline json construction_document(const Construction& c, const Certificate& cert) {
  json doc;
  doc["schema"] = kSchema;
  doc["kind"] = "construction";
  doc["N"] = c.n();
  doc["exponents"] = exponents_json(c.exponents());
  doc["orientation"] = to_string(c.orientation());
  doc["gap_condition"] = c.gap_condition_holds();
  doc["basis"] = cert.basis.to_string();
  doc["alpha"] = to_json(c.alpha());
  doc["C"] = to_json(c.C());
  if (static_cast<std::int64_t>(c.C().depth()) - static_cast<std::int64_t>(c.C().constraints().size()) <= 12)
    doc["C_intervals"] = to_json(c.C().to_set1d(std::size_t{1} << 12));
  doc["E"] = to_json(c.E());
  doc["Z"] = to_json(c.Z());
  json base = json::array();
  json translates = json::array();
  for (int k = 1; k <= c.n(); ++k) {
    base.push_back(to_json(c.base_rect(k)));
    json classes = json::array();
    bigint count = 0;
    for (const auto& cls : c.admissible_translates(k)) {
      classes.push_back({{"anchors", to_json(cls.anchors)}, {"representative", to_json(cls.representative)}});
      count += cls.anchors.count();
    }
    translates.push_back({{"k", k}, {"count", count.str()}, {"classes", classes}});
  }
  doc["base_rects"] = base;
  doc["translates"] = translates;
  json fams = json::array();
  for (const auto& f : cert.families) fams.push_back(to_json(f));
  doc["certificate"] = {{"families", fams}, {"piece_count", cert.piece_count().str()},
                        {"measure", to_json(certificate_measure(cert))}};
  return doc;
}

/// Re-verifies a construction document from its own contents: the set Z
/// against its exponents, every family against Z and the stated basis, and
/// the claimed total.
inline VerificationReport check_document(const json& doc) {
  VerificationReport rep;
  auto add = [&](std::string name, std::string identity, std::string expected, std::string computed, bool ok) {
    rep.checks.push_back({std::move(name), std::move(identity), std::move(expected), std::move(computed), ok});
  };
  const json& schema = detail::field(doc, "schema");
  add("schema", "document tag", kSchema, schema.is_string() ? schema.get<std::string>() : "?",
      schema == kSchema);
  if (schema != kSchema) return rep;

  const json& jn = detail::field(doc, "exponents");
  if (!jn.is_array()) detail::bad_doc("exponents must be an array");
  std::vector<std::int64_t> js;
  for (const auto& x : jn) {
    if (!x.is_number_integer()) detail::bad_doc("exponent must be an integer");
    js.push_back(x.get<std::int64_t>());
  }
  rep.exponents = js;
  rep.n = static_cast<int>(js.size());
  const int n = rep.n;
  const bool valid = strictly_decreasing_naturals(js);
  add("exponents", "j_1 > ... > j_N >= 1", "true", valid ? "true" : "false", valid);
  if (!valid) return rep;
  const json& jN = detail::field(doc, "N");
  add("N", "N equals the number of exponents", std::to_string(n), jN.dump(), jN == n);

  BasisSpec basis;
  const json& jb = detail::field(doc, "basis");
  if (!jb.is_string()) detail::bad_doc("basis must be a string");
  basis = BasisSpec::parse(jb.get<std::string>());
  rep.basis = basis.to_string();
  const json& jo = detail::field(doc, "orientation");
  rep.orientation = jo.is_string() ? jo.get<std::string>() : "?";

  const Dyadic alpha = dyadic_from_json(detail::field(doc, "alpha"));
  add("alpha", "alpha = 2^-N", Dyadic::pow2(-n).to_string(), alpha.to_string(), alpha == Dyadic::pow2(-n));

  const auto z = digit_cylinder_from_json(detail::field(doc, "Z"));
  const DigitSet want_c = c_digits(js);
  const bool z_ok = z.base.x2set == want_c && z.base.x1 == Interval1D(0, Dyadic::pow2(1 - n)) &&
                    z.x3 == Interval1D(0, 1);
  add("Z.definition", "Z = [0, 2^(1-N)] x C x [0, 1] for the stated exponents", "true", z_ok ? "true" : "false", z_ok);
  add("Z.measure", "|Z| = 2^(1-2N)", Dyadic::pow2(1 - 2 * n).to_string(), z.measure().to_string(),
      z.measure() == Dyadic::pow2(1 - 2 * n));
  if (doc.contains("C_intervals")) {
    const Set1D ci = set1d_from_json(doc.at("C_intervals"));
    const bool same = ci == build_C(js);
    add("C.intervals", "listed intervals equal C by Rademacher evaluation", "true", same ? "true" : "false", same);
  }

  const json& cert = detail::field(doc, "certificate");
  const json& jf = detail::field(cert, "families");
  if (!jf.is_array()) detail::bad_doc("families must be an array");
  std::vector<PieceFamily> fams;
  for (const auto& f : jf) fams.push_back(family_from_json(f));
  std::string failure;
  for (std::size_t i = 0; i < fams.size() && failure.empty(); ++i) {
    try {
      validate_family(fams[i], z, basis, alpha);
    } catch (const error& e) {
      failure = "family " + std::to_string(i) + ": " + e.name() + ": " + e.what();
    }
  }
  add("families.valid", "each witness in basis, avg(Z, witness) >= alpha, region inside witness", "true",
      failure.empty() ? "true" : failure, failure.empty());
  std::optional<Dyadic> total;
  try {
    check_families_disjoint(fams);
    add("pieces.disjoint", "pieces are pairwise disjoint", "true", "true", true);
    total = Dyadic();
    for (const auto& f : fams) *total += Dyadic(f.count(), 0) * f.representative.region.volume();
  } catch (const error& e) {
    add("pieces.disjoint", "pieces are pairwise disjoint", "true", std::string(e.name()) + ": " + e.what(), false);
  }
  bigint pieces = 0;
  for (const auto& f : fams) pieces += f.count();
  const json& jpc = detail::field(cert, "piece_count");
  add("certificate.piece_count", "stated piece count", jpc.is_string() ? jpc.get<std::string>() : jpc.dump(),
      pieces.str(), jpc.is_string() && jpc.get<std::string>() == pieces.str());
  const Dyadic stated = dyadic_from_json(detail::field(cert, "measure"));
  add("certificate.stated_measure", "stated measure equals the recomputed union", stated.to_string(),
      total ? total->to_string() : "unavailable", total && *total == stated);
  const Dyadic want = expected_certificate_measure(n);
  add("certificate.measure", "|union of pieces| = N(N-1) 2^(-N-2)", want.to_string(),
      total ? total->to_string() : "unavailable", total && *total == want);
  return rep;
}

// ---- reports -------------------------------------------------------------------

inline json to_json(const VerificationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"identity", c.identity}, {"expected", c.expected},
                      {"computed", c.computed}, {"pass", c.pass}});
  json j{{"schema", kSchema}, {"kind", "verification"}, {"N", r.n}, {"exponents", exponents_json(r.exponents)},
         {"basis", r.basis}, {"orientation", r.orientation}, {"checks", checks}, {"pass", r.pass()}};
  if (const auto* f = r.first_failure()) j["first_failure"] = f->name;
  return j;
}

inline json to_json(const SweepRow& r) {
  return {{"N", r.n},
          {"exponents", exponents_json(r.exponents)},
          {"Z_measure", to_json(r.z_measure)},
          {"certificate_measure", to_json(r.certificate)},
          {"alpha", to_json(r.alpha)},
          {"W", to_json(r.w)},
          {"W_reference", to_json(r.reference)},
          {"W_over_log2_squared", rational_string(r.w_over_log2)},
          {"W_over_log2", rational_string(r.single_log)},
          {"x", to_json(Dyadic::pow2(r.n))},
          {"phi_lower", to_json(r.phi_lower)}};
}

inline json sweep_document(const std::vector<SweepRow>& rows) {
  json a = json::array();
  for (const auto& r : rows) a.push_back(to_json(r));
  return {{"schema", kSchema}, {"kind", "sweep"}, {"rows", a}};
}

inline const char* kSweepCsvHeader =
    "N,exponents,Z_measure,certificate_measure,alpha,W,W_reference,W_decimal,W_over_log2_squared,"
    "W_over_log2_squared_decimal,W_over_log2,x,phi_lower";

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const auto& r : rows) {
    std::string ex;
    for (std::size_t i = 0; i < r.exponents.size(); ++i) ex += (i ? " " : "") + std::to_string(r.exponents[i]);
    out += std::to_string(r.n) + "," + ex + "," + r.z_measure.to_string() + "," + r.certificate.to_string() + "," +
           r.alpha.to_string() + "," + r.w.to_string() + "," + r.reference.to_string() + "," + r.w.to_decimal() + "," +
           rational_string(r.w_over_log2) + "," + rational_decimal(r.w_over_log2) + "," +
           rational_string(r.single_log) + "," + Dyadic::pow2(r.n).to_string() + "," + r.phi_lower.to_string() + "\n";
  }
  return out;
}

inline json to_json(const CubeReport& r, const std::optional<FavaReport>& fava = std::nullopt) {
  json rows = json::array();
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    json j{{"m", row.m}, {"alpha", to_json(row.alpha)}, {"L", to_json(row.level)},
           {"alpha_L", to_json(row.scaled)}, {"alpha_L_decimal", row.scaled.to_decimal()}, {"boxes", row.boxes}};
    if (i > 0) j["increment"] = to_json(row.scaled - r.rows[i - 1].scaled);
    rows.push_back(std::move(j));
  }
  json opts{{"spacing_exp", r.options.spacing_exp}, {"side_exp", {r.options.side_min, r.options.side_max}},
            {"height_exp", {r.options.height_min, r.options.height_max}}};
  json j{{"schema", kSchema}, {"kind", "cube-test"}, {"basis", r.basis}, {"lattice", opts},
         {"candidates", r.candidates}, {"rows", rows}, {"strictly_increasing", r.strictly_increasing()}};
  if (auto inc = r.min_increment()) j["min_increment"] = to_json(*inc);
  if (fava) {
    json fr = json::array();
    for (const auto& x : fava->rows) fr.push_back({{"m", x.m}, {"ratio", rational_string(x.ratio)}});
    j["consistency_probe"] = {{"label", "L log L consistency probe (not a proof)"},
                              {"rows", fr},
                              {"max_ratio", rational_string(fava->max_ratio)},
                              {"cap", rational_string(fava->cap)},
                              {"within_cap", fava->within_cap}};
  }
  return j;
}

}  // namespace rarebase
