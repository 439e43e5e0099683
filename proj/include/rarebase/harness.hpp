#pragma once

// Verification suite for the construction, the N-sweep growth table, and the
// cube test for bases with finitely many eccentricities.

#include <algorithm>
#include <cstdio>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rarebase/basis.hpp"
#include "rarebase/crystal.hpp"
#include "rarebase/dyadic.hpp"
#include "rarebase/error.hpp"
#include "rarebase/geometry.hpp"
#include "rarebase/maximal.hpp"
#include "rarebase/parallel.hpp"

namespace rarebase {

using rational = boost::multiprecision::cpp_rational;

inline rational to_rational(const Dyadic& d) {
  return rational(d.mantissa(), bigint(1) << static_cast<unsigned>(d.exponent()));
}

struct Check {
  std::string name;
  std::string identity;
  std::string expected;
  std::string computed;
  bool pass = false;
};

struct VerificationReport {
  int n = 0;
  std::vector<std::int64_t> exponents;
  std::string basis;
  std::string orientation;
  std::vector<Check> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
  const Check* first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return &c;
    return nullptr;
  }
};

namespace detail {

inline std::string join(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline Check exact(std::string name, std::string identity, const Dyadic& expected, const Dyadic& computed) {
  return {std::move(name), std::move(identity), expected.to_string(), computed.to_string(), expected == computed};
}

inline Check flag(std::string name, std::string identity, bool ok, std::string detail_ok,
                  std::string detail_bad) {
  return {std::move(name), std::move(identity), "true", ok ? std::move(detail_ok) : std::move(detail_bad), ok};
}

// Checks for one k, in report order.
inline std::vector<Check> checks_for_k(const Construction& c, int k) {
  std::vector<Check> out;
  const int n = c.n();
  const std::string kk = "[" + std::to_string(k) + "]";
  const Dyadic alpha = c.alpha();

  out.push_back(exact("R_k.average" + kk, "avg(E, R_k) = 2^-N", alpha, avg2(c.E(), c.base_rect(k))));

  const auto classes = c.admissible_translates(k);
  bigint count = 0;
  for (const auto& cls : classes) count += cls.anchors.count();
  const bigint expected = c.expected_translate_count(k);
  out.push_back({"translates.count" + kk, "#{dyadic vertical translates with avg 2^-N} = 2^(k - N + j_k)",
                 expected.str(), count.str(), count == expected});

  bool uniform = true;
  for (const auto& cls : classes) uniform = uniform && cls.status.has_value();
  out.push_back(flag("translates.uniform" + kk, "every anchor class carries a single digit status of C",
                     uniform, "true", "false"));

  bool disjoint = true;
  std::string clash = "true";
  for (std::size_t a = 0; a < classes.size() && disjoint; ++a) {
    if (classes[a].representative.d2 > classes[a].anchors.spacing()) disjoint = false, clash = "height exceeds spacing";
    for (std::size_t b = a + 1; b < classes.size() && disjoint; ++b)
      if (classes[a].anchors.intersects(classes[b].anchors))
        disjoint = false, clash = "classes " + std::to_string(a) + " and " + std::to_string(b) + " share an anchor";
  }
  out.push_back(flag("translates.disjoint" + kk, "translates of R_k are pairwise disjoint", disjoint, "true", clash));

  for (int l = 0; l <= n - k; ++l) {
    const std::string kl = "[" + std::to_string(k) + "," + std::to_string(l) + "]";
    const Dyadic target = l == 0 ? alpha : Dyadic::pow2(-n + l + 1);
    const std::int64_t imax = l == 0 ? 1 : (std::int64_t{1} << (l - 1));
    std::optional<Dyadic> bad;
    for (const auto& cls : classes)
      for (std::int64_t i = 1; i <= imax && !bad; ++i) {
        Dyadic a = avg2(c.E(), c.sub_rect(k, cls.representative, l, i));
        if (a != target) bad = a;
      }
    out.push_back(exact("subrect.average" + kl,
                        l == 0 ? "avg(E, R_{k,j,1,1}) = 2^-N" : "avg(E, R_{k,j,2^l,i}) = 2^(-N+l+1), i <= 2^(l-1)",
                        target, bad.value_or(target)));

    bool translates = true;
    if (l >= 1) {
      const auto q = static_cast<std::uint64_t>(c.j(k) + l);
      const Dyadic step = Dyadic::pow2(-static_cast<std::int64_t>(q));
      for (const auto& cls : classes)
        for (std::int64_t i = 2; i <= imax; ++i)
          translates = translates && c.C().shift_preserves(cls.representative.x2, q, Dyadic(i - 1) * step);
    }
    out.push_back(flag("subrect.translate_structure" + kl,
                       "E meets R_{k,j,2^l,1..2^(l-1)} in vertical translates of one set", translates, "true",
                       "false"));
  }
  return out;
}

}  // namespace detail

/// Runs every identity of the construction in a fixed order. Failures are
/// report entries, never exceptions (except invalid exponents).
inline VerificationReport verify_construction(const std::vector<std::int64_t>& js, const BasisSpec& basis,
                                              Orientation orientation = Orientation::normal,
                                              unsigned threads = 1) {
  VerificationReport rep;
  rep.n = static_cast<int>(js.size());
  rep.exponents = js;
  rep.orientation = to_string(orientation);
  rep.basis = basis.with_orientation(orientation).to_string();
  const int n = rep.n;

  const bool valid = strictly_decreasing_naturals(js);
  rep.checks.push_back(detail::flag("exponents", "j_1 > ... > j_N >= 1", valid, detail::join(js),
                                    "not strictly decreasing naturals: " + detail::join(js)));
  if (!valid) return rep;
  rep.checks.push_back(detail::flag("hypothesis.gap_condition", "j_(k-1) > N + j_k for k = 2..N",
                                    gap_condition(js), "true", "violated by " + detail::join(js)));

  const Construction c(js, orientation);
  const Dyadic alpha = c.alpha();

  const Dyadic cm = c.C().measure();
  bool routes_agree = true;
  if (js.front() + 1 <= 20) routes_agree = build_C(js) == c.C().to_set1d(std::size_t{1} << 21);
  rep.checks.push_back({"C.measure", "m1(C) = 2^-N", alpha.to_string(),
                        cm.to_string() + (routes_agree ? "" : " (explicit route disagrees)"),
                        cm == alpha && routes_agree});

  bool atoms_ok = true;
  Dyadic atom_sum;
  for (const auto& [signs, m] : independence_atoms(js)) {
    atoms_ok = atoms_ok && m == alpha;
    atom_sum += m;
  }
  rep.checks.push_back({"C.independence_atoms", "each of the 2^N sign patterns has measure 2^-N",
                        alpha.to_string() + " x 2^N", atoms_ok ? alpha.to_string() + " x 2^N" : "unequal atoms",
                        atoms_ok && atom_sum == Dyadic(1)});
  rep.checks.push_back(detail::exact("E.measure", "m2(E) = 2^(1-N) 2^-N", Dyadic::pow2(1 - 2 * n), c.E().measure()));
  rep.checks.push_back(detail::exact("Z.measure", "|Z| = 2^(1-2N)", Dyadic::pow2(1 - 2 * n), c.Z().measure()));

  auto per_k = parallel_map<std::vector<Check>>(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    try {
      return detail::checks_for_k(c, static_cast<int>(i) + 1);
    } catch (const error& e) {
      return std::vector<Check>{{"k[" + std::to_string(i + 1) + "]", "checks for this k completed", "true",
                                 std::string(e.name()) + ": " + e.what(), false}};
    }
  });
  for (auto& v : per_k)
    for (auto& ch : v) rep.checks.push_back(std::move(ch));

  const BasisSpec b = basis.with_orientation(orientation);
  const auto fams = assemble_pieces(c);
  std::string outside;
  std::string mismatch;
  for (const auto& f : fams) {
    const auto& p = f.representative;
    const std::string where = "k=" + std::to_string(p.k) + " l=" + std::to_string(p.l) + " i=" + std::to_string(p.i);
    if (outside.empty() && !b.contains(p.witness)) outside = where;
    if (mismatch.empty()) {
      if (p.claimed_average != alpha) mismatch = where + " avg " + p.claimed_average.to_string();
      else if (!p.witness.contains(p.region)) mismatch = where + " region outside witness";
      else if (!c.C().status_on(f.anchors).has_value()) mismatch = where + " non-uniform class";
    }
  }
  rep.checks.push_back(detail::flag("witness.in_basis", "every witness R_{k,j,2^l,i} x [0, 2^(l+1)] lies in the basis",
                                    outside.empty(), "true", "outside at " + outside));
  rep.checks.push_back(detail::flag("witness.average", "avg(Z, witness) = 2^-N and region inside witness",
                                    mismatch.empty(), "true", mismatch));

  std::optional<Dyadic> measure;
  try {
    check_families_disjoint(fams);
    rep.checks.push_back(detail::flag("pieces.disjoint", "pieces are pairwise disjoint", true, "true", ""));
    Certificate cert{n, js, b, alpha, fams};
    measure = certificate_measure(cert);
  } catch (const error& e) {
    rep.checks.push_back(detail::flag("pieces.disjoint", "pieces are pairwise disjoint", false, "true",
                                      std::string(e.name()) + ": " + e.what()));
  }
  const Dyadic want = expected_certificate_measure(n);
  rep.checks.push_back({"certificate.measure", "|union of pieces| = N(N-1) 2^(-N-2)", want.to_string(),
                        measure ? measure->to_string() : "unavailable", measure && *measure == want});
  const Dyadic floor_bound = Dyadic(static_cast<long long>(n) * (n - 1)) * alpha * Dyadic::pow2(-3);
  rep.checks.push_back({"certificate.lower_bound", "|union of pieces| >= N(N-1) 2^-N / 8",
                        ">= " + floor_bound.to_string(), measure ? measure->to_string() : "unavailable",
                        measure && *measure >= floor_bound});
  return rep;
}

// ---- growth table -------------------------------------------------------------

struct SweepRow {
  int n = 0;
  std::vector<std::int64_t> exponents;
  Dyadic z_measure;
  Dyadic certificate;
  Dyadic alpha;
  Dyadic w;             // certificate alpha / |Z|
  Dyadic reference;     // N(N-1)/8
  rational w_over_log2; // W / log2(1/alpha)^2
  Dyadic phi_lower;     // lower bound forced on phi(2^N) / C: certificate / |Z|
  rational single_log;  // W / log2(1/alpha)
};

inline std::vector<SweepRow> sweep(int n_min, int n_max, unsigned threads = 1, int n_cap = 12) {
  if (n_min < 1 || n_max < n_min) throw error(errc::invalid_argument, "need 1 <= from <= to");
  if (n_max > n_cap) throw error(errc::resource_cap, "N above the sweep cap of " + std::to_string(n_cap));
  return parallel_map<SweepRow>(static_cast<std::size_t>(n_max - n_min + 1), threads, [&](std::size_t idx) {
    const int n = n_min + static_cast<int>(idx);
    Construction c(default_schedule(n));
    Certificate cert = build_certificate(c, BasisSpec::zygmund(ExponentSet::all()));
    SweepRow r;
    r.n = n;
    r.exponents = c.exponents();
    r.z_measure = c.Z().measure();
    r.certificate = certificate_measure(cert);
    r.alpha = c.alpha();
    r.w = Dyadic::divide(r.certificate * r.alpha, r.z_measure);
    r.reference = Dyadic::divide(Dyadic(static_cast<long long>(n) * (n - 1)), 8);
    const rational wr = to_rational(r.w);
    r.w_over_log2 = wr / rational(n * n);
    r.single_log = wr / rational(n);
    r.phi_lower = Dyadic::divide(r.certificate, r.z_measure);
    return r;
  });
}

inline std::string rational_string(const rational& q) {
  const bigint den = boost::multiprecision::denominator(q);
  if (den == 1) return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" + den.str();
}

inline std::string rational_decimal(const rational& q) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", q.convert_to<double>());
  return buf;
}

// ---- cube test ----------------------------------------------------------------

struct CubeOptions {
  std::int64_t spacing_exp = 1;
  std::int64_t side_min = -1, side_max = 3;
  std::int64_t height_min = -1, height_max = 6;
  std::size_t max_candidates = std::size_t{1} << 23;
  std::size_t max_cells = std::size_t{1} << 27;
};

struct CubeRow {
  int m = 0;
  Dyadic alpha;
  Dyadic level;     // L(alpha), certified lower bound of |{M f >= alpha}|
  Dyadic scaled;    // alpha L(alpha)
  std::size_t boxes = 0;
};

struct CubeReport {
  std::string basis;
  CubeOptions options;
  std::size_t candidates = 0;
  std::vector<CubeRow> rows;

  /// Smallest step of alpha L(alpha) between consecutive tested m, if any.
  std::optional<Dyadic> min_increment() const {
    std::optional<Dyadic> best;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      Dyadic inc = rows[i].scaled - rows[i - 1].scaled;
      if (!best || inc < *best) best = inc;
    }
    return best;
  }
  bool strictly_increasing() const {
    auto inc = min_increment();
    return !inc || inc->sign() > 0;
  }
};

inline Cylinder3<Set1D> unit_cube_indicator() {
  return {{Interval1D(0, 1), Set1D{Interval1D(0, 1)}}, Interval1D(0, 1)};
}

inline LatticeSearch cube_lattice(const BasisSpec& basis, const CubeOptions& o) {
  LatticeSearch s;
  s.spacing_exp = {o.spacing_exp, o.spacing_exp, o.spacing_exp};
  s.side_min = o.side_min;
  s.side_max = o.side_max;
  s.height_min = o.height_min;
  s.height_max = o.height_max;
  s.basis = basis;
  s.max_candidates = o.max_candidates;
  return s;
}

/// Lattice boxes of the basis that meet the unit cube, with their averages.
inline std::vector<std::pair<Box3, Dyadic>> cube_candidates(const BasisSpec& basis, const CubeOptions& o,
                                                             unsigned threads = 1) {
  const auto f = unit_cube_indicator();
  const LatticeSearch s = cube_lattice(basis, o);
  std::vector<Box3> boxes;
  const Interval1D unit(0, 1);
  for (const auto& shape : s.shapes()) {
    std::array<std::vector<Dyadic>, 3> anchors;
    std::array<Dyadic, 3> sides;
    for (int a = 0; a < 3; ++a) {
      sides[a] = Dyadic::pow2(shape[a]);
      anchors[a] = detail::anchors_meeting(unit, sides[a], o.spacing_exp);
    }
    const std::size_t add = anchors[0].size() * anchors[1].size() * anchors[2].size();
    if (boxes.size() + add > o.max_candidates)
      throw error(errc::resource_cap, "cube test candidates exceed the cap of " + std::to_string(o.max_candidates));
    for (const auto& u : anchors[0])
      for (const auto& v : anchors[1])
        for (const auto& w : anchors[2]) boxes.push_back(Box3(Rect2(u, v, sides[0], sides[1]), Interval1D(w, w + sides[2])));
  }
  auto avgs = parallel_map<Dyadic>(boxes.size(), threads, [&](std::size_t i) { return avg3(f, boxes[i]); });
  std::vector<std::pair<Box3, Dyadic>> out;
  out.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) out.emplace_back(std::move(boxes[i]), std::move(avgs[i]));
  return out;
}

/// f = indicator of [0,1]^3. For alpha = 2^-m, L(alpha) is the exact volume
/// of the union of candidate boxes with average >= alpha.
inline CubeReport cube_test(const BasisSpec& basis, const std::vector<int>& ms, const CubeOptions& o = {},
                            unsigned threads = 1) {
  if (!basis.finite_exponents() && !basis.is_strong())
    throw error(errc::invalid_argument, "cube test needs a finite exponent set");
  CubeReport rep;
  rep.basis = basis.to_string();
  rep.options = o;
  const auto cands = cube_candidates(basis, o, threads);
  rep.candidates = cands.size();
  rep.rows = parallel_map<CubeRow>(ms.size(), threads, [&](std::size_t idx) {
    const int m = ms[idx];
    if (m < 0) throw error(errc::invalid_argument, "alpha exponent must be >= 0");
    CubeRow r;
    r.m = m;
    r.alpha = Dyadic::pow2(-m);
    std::vector<Box3> kept;
    for (const auto& [b, a] : cands)
      if (a >= r.alpha) kept.push_back(b);
    r.boxes = kept.size();
    r.level = union_volume(kept, o.max_cells);
    r.scaled = r.alpha * r.level;
    return r;
  });
  return rep;
}

// ---- consistency probe for the L log L bound ------------------------------------

struct FavaRow {
  int m = 0;
  Dyadic scaled;      // alpha L(alpha)
  rational ratio;     // alpha L(alpha) / (1 + m)
};

struct FavaReport {
  std::vector<FavaRow> rows;
  rational max_ratio;
  rational cap;
  bool within_cap = false;
};

/// alpha L(alpha) / (1 + log2(1/alpha)) over cube-test rows, compared with
/// a recorded cap. A consistency probe, not a proof.
inline FavaReport fava_probe(const CubeReport& cube, const rational& cap) {
  FavaReport rep;
  rep.cap = cap;
  for (const auto& r : cube.rows) {
    const rational s = to_rational(r.scaled);
    FavaRow row{r.m, r.scaled, s / rational(1 + r.m)};
    if (row.ratio > rep.max_ratio) rep.max_ratio = row.ratio;
    rep.rows.push_back(std::move(row));
  }
  rep.within_cap = rep.max_ratio <= cap;
  return rep;
}

}  // namespace rarebase
