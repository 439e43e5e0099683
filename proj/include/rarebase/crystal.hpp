#pragma once

// The extremal configuration for bases with infinitely many eccentricities.
//
// Given exponents j_1 > ... > j_N, C is the set of t in [0, 1] where the
// Rademacher functions r0(2^{j_k} t) all equal +1, E = [0, 2^{1-N}] x C and
// Z = E x [0, 1]. R_k = [0, 2^{1-k}] x [0, 2^{-j_k}] and its dyadic vertical
// translates with the same average of E are dilated and shifted into
// sub-rectangles; each sub-rectangle times [0, 2^{l+1}] is a basis box on
// which Z has average 2^-N, and its right half times [2^l, 2^{l+1}] lies in
// the superlevel set. Those pieces are pairwise disjoint.
//
// With any exponent schedule obeying the gap condition j_1 grows like N^2,
// so C has 2^{j_1 + 1 - N} intervals. C is therefore held as a DigitSet and
// translates are grouped into AnchorLattice classes that share a digit
// status; explicit interval forms exist for small exponents and serve as
// cross-checks.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rarebase/basis.hpp"
#include "rarebase/digits.hpp"
#include "rarebase/dyadic.hpp"
#include "rarebase/error.hpp"
#include "rarebase/geometry.hpp"

namespace rarebase {

/// r0(t) = +1 on [m, m + 1/2), -1 on [m + 1/2, m + 1).
inline int rademacher(const Dyadic& t) {
  Dyadic frac = t - Dyadic(t.floor(), 0);
  return frac < Dyadic::pow2(-1) ? 1 : -1;
}

/// C as digit constraints: r0(2^j t) = +1 exactly when digit j+1 of t is 0.
inline DigitSet c_digits(std::span<const std::int64_t> js) {
  std::vector<DigitConstraint> c;
  for (auto j : js) {
    if (j < 0) throw error(errc::invalid_argument, "exponents must be nonnegative");
    c.push_back({static_cast<std::uint64_t>(j) + 1, 0});
  }
  return DigitSet(std::move(c));
}

/// C by direct evaluation of the Rademacher sum on the 2^-(j_max + 1) grid,
/// on which every r0(2^{j_k} t) is constant.
inline Set1D build_C(std::span<const std::int64_t> js, std::size_t cap = std::size_t{1} << 22) {
  if (js.empty()) throw error(errc::invalid_argument, "need at least one exponent");
  std::int64_t jmax = 0;
  for (auto j : js) {
    if (j < 0) throw error(errc::invalid_argument, "exponents must be nonnegative");
    jmax = std::max(jmax, j);
  }
  const auto depth = static_cast<std::uint64_t>(jmax) + 1;
  if (depth > detail::log2_cap(cap))
    throw error(errc::resource_cap, "C at depth " + std::to_string(depth) + " exceeds cell cap");
  const auto n = static_cast<int>(js.size());
  std::vector<Interval1D> cells;
  const std::uint64_t count = std::uint64_t{1} << depth;
  for (std::uint64_t m = 0; m < count; ++m) {
    Dyadic t(bigint(m), depth);
    int sum = 0;
    for (auto j : js) sum += rademacher(t.ldexp(j));
    if (sum == n) cells.emplace_back(t, Dyadic(bigint(m + 1), depth));
  }
  return Set1D(std::move(cells));
}

/// Measure of every sign pattern {t : r0(2^{j_k} t) = s_k for all k}.
inline std::map<std::vector<int>, Dyadic> independence_atoms(std::span<const std::int64_t> js) {
  std::map<std::vector<int>, Dyadic> atoms;
  const std::size_t n = js.size();
  if (n > 20) throw error(errc::resource_cap, "too many atoms");
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<int> signs(n);
    std::vector<DigitConstraint> c;
    for (std::size_t k = 0; k < n; ++k) {
      const int minus = static_cast<int>((mask >> (n - 1 - k)) & 1u);
      signs[k] = minus ? -1 : 1;
      c.push_back({static_cast<std::uint64_t>(js[k]) + 1, minus});
    }
    atoms.emplace(std::move(signs), DigitSet(std::move(c)).measure());
  }
  return atoms;
}

/// One class of vertical translates of R_k: anchors share C's digits at
/// every constrained position <= j_k.
struct TranslateClass {
  AnchorLattice anchors;
  Rect2 representative;
  Dyadic average;
  std::optional<bool> status;  // C's digit status shared by all anchors
};

class Construction {
 public:
  explicit Construction(std::vector<std::int64_t> js, Orientation o = Orientation::normal)
      : js_(std::move(js)), orientation_(o) {
    if (!strictly_decreasing_naturals(js_))
      throw error(errc::invalid_argument, "exponents must be strictly decreasing naturals");
    const int n = this->n();
    c_ = c_digits(js_);
    e_ = ProductSet2<DigitSet>{Interval1D(0, Dyadic::pow2(1 - n)), c_};
    z_ = Cylinder3<DigitSet>{e_, Interval1D(0, 1)};
  }

  int n() const { return static_cast<int>(js_.size()); }
  const std::vector<std::int64_t>& exponents() const noexcept { return js_; }
  std::int64_t j(int k) const { return js_.at(static_cast<std::size_t>(k - 1)); }
  Orientation orientation() const noexcept { return orientation_; }
  bool gap_condition_holds() const { return gap_condition(js_); }

  const DigitSet& C() const noexcept { return c_; }
  const ProductSet2<DigitSet>& E() const noexcept { return e_; }
  const Cylinder3<DigitSet>& Z() const noexcept { return z_; }

  /// The level 2^-N at which the superlevel set is measured.
  Dyadic alpha() const { return Dyadic::pow2(-n()); }

  /// R_k = [0, 2^{1-k}] x [0, 2^{-j_k}].
  Rect2 base_rect(int k) const {
    check_k(k);
    return {0, 0, Dyadic::pow2(1 - k), Dyadic::pow2(-j(k))};
  }

  /// 2^{-N + k + j_k}.
  bigint expected_translate_count(int k) const {
    check_k(k);
    return bigint(1) << static_cast<unsigned>(-n() + k + j(k));
  }

  /// Every anchor class of R_k's dyadic vertical translates inside [0, 1],
  /// with the average of E over the class representative.
  std::vector<TranslateClass> translate_classes(int k) const {
    check_k(k);
    const auto q = static_cast<std::uint64_t>(j(k));
    std::vector<std::uint64_t> positions;
    for (const auto& c : c_.constraints())
      if (c.position <= q) positions.push_back(c.position);
    if (positions.size() > 20) throw error(errc::resource_cap, "too many translate classes");
    std::vector<TranslateClass> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << positions.size()); ++mask) {
      std::vector<DigitConstraint> fixed;
      for (std::size_t r = 0; r < positions.size(); ++r)
        fixed.push_back({positions[r], static_cast<int>((mask >> (positions.size() - 1 - r)) & 1u)});
      AnchorLattice lat(q, std::move(fixed));
      Rect2 rep = vtranslate(base_rect(k), lat.representative());
      Dyadic avg = avg2(e_, rep);
      auto status = c_.status_on(lat);
      out.push_back({std::move(lat), std::move(rep), std::move(avg), status});
    }
    return out;
  }

  /// Classes whose average equals 2^-N; these are the R_{k,j}.
  std::vector<TranslateClass> admissible_translates(int k) const {
    auto all = translate_classes(k);
    std::erase_if(all, [&](const TranslateClass& c) { return c.average != alpha(); });
    return all;
  }

  bigint translate_count(int k) const {
    bigint total = 0;
    for (const auto& c : admissible_translates(k)) total += c.anchors.count();
    return total;
  }

  /// Explicit scan of the anchors m 2^{-j_k}, m = 0 .. 2^{j_k} - 1. Throws
  /// CountMismatch when the number kept differs from 2^{-N + k + j_k}.
  std::vector<Rect2> enumerate_translates(int k, std::size_t cap = std::size_t{1} << 20) const {
    check_k(k);
    const auto q = static_cast<std::uint64_t>(j(k));
    if (q > detail::log2_cap(cap))
      throw error(errc::resource_cap, "2^" + std::to_string(q) + " anchors exceed the cap");
    std::vector<Rect2> out;
    const Rect2 r = base_rect(k);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << q); ++m) {
      Rect2 t = vtranslate(r, Dyadic(bigint(m), q));
      if (avg2(e_, t) == alpha()) out.push_back(std::move(t));
    }
    if (bigint(out.size()) != expected_translate_count(k))
      throw error(errc::count_mismatch, "k=" + std::to_string(k) + ": found " +
                                            std::to_string(out.size()) + " translates, expected " +
                                            expected_translate_count(k).str());
    return out;
  }

  /// R_{k,j,2^l,i}: dilate R_{k,j} by 2^-l about its lower-left corner, then
  /// shift up by (i - 1) 2^-l 2^{-j_k}.
  Rect2 sub_rect(int k, const Rect2& rkj, int l, std::int64_t i) const {
    check_k(k);
    if (l < 0 || l > n() - k || i < 1 || i > (std::int64_t{1} << l))
      throw error(errc::invalid_argument, "sub-rectangle index out of range: k=" +
                                              std::to_string(k) + " l=" + std::to_string(l) +
                                              " i=" + std::to_string(i));
    return vtranslate(homothety(rkj, Dyadic::pow2(-l)),
                      Dyadic(i - 1) * Dyadic::pow2(-l - j(k)));
  }

  ProductSet2<Set1D> E_explicit(std::size_t cap = std::size_t{1} << 22) const {
    return {e_.x1, c_.to_set1d(cap)};
  }
  Cylinder3<Set1D> Z_explicit(std::size_t cap = std::size_t{1} << 22) const {
    return {E_explicit(cap), z_.x3};
  }

 private:
  void check_k(int k) const {
    if (k < 1 || k > n()) throw error(errc::invalid_argument, "k out of range: " + std::to_string(k));
  }

  std::vector<std::int64_t> js_;
  Orientation orientation_;
  DigitSet c_;
  ProductSet2<DigitSet> e_;
  Cylinder3<DigitSet> z_;
};

// ---- certificate -------------------------------------------------------------

/// A region inside the superlevel set, the basis box proving it, and the
/// average of Z over that box.
struct CertifiedPiece {
  Box3 region;
  Box3 witness;
  Dyadic claimed_average;
  int k = 0;
  Dyadic anchor;  // lower x2 edge of R_{k,j}; identifies j
  int l = 0;
  std::int64_t i = 0;

  friend bool operator==(const CertifiedPiece&, const CertifiedPiece&) = default;
};

/// The pieces obtained from `representative` by moving its anchor to every
/// member of `anchors`.
struct PieceFamily {
  CertifiedPiece representative;
  AnchorLattice anchors;

  bigint count() const { return anchors.count(); }

  CertifiedPiece member(const Dyadic& b) const {
    const Dyadic d = b - representative.anchor;
    CertifiedPiece p = representative;
    p.region = p.region.vtranslated(d);
    p.witness = p.witness.vtranslated(d);
    p.anchor = b;
    return p;
  }

  /// Region with the anchor moved to 0.
  Box3 relative_region() const { return representative.region.vtranslated(-representative.anchor); }
};

struct Certificate {
  int n = 0;
  std::vector<std::int64_t> exponents;
  BasisSpec basis;
  Dyadic alpha;
  std::vector<PieceFamily> families;

  bigint piece_count() const {
    bigint total = 0;
    for (const auto& f : families) total += f.count();
    return total;
  }

  std::vector<CertifiedPiece> expand(std::size_t cap = std::size_t{1} << 16) const {
    if (piece_count() > cap)
      throw error(errc::resource_cap, piece_count().str() + " pieces exceed the cap of " +
                                          std::to_string(cap));
    std::vector<CertifiedPiece> out;
    for (const auto& f : families)
      for (const auto& b : f.anchors.enumerate(cap)) out.push_back(f.member(b));
    return out;
  }
};

/// N(N-1) 2^{-N-2}: the exact total volume of the canonical pieces.
inline Dyadic expected_certificate_measure(int n) {
  return Dyadic(static_cast<long long>(n) * (n - 1)) * Dyadic::pow2(-n - 2);
}

/// Families for every (k, translate class, 1 <= l <= N-k, 1 <= i <= 2^{l-1}),
/// with averages computed but not yet validated.
inline std::vector<PieceFamily> assemble_pieces(const Construction& c) {
  std::vector<PieceFamily> out;
  for (int k = 1; k <= c.n(); ++k) {
    for (const auto& cls : c.admissible_translates(k)) {
      const Dyadic anchor = cls.anchors.representative();
      for (int l = 1; l <= c.n() - k; ++l) {
        const Interval1D slab(Dyadic::pow2(l), Dyadic::pow2(l + 1));
        const Interval1D tall(0, Dyadic::pow2(l + 1));
        for (std::int64_t i = 1; i <= (std::int64_t{1} << (l - 1)); ++i) {
          Rect2 r = c.sub_rect(k, cls.representative, l, i);
          Box3 witness(r, tall);
          CertifiedPiece p{Box3(right_half(r), slab), witness, avg3(c.Z(), witness), k, anchor, l, i};
          out.push_back({std::move(p), cls.anchors});
        }
      }
    }
  }
  return out;
}

namespace detail {

inline bool fits_window(const Box3& rel, const AnchorLattice& lat) {
  return Interval1D(0, lat.spacing()).contains(rel.span(1));
}

inline void check_members_explicitly(const std::vector<const PieceFamily*>& fams, std::size_t cap) {
  std::vector<Box3> boxes;
  for (const auto* f : fams)
    for (const auto& b : f->anchors.enumerate(cap)) boxes.push_back(f->member(b).region);
  disjoint_union_volume(boxes);
}

}  // namespace detail

/// Throws OverlapDetected when two pieces (in the same or different
/// families) share positive volume. Members of one family sit in disjoint
/// windows [b, b + 2^-q); two families on the same lattice scale can only
/// collide at a common anchor.
inline void check_families_disjoint(const std::vector<PieceFamily>& fams,
                                    std::size_t cap = std::size_t{1} << 16) {
  std::vector<Box3> rel;
  rel.reserve(fams.size());
  for (const auto& f : fams) {
    rel.push_back(f.relative_region());
    if (!detail::fits_window(rel.back(), f.anchors)) {
      if (f.count() > cap)
        throw error(errc::resource_cap, "cannot decide disjointness of a family exceeding its window");
      detail::check_members_explicitly({&f}, cap);
    }
  }
  // sweep over x1 so only families with overlapping x1 spans are paired
  std::vector<std::size_t> order(fams.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t u, std::size_t v) { return rel[u].span(0).lo < rel[v].span(0).lo; });
  std::vector<std::size_t> active;
  for (const std::size_t cur : order) {
    const Dyadic& lo = rel[cur].span(0).lo;
    std::erase_if(active, [&](std::size_t u) { return rel[u].span(0).hi <= lo; });
    for (const std::size_t other : active) {
      const std::size_t a = std::min(cur, other), b = std::max(cur, other);
      if (!overlaps(rel[a].span(0), rel[b].span(0)) || !overlaps(rel[a].span(2), rel[b].span(2)))
        continue;
      const auto& la = fams[a].anchors;
      const auto& lb = fams[b].anchors;
      if (la.scale_exponent() == lb.scale_exponent() && detail::fits_window(rel[a], la) &&
          detail::fits_window(rel[b], lb)) {
        if (overlaps(rel[a], rel[b]) && la.intersects(lb))
          throw error(errc::overlap_detected,
                      "piece families " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
        continue;
      }
      if (fams[a].count() > cap || fams[b].count() > cap)
        throw error(errc::resource_cap, "cannot decide disjointness of families " +
                                            std::to_string(a) + " and " + std::to_string(b));
      try {
        detail::check_members_explicitly({&fams[a], &fams[b]}, cap);
      } catch (const error& e) {
        if (e.code() != errc::overlap_detected) throw;
        throw error(errc::overlap_detected,
                    "piece families " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
      }
    }
    active.push_back(cur);
  }
}

/// Validates one family: witness in the basis, exact average, region inside
/// the witness, and a digit status shared by every anchor (so every member
/// has the representative's average).
inline void validate_family(const PieceFamily& f, const Cylinder3<DigitSet>& z,
                            const BasisSpec& basis, const Dyadic& alpha) {
  const auto& p = f.representative;
  auto where = [&] {
    return " (k=" + std::to_string(p.k) + " l=" + std::to_string(p.l) + " i=" + std::to_string(p.i) + ")";
  };
  if (!basis.contains(p.witness))
    throw error(errc::witness_not_in_basis, "witness outside " + basis.to_string() + where());
  const Dyadic avg = avg3(z, p.witness);
  if (avg != p.claimed_average || avg < alpha)
    throw error(errc::average_mismatch, "average " + avg.to_string() + ", claimed " +
                                            p.claimed_average.to_string() + where());
  if (!p.witness.contains(p.region))
    throw error(errc::average_mismatch, "region not inside witness" + where());
  if (p.anchor != f.anchors.representative() || !z.base.x2set.status_on(f.anchors).has_value())
    throw error(errc::average_mismatch, "anchor class is not uniform" + where());
}

/// Validated certificate for the superlevel inclusion at level 2^-N.
inline Certificate build_certificate(const Construction& c, const BasisSpec& basis) {
  Certificate cert;
  cert.n = c.n();
  cert.exponents = c.exponents();
  cert.basis = basis.with_orientation(c.orientation());
  cert.alpha = c.alpha();
  cert.families = assemble_pieces(c);
  for (const auto& f : cert.families) {
    validate_family(f, c.Z(), cert.basis, cert.alpha);
    if (f.representative.claimed_average != cert.alpha)
      throw error(errc::average_mismatch, "average differs from 2^-N");
  }
  check_families_disjoint(cert.families);
  return cert;
}

inline Dyadic certificate_measure(const Certificate& cert) {
  check_families_disjoint(cert.families);
  Dyadic total;
  for (const auto& f : cert.families)
    total += Dyadic(f.count(), 0) * f.representative.region.volume();
  return total;
}

/// Explicit route: pairwise-checked sum over individual pieces.
inline Dyadic certificate_measure(const std::vector<CertifiedPiece>& pieces) {
  std::vector<Box3> boxes;
  boxes.reserve(pieces.size());
  for (const auto& p : pieces) boxes.push_back(p.region);
  return disjoint_union_volume(boxes);
}

}  // namespace rarebase
