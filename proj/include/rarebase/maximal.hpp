#pragma once

// Certified lower bounds for M_B f with f an indicator of a Cylinder3.
//
// Every value reported here is the exact average of f over an explicit basis
// box containing the point, so it can only underestimate the supremum.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rarebase/basis.hpp"
#include "rarebase/crystal.hpp"
#include "rarebase/dyadic.hpp"
#include "rarebase/error.hpp"
#include "rarebase/geometry.hpp"
#include "rarebase/parallel.hpp"

namespace rarebase {

/// Finite family of candidate boxes: planar sides 2^a1, 2^a2 and height 2^c
/// with anchors on the lattice 2^-r_i Z per axis, filtered by the basis, plus
/// optional seed boxes.
struct LatticeSearch {
  std::array<std::int64_t, 3> spacing_exp{0, 0, 0};
  std::int64_t side_min = 0, side_max = 0;
  std::int64_t height_min = 0, height_max = 0;
  BasisSpec basis;
  std::vector<Box3> seeds;
  bool use_lattice = true;
  std::size_t max_candidates = std::size_t{1} << 22;

  Dyadic spacing(int axis) const { return Dyadic::pow2(-spacing_exp[static_cast<std::size_t>(axis)]); }

  /// Admissible (a1, a2, c) triples.
  std::vector<std::array<std::int64_t, 3>> shapes() const {
    std::vector<std::array<std::int64_t, 3>> out;
    if (!use_lattice) return out;
    for (auto a1 = side_min; a1 <= side_max; ++a1)
      for (auto a2 = side_min; a2 <= side_max; ++a2) {
        if (!basis.admits_exponent(a2 - a1)) continue;
        for (auto c = height_min; c <= height_max; ++c) out.push_back({a1, a2, c});
      }
    return out;
  }

  LatticeSearch with_basis(BasisSpec b) const {
    LatticeSearch s = *this;
    s.basis = std::move(b);
    return s;
  }
};

namespace detail {

// Lattice anchors n 2^-r with n 2^-r <= x < n 2^-r + side.
inline std::vector<Dyadic> anchors_containing(const Dyadic& x, const Dyadic& side, std::int64_t r) {
  const bigint hi = x.ldexp(r).floor();
  const bigint lo = (x - side).ldexp(r).floor() + 1;
  std::vector<Dyadic> out;
  for (bigint n = lo; n <= hi; ++n) out.push_back(Dyadic(n, 0).ldexp(-r));
  return out;
}

// Lattice anchors n 2^-r whose interval [a, a + side) meets [lo, hi).
inline std::vector<Dyadic> anchors_meeting(const Interval1D& span, const Dyadic& side, std::int64_t r) {
  const bigint first = (span.lo - side).ldexp(r).floor() + 1;
  const Dyadic top = span.hi.ldexp(r);
  bigint last = top.floor();
  if (Dyadic(last, 0) == top) last -= 1;
  std::vector<Dyadic> out;
  for (bigint n = first; n <= last; ++n) out.push_back(Dyadic(n, 0).ldexp(-r));
  return out;
}

}  // namespace detail

struct MaximalValue {
  Dyadic value;
  Box3 witness;
  std::size_t candidates = 0;
};

/// max of avg3(f, b) over candidate boxes b containing x.
template <MeasurableSet1D S>
MaximalValue maximal_lower_at(const Point3& x, const Cylinder3<S>& f, const LatticeSearch& search) {
  std::optional<MaximalValue> best;
  std::size_t seen = 0;
  auto consider = [&](const Box3& b) {
    if (++seen > search.max_candidates)
      throw error(errc::resource_cap, "candidate cap exceeded at a point");
    Dyadic v = avg3(f, b);
    if (!best || best->value < v) best = MaximalValue{std::move(v), b, 0};
  };
  for (const auto& s : search.seeds)
    if (s.contains(x) && search.basis.contains(s)) consider(s);
  for (const auto& shape : search.shapes()) {
    std::array<std::vector<Dyadic>, 3> anchors;
    std::array<Dyadic, 3> sides;
    for (int a = 0; a < 3; ++a) {
      sides[a] = Dyadic::pow2(shape[a]);
      anchors[a] = detail::anchors_containing(x[a], sides[a], search.spacing_exp[a]);
    }
    for (const auto& u : anchors[0])
      for (const auto& v : anchors[1])
        for (const auto& w : anchors[2])
          consider(Box3(Rect2(u, v, sides[0], sides[1]), Interval1D(w, w + sides[2])));
  }
  if (!best) throw error(errc::empty_candidate_set, "no candidate box contains the point");
  best->candidates = seen;
  return *best;
}

/// Exact measure of the union of verified piece regions whose average is at
/// least alpha; a lower bound for |{M_B f >= alpha}|.
template <MeasurableSet1D S>
Dyadic superlevel_lower(const Cylinder3<S>& f, const Dyadic& alpha,
                        const std::vector<PieceFamily>& families,
                        const std::optional<BasisSpec>& basis = std::nullopt) {
  std::vector<PieceFamily> kept;
  for (const auto& fam : families) {
    const auto& p = fam.representative;
    if (basis && !basis->contains(p.witness))
      throw error(errc::witness_not_in_basis, "seed witness outside " + basis->to_string());
    if (!p.witness.contains(p.region))
      throw error(errc::average_mismatch, "region not inside witness");
    if (avg3(f, p.witness) != p.claimed_average)
      throw error(errc::average_mismatch, "claimed average does not match the witness");
    if constexpr (std::is_same_v<S, DigitSet>) {
      if (fam.count() > 1 && !f.base.x2set.status_on(fam.anchors).has_value())
        throw error(errc::average_mismatch, "anchor class is not uniform");
    } else {
      if (fam.count() > 1)
        for (const auto& b : fam.anchors.enumerate(std::size_t{1} << 16))
          if (avg3(f, fam.member(b).witness) != p.claimed_average)
            throw error(errc::average_mismatch, "family member average differs");
    }
    if (p.claimed_average >= alpha) kept.push_back(fam);
  }
  check_families_disjoint(kept);
  Dyadic total;
  for (const auto& fam : kept) total += Dyadic(fam.count(), 0) * fam.representative.region.volume();
  return total;
}

template <MeasurableSet1D S>
Dyadic superlevel_lower(const Cylinder3<S>& f, const Dyadic& alpha,
                        const std::vector<CertifiedPiece>& pieces,
                        const std::optional<BasisSpec>& basis = std::nullopt) {
  std::vector<PieceFamily> fams;
  for (const auto& p : pieces) fams.push_back({p, AnchorLattice(0, {})});
  for (auto& fam : fams) fam.representative.anchor = 0;
  return superlevel_lower(f, alpha, fams, basis);
}

// ---- dense grid oracle -------------------------------------------------------

/// Indicator of a set on a regular grid over a domain box, with a 3-D
/// prefix-sum table so any aligned sub-box count costs eight reads.
class Grid3 {
 public:
  Grid3(std::array<std::int64_t, 3> resolution_exp, const Box3& domain,
        std::size_t max_cells = std::size_t{1} << 27)
      : res_(resolution_exp), domain_(domain) {
    std::size_t total = 1;
    for (int a = 0; a < 3; ++a) {
      const Dyadic cells = domain.side(a).ldexp(res_[a]);
      if (cells.exponent() != 0 || !domain.span(a).lo.on_grid(static_cast<std::uint64_t>(std::max<std::int64_t>(res_[a], 0))))
        throw error(errc::resolution_mismatch, "domain not aligned to the grid on axis " + std::to_string(a));
      if (cells > Dyadic(static_cast<long long>(max_cells)))
        throw error(errc::resource_cap, "grid exceeds the cell cap");
      dims_[a] = cells.mantissa().convert_to<std::size_t>();
      total *= dims_[a];
      if (total > max_cells)
        throw error(errc::resource_cap, "grid of " + std::to_string(total) + "+ cells exceeds the cap of " +
                                            std::to_string(max_cells));
    }
    prefix_.assign((dims_[0] + 1) * (dims_[1] + 1) * (dims_[2] + 1), 0);
  }

  /// Rasterizes an explicit cylinder; every cell must be fully inside or
  /// fully outside the set.
  static Grid3 rasterize(const Cylinder3<Set1D>& f, std::array<std::int64_t, 3> resolution_exp,
                         const Box3& domain, std::size_t max_cells = std::size_t{1} << 27) {
    Grid3 g(resolution_exp, domain, max_cells);
    std::array<std::vector<std::uint8_t>, 3> in;
    for (int a = 0; a < 3; ++a) {
      in[a].resize(g.dims_[a]);
      for (std::size_t i = 0; i < g.dims_[a]; ++i) {
        const Interval1D cell = g.cell_span(a, i);
        Dyadic m;
        if (a == 0) m = intersect(f.base.x1, cell).measure();
        else if (a == 1) m = f.base.x2set.measure_within(cell);
        else m = intersect(f.x3, cell).measure();
        if (m.is_zero()) in[a][i] = 0;
        else if (m == cell.measure()) in[a][i] = 1;
        else throw error(errc::resolution_mismatch, "set boundary inside a grid cell on axis " + std::to_string(a));
      }
    }
    g.build([&](std::size_t i, std::size_t j, std::size_t k) { return in[0][i] && in[1][j] && in[2][k]; });
    return g;
  }

  const std::array<std::size_t, 3>& dims() const noexcept { return dims_; }
  const std::array<std::int64_t, 3>& resolution() const noexcept { return res_; }
  const Box3& domain() const noexcept { return domain_; }
  std::size_t cell_count() const { return dims_[0] * dims_[1] * dims_[2]; }
  Dyadic cell_volume() const { return Dyadic::pow2(-(res_[0] + res_[1] + res_[2])); }

  Interval1D cell_span(int axis, std::size_t i) const {
    const Dyadic w = Dyadic::pow2(-res_[axis]);
    const Dyadic lo = domain_.span(axis).lo + Dyadic(i) * w;
    return {lo, lo + w};
  }
  Box3 cell_box(std::size_t i, std::size_t j, std::size_t k) const {
    return Box3::from_spans(cell_span(0, i), cell_span(1, j), cell_span(2, k));
  }

  /// Set cells with index in [lo, hi) per axis.
  std::uint64_t count(const std::array<std::size_t, 3>& lo, const std::array<std::size_t, 3>& hi) const {
    auto p = [&](std::size_t i, std::size_t j, std::size_t k) -> std::int64_t { return prefix_[index(i, j, k)]; };
    std::int64_t s = p(hi[0], hi[1], hi[2]) - p(lo[0], hi[1], hi[2]) - p(hi[0], lo[1], hi[2]) -
                     p(hi[0], hi[1], lo[2]) + p(lo[0], lo[1], hi[2]) + p(lo[0], hi[1], lo[2]) +
                     p(hi[0], lo[1], lo[2]) - p(lo[0], lo[1], lo[2]);
    return static_cast<std::uint64_t>(s);
  }
  std::uint64_t total() const { return count({0, 0, 0}, dims_); }
  bool cell(std::size_t i, std::size_t j, std::size_t k) const {
    return count({i, j, k}, {i + 1, j + 1, k + 1}) != 0;
  }

  /// Cell index range of box ∩ domain; the box must be aligned to the grid.
  std::optional<std::pair<std::array<std::size_t, 3>, std::array<std::size_t, 3>>> cell_range(const Box3& b) const {
    std::array<std::size_t, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
      const Interval1D s = b.span(a);
      const Dyadic l = (s.lo - domain_.span(a).lo).ldexp(res_[a]);
      const Dyadic h = (s.hi - domain_.span(a).lo).ldexp(res_[a]);
      if (l.exponent() != 0 || h.exponent() != 0)
        throw error(errc::resolution_mismatch, "candidate box not aligned to grid cells");
      const Dyadic n(static_cast<long long>(dims_[a]));
      const Dyadic cl = max(l, Dyadic(0)), ch = min(h, n);
      if (!(cl < ch)) return std::nullopt;
      lo[a] = cl.mantissa().convert_to<std::size_t>();
      hi[a] = ch.mantissa().convert_to<std::size_t>();
    }
    return std::make_pair(lo, hi);
  }

  /// Cells of `box`, including those outside the domain.
  Dyadic cells_in(const Box3& b) const { return Dyadic::divide(b.volume(), cell_volume()); }

 private:
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * (dims_[1] + 1) + j) * (dims_[2] + 1) + k;
  }

  template <class F>
  void build(F&& bit) {
    for (std::size_t i = 1; i <= dims_[0]; ++i)
      for (std::size_t j = 1; j <= dims_[1]; ++j)
        for (std::size_t k = 1; k <= dims_[2]; ++k) {
          std::int64_t v = bit(i - 1, j - 1, k - 1) ? 1 : 0;
          v += static_cast<std::int64_t>(prefix_[index(i - 1, j, k)]) + prefix_[index(i, j - 1, k)] +
               prefix_[index(i, j, k - 1)] - prefix_[index(i - 1, j - 1, k)] -
               prefix_[index(i - 1, j, k - 1)] - prefix_[index(i, j - 1, k - 1)] +
               prefix_[index(i - 1, j - 1, k - 1)];
          prefix_[index(i, j, k)] = static_cast<std::uint32_t>(v);
        }
  }

  std::array<std::int64_t, 3> res_;
  Box3 domain_;
  std::array<std::size_t, 3> dims_{};
  std::vector<std::uint32_t> prefix_;
};

/// Per-cell maxima stored as ranks into a sorted table of distinct values;
/// rank 0 means no candidate covers the cell.
struct GridValues {
  std::array<std::size_t, 3> dims{};
  std::vector<Dyadic> table;  // table[r - 1] for rank r, ascending
  std::vector<std::uint16_t> rank;

  Dyadic at(std::size_t i, std::size_t j, std::size_t k) const {
    const auto r = rank[(i * dims[1] + j) * dims[2] + k];
    return r == 0 ? Dyadic(0) : table[r - 1];
  }
  bool covered(std::size_t i, std::size_t j, std::size_t k) const {
    return rank[(i * dims[1] + j) * dims[2] + k] != 0;
  }
};

/// Dense brute force: for each cell, the best average over candidate boxes
/// containing it, each average read from the prefix table.
inline GridValues grid_maximal(const Grid3& grid, const LatticeSearch& search, unsigned threads = 1) {
  std::vector<Box3> boxes;
  for (const auto& s : search.seeds)
    if (search.basis.contains(s)) boxes.push_back(s);
  for (const auto& shape : search.shapes()) {
    std::array<std::vector<Dyadic>, 3> anchors;
    std::array<Dyadic, 3> sides;
    for (int a = 0; a < 3; ++a) {
      if (search.spacing_exp[a] > grid.resolution()[a] || shape[a] < -grid.resolution()[a])
        throw error(errc::resolution_mismatch, "lattice finer than the grid");
      sides[a] = Dyadic::pow2(shape[a]);
      anchors[a] = detail::anchors_meeting(grid.domain().span(a), sides[a], search.spacing_exp[a]);
    }
    for (const auto& u : anchors[0])
      for (const auto& v : anchors[1])
        for (const auto& w : anchors[2]) {
          if (boxes.size() >= search.max_candidates)
            throw error(errc::resource_cap, "grid candidate cap exceeded");
          boxes.push_back(Box3(Rect2(u, v, sides[0], sides[1]), Interval1D(w, w + sides[2])));
        }
  }

  struct Scored {
    std::array<std::size_t, 3> lo, hi;
    Dyadic value;
    std::uint16_t rank = 0;
  };
  std::vector<Scored> scored;
  for (const auto& b : boxes) {
    auto range = grid.cell_range(b);
    if (!range) continue;
    const auto& [lo, hi] = *range;
    Dyadic v = Dyadic::divide(Dyadic(static_cast<unsigned long long>(grid.count(lo, hi))), grid.cells_in(b));
    scored.push_back({lo, hi, std::move(v)});
  }

  GridValues out;
  out.dims = grid.dims();
  for (const auto& s : scored) out.table.push_back(s.value);
  std::sort(out.table.begin(), out.table.end());
  out.table.erase(std::unique(out.table.begin(), out.table.end()), out.table.end());
  if (out.table.size() >= 65535) throw error(errc::resource_cap, "too many distinct grid values");
  for (auto& s : scored)
    s.rank = static_cast<std::uint16_t>(
        std::lower_bound(out.table.begin(), out.table.end(), s.value) - out.table.begin() + 1);

  out.rank.assign(grid.cell_count(), 0);
  const auto& d = out.dims;
  parallel_chunks(d[0], threads, [&](std::size_t ib, std::size_t ie) {
    for (const auto& s : scored) {
      const std::size_t i0 = std::max(s.lo[0], ib), i1 = std::min(s.hi[0], ie);
      for (std::size_t i = i0; i < i1; ++i)
        for (std::size_t j = s.lo[1]; j < s.hi[1]; ++j) {
          auto* row = &out.rank[(i * d[1] + j) * d[2]];
          for (std::size_t k = s.lo[2]; k < s.hi[2]; ++k) row[k] = std::max(row[k], s.rank);
        }
    }
  });
  return out;
}

// ---- unions -------------------------------------------------------------------

/// Exact volume of a union of boxes, by painting the grid spanned by all box
/// edges.
inline Dyadic union_volume(const std::vector<Box3>& boxes, std::size_t max_cells = std::size_t{1} << 27) {
  if (boxes.empty()) return {};
  std::array<std::vector<Dyadic>, 3> cuts;
  for (const auto& b : boxes)
    for (int a = 0; a < 3; ++a) {
      cuts[a].push_back(b.span(a).lo);
      cuts[a].push_back(b.span(a).hi);
    }
  std::array<std::size_t, 3> n{};
  std::size_t total = 1;
  for (int a = 0; a < 3; ++a) {
    std::sort(cuts[a].begin(), cuts[a].end());
    cuts[a].erase(std::unique(cuts[a].begin(), cuts[a].end()), cuts[a].end());
    n[a] = cuts[a].size() - 1;
    total *= n[a];
    if (total > max_cells) throw error(errc::resource_cap, "union grid exceeds the cell cap");
  }
  auto index_of = [&](int a, const Dyadic& v) {
    return static_cast<std::size_t>(std::lower_bound(cuts[a].begin(), cuts[a].end(), v) - cuts[a].begin());
  };
  std::vector<std::uint8_t> painted(total, 0);
  for (const auto& b : boxes) {
    std::array<std::size_t, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
      lo[a] = index_of(a, b.span(a).lo);
      hi[a] = index_of(a, b.span(a).hi);
    }
    for (std::size_t i = lo[0]; i < hi[0]; ++i)
      for (std::size_t j = lo[1]; j < hi[1]; ++j)
        std::fill_n(painted.begin() + static_cast<std::ptrdiff_t>((i * n[1] + j) * n[2] + lo[2]), hi[2] - lo[2],
                    std::uint8_t{1});
  }
  std::array<std::vector<Dyadic>, 3> widths;
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < n[a]; ++i) widths[a].push_back(cuts[a][i + 1] - cuts[a][i]);
  Dyadic vol;
  for (std::size_t i = 0; i < n[0]; ++i)
    for (std::size_t j = 0; j < n[1]; ++j) {
      const std::uint8_t* row = &painted[(i * n[1] + j) * n[2]];
      Dyadic line;
      for (std::size_t k = 0; k < n[2]; ++k)
        if (row[k]) line += widths[2][k];
      if (!line.is_zero()) vol += widths[0][i] * widths[1][j] * line;
    }
  return vol;
}

// ---- dominance -----------------------------------------------------------------

struct DominanceRow {
  Point3 point;
  Dyadic restricted;  // search.basis
  Dyadic strong;
  bool ok = false;
};

/// At each point the restricted-basis value never exceeds the strong-basis
/// value on the same lattice. A point with no candidates scores 0.
template <MeasurableSet1D S>
std::vector<DominanceRow> dominance_check(const Cylinder3<S>& f, const std::vector<Point3>& points,
                                          const LatticeSearch& search) {
  auto value = [&](const Point3& x, const LatticeSearch& s) -> Dyadic {
    try {
      return maximal_lower_at(x, f, s).value;
    } catch (const error& e) {
      if (e.code() == errc::empty_candidate_set) return 0;
      throw;
    }
  };
  const LatticeSearch strong = search.with_basis(BasisSpec::strong());
  std::vector<DominanceRow> rows;
  for (const auto& x : points) {
    DominanceRow r{x, value(x, search), value(x, strong)};
    r.ok = r.restricted <= r.strong;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace rarebase
