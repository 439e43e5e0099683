#pragma once

// Subsets of [0, 1) described by constraints on binary digits.
//
// A point t in [0, 1) is written t = sum_p d_p 2^-p. A DigitSet fixes the
// digits d_p at finitely many positions p; an AnchorLattice is the set of
// multiples of 2^-q in [0, 1) whose digits are fixed at some positions <= q.
// Both have closed-form measures and counts, which is what lets the
// construction be verified exactly when explicit interval lists would have
// 2^60 or more members.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rarebase/dyadic.hpp"
#include "rarebase/error.hpp"

namespace rarebase {

struct DigitConstraint {
  std::uint64_t position;  // weight 2^-position, position >= 1
  int bit;

  friend bool operator==(const DigitConstraint&, const DigitConstraint&) = default;
};

namespace detail {

// Sorts by position and drops duplicates. Returns false on a conflict.
inline bool normalize_constraints(std::vector<DigitConstraint>& c) {
  for (const auto& x : c) {
    if (x.position == 0) throw error(errc::invalid_argument, "digit position must be >= 1");
    if (x.bit != 0 && x.bit != 1) throw error(errc::invalid_argument, "digit must be 0 or 1");
  }
  std::sort(c.begin(), c.end(), [](const DigitConstraint& a, const DigitConstraint& b) {
    return a.position < b.position || (a.position == b.position && a.bit < b.bit);
  });
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i].position == c[i - 1].position && c[i].bit != c[i - 1].bit) return false;
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return true;
}

inline const DigitConstraint* find_position(const std::vector<DigitConstraint>& c,
                                            std::uint64_t pos) {
  auto it = std::lower_bound(c.begin(), c.end(), pos, [](const DigitConstraint& x, std::uint64_t p) {
    return x.position < p;
  });
  return (it != c.end() && it->position == pos) ? &*it : nullptr;
}

inline std::uint64_t log2_cap(std::size_t cap) {
  std::uint64_t k = 0;
  while (k < 63 && (std::size_t{1} << (k + 1)) <= cap) ++k;
  return k;
}

}  // namespace detail

/// Multiples of 2^-q in [0, 1) with some digits (positions <= q) fixed.
class AnchorLattice {
 public:
  AnchorLattice() = default;
  AnchorLattice(std::uint64_t q, std::vector<DigitConstraint> fixed)
      : q_(q), fixed_(std::move(fixed)) {
    if (!detail::normalize_constraints(fixed_))
      throw error(errc::invalid_argument, "anchor lattice with conflicting digits");
    if (!fixed_.empty() && fixed_.back().position > q_)
      throw error(errc::invalid_argument, "anchor lattice digit beyond its scale");
  }

  std::uint64_t scale_exponent() const noexcept { return q_; }
  Dyadic spacing() const { return Dyadic::pow2(-static_cast<std::int64_t>(q_)); }
  const std::vector<DigitConstraint>& fixed() const noexcept { return fixed_; }

  bigint count() const { return bigint(1) << static_cast<unsigned>(q_ - fixed_.size()); }

  /// Smallest member: fixed digits set, free digits zero.
  Dyadic representative() const {
    Dyadic r;
    for (const auto& c : fixed_)
      if (c.bit) r += Dyadic::pow2(-static_cast<std::int64_t>(c.position));
    return r;
  }

  bool contains(const Dyadic& b) const {
    if (b.sign() < 0 || b >= Dyadic(1) || !b.on_grid(q_)) return false;
    return std::all_of(fixed_.begin(), fixed_.end(),
                       [&](const DigitConstraint& c) { return b.digit(c.position) == c.bit; });
  }

  bool is_free(std::uint64_t pos) const {
    return pos >= 1 && pos <= q_ && detail::find_position(fixed_, pos) == nullptr;
  }

  /// All members in increasing order.
  std::vector<Dyadic> enumerate(std::size_t cap) const {
    std::uint64_t free = q_ - fixed_.size();
    if (free > detail::log2_cap(cap))
      throw error(errc::resource_cap, "anchor lattice has 2^" + std::to_string(free) +
                                          " members, cap is " + std::to_string(cap));
    std::vector<std::uint64_t> free_pos;
    for (std::uint64_t p = 1; p <= q_; ++p)
      if (is_free(p)) free_pos.push_back(p);
    Dyadic base = representative();
    std::vector<Dyadic> out;
    out.reserve(std::size_t{1} << free);
    for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << free); ++idx) {
      bigint m = 0;
      for (std::size_t r = 0; r < free_pos.size(); ++r)
        if ((idx >> (free_pos.size() - 1 - r)) & 1u)
          bit_set(m, static_cast<unsigned>(q_ - free_pos[r]));
      out.push_back(base + Dyadic(m, q_));
    }
    return out;
  }

  /// True when some anchor belongs to both lattices.
  bool intersects(const AnchorLattice& o) const {
    std::vector<DigitConstraint> all = fixed_;
    all.insert(all.end(), o.fixed_.begin(), o.fixed_.end());
    // A member of the finer lattice must have zero digits below the coarser scale.
    std::uint64_t lo = std::min(q_, o.q_), hi = std::max(q_, o.q_);
    for (std::uint64_t p = lo + 1; p <= hi; ++p) all.push_back({p, 0});
    return detail::normalize_constraints(all);
  }

  friend bool operator==(const AnchorLattice&, const AnchorLattice&) = default;

 private:
  std::uint64_t q_ = 0;
  std::vector<DigitConstraint> fixed_;
};

/// {t in [0, 1) : digit_p(t) = bit for every constraint}.
class DigitSet {
 public:
  DigitSet() = default;
  explicit DigitSet(std::vector<DigitConstraint> constraints) : c_(std::move(constraints)) {
    empty_ = !detail::normalize_constraints(c_);
    if (empty_) c_.clear();
  }

  const std::vector<DigitConstraint>& constraints() const noexcept { return c_; }
  bool empty() const noexcept { return empty_; }
  std::uint64_t depth() const { return c_.empty() ? 0 : c_.back().position; }

  Dyadic measure() const {
    if (empty_) return {};
    return Dyadic::pow2(-static_cast<std::int64_t>(c_.size()));
  }

  bool contains(const Dyadic& t) const {
    if (empty_ || t.sign() < 0 || t >= Dyadic(1)) return false;
    return std::all_of(c_.begin(), c_.end(),
                       [&](const DigitConstraint& c) { return t.digit(c.position) == c.bit; });
  }

  /// Whether the first q digits of c violate no constraint at a position <= q.
  bool prefix_admissible(const Dyadic& c, std::uint64_t q) const {
    if (empty_) return false;
    for (const auto& x : c_) {
      if (x.position > q) break;
      if (c.digit(x.position) != x.bit) return false;
    }
    return true;
  }

  /// measure(this ∩ [0, x)).
  Dyadic measure_below(const Dyadic& x) const {
    if (empty_ || x.sign() <= 0) return {};
    if (x >= Dyadic(1)) return measure();
    const std::uint64_t e = x.exponent();
    Dyadic acc;
    bool consistent = true;
    std::size_t idx = 0;  // first constraint with position >= p
    for (std::uint64_t p = 1; p <= e && consistent; ++p) {
      while (idx < c_.size() && c_[idx].position < p) ++idx;
      const DigitConstraint* here =
          (idx < c_.size() && c_[idx].position == p) ? &c_[idx] : nullptr;
      const int b = x.digit(p);
      if (b == 1 && (here == nullptr || here->bit == 0)) {
        // points sharing x's first p-1 digits with digit p = 0 all lie below x
        auto beyond = static_cast<std::int64_t>(c_.size() - idx - (here ? 1 : 0));
        acc += Dyadic::pow2(-static_cast<std::int64_t>(p) - beyond);
      }
      if (here && here->bit != b) consistent = false;
    }
    return acc;
  }

  Dyadic measure_within(const Interval1D& w) const {
    if (w.empty()) return {};
    return measure_below(w.hi) - measure_below(w.lo);
  }

  /// Explicit interval list; refuses to expand beyond `cap` raw cells.
  Set1D to_set1d(std::size_t cap) const {
    if (empty_) return {};
    const std::uint64_t P = depth();
    if (P == 0) return Set1D{Interval1D(0, 1)};
    const std::uint64_t free = P - c_.size();
    if (free > detail::log2_cap(cap))
      throw error(errc::resource_cap, "digit set expands to 2^" + std::to_string(free) +
                                          " cells, cap is " + std::to_string(cap));
    std::vector<std::uint64_t> free_pos;
    for (std::uint64_t p = 1; p <= P; ++p)
      if (!detail::find_position(c_, p)) free_pos.push_back(p);
    bigint base = 0;
    for (const auto& c : c_)
      if (c.bit) bit_set(base, static_cast<unsigned>(P - c.position));
    std::vector<Interval1D> cells;
    cells.reserve(std::size_t{1} << free);
    for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << free); ++idx) {
      bigint m = base;
      for (std::size_t r = 0; r < free_pos.size(); ++r)
        if ((idx >> (free_pos.size() - 1 - r)) & 1u)
          bit_set(m, static_cast<unsigned>(P - free_pos[r]));
      cells.emplace_back(Dyadic(m, P), Dyadic(m + 1, P));
    }
    return Set1D(std::move(cells));
  }

  /// Admissibility status shared by every anchor of the lattice, or nullopt
  /// when anchors disagree. A uniform status means the windows
  /// [b, b + 2^-q) for b in the lattice all meet this set in translated
  /// copies of one another (free anchor digits never touch a constraint, and
  /// adding them to a point of the representative's window never carries).
  std::optional<bool> status_on(const AnchorLattice& lat) const {
    if (empty_) return false;
    bool any_free = false;
    for (const auto& x : c_) {
      if (x.position > lat.scale_exponent()) break;
      if (const auto* f = detail::find_position(lat.fixed(), x.position)) {
        if (f->bit != x.bit) return false;
      } else {
        any_free = true;
      }
    }
    if (any_free) return std::nullopt;
    return true;
  }

  /// Whether this ∩ (W + d) = (this ∩ W) + d for the aligned window
  /// W = [c, c + 2^-q). Both c and d must be multiples of 2^-q with W and
  /// W + d inside [0, 1).
  bool shift_preserves(const Dyadic& c, std::uint64_t q, const Dyadic& d) const {
    const Dyadic width = Dyadic::pow2(-static_cast<std::int64_t>(q));
    const Dyadic c2 = c + d;
    if (!c.on_grid(q) || !d.on_grid(q) || c.sign() < 0 || c2.sign() < 0 ||
        c + width > Dyadic(1) || c2 + width > Dyadic(1))
      throw error(errc::invalid_argument, "shift_preserves needs aligned windows inside [0, 1)");
    return prefix_admissible(c, q) == prefix_admissible(c2, q);
  }

  friend bool operator==(const DigitSet&, const DigitSet&) = default;

 private:
  std::vector<DigitConstraint> c_;
  bool empty_ = false;
};

}  // namespace rarebase
