#pragma once

#include <algorithm>
#include <array>
#include <concepts>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rarebase/digits.hpp"
#include "rarebase/dyadic.hpp"
#include "rarebase/error.hpp"

namespace rarebase {

using Point3 = std::array<Dyadic, 3>;

/// Axis-parallel rectangle [x1, x1 + d1) x [x2, x2 + d2).
struct Rect2 {
  Dyadic x1, x2;  // lower-left corner
  Dyadic d1, d2;  // side lengths

  Rect2() = default;
  Rect2(Dyadic a1, Dyadic a2, Dyadic s1, Dyadic s2)
      : x1(std::move(a1)), x2(std::move(a2)), d1(std::move(s1)), d2(std::move(s2)) {
    if (d1.sign() <= 0 || d2.sign() <= 0)
      throw error(errc::invalid_argument, "rectangle sides must be positive");
  }
  static Rect2 from_spans(const Interval1D& s1, const Interval1D& s2) {
    return {s1.lo, s2.lo, s1.measure(), s2.measure()};
  }

  Interval1D x1_span() const { return {x1, x1 + d1}; }
  Interval1D x2_span() const { return {x2, x2 + d2}; }
  Dyadic area() const { return d1 * d2; }

  friend bool operator==(const Rect2&, const Rect2&) = default;
};

/// Rect2 times an x3 interval of positive length.
struct Box3 {
  Rect2 base;
  Interval1D x3;

  Box3() = default;
  Box3(Rect2 b, Interval1D h) : base(std::move(b)), x3(std::move(h)) {
    if (x3.empty()) throw error(errc::invalid_argument, "box height must be positive");
  }
  static Box3 from_spans(const Interval1D& a, const Interval1D& b, const Interval1D& c) {
    return {Rect2::from_spans(a, b), c};
  }

  Interval1D span(int axis) const {
    switch (axis) {
      case 0: return base.x1_span();
      case 1: return base.x2_span();
      default: return x3;
    }
  }
  Dyadic side(int axis) const { return span(axis).measure(); }
  Dyadic volume() const { return base.area() * x3.measure(); }

  bool contains(const Point3& p) const {
    for (int a = 0; a < 3; ++a)
      if (!span(a).contains(p[a])) return false;
    return true;
  }
  bool contains(const Box3& o) const {
    for (int a = 0; a < 3; ++a)
      if (!span(a).contains(o.span(a))) return false;
    return true;
  }
  Box3 vtranslated(const Dyadic& s) const {
    Box3 b = *this;
    b.base.x2 += s;
    return b;
  }

  friend bool operator==(const Box3&, const Box3&) = default;
};

/// Positive-volume intersection.
inline bool overlaps(const Box3& a, const Box3& b) {
  for (int ax = 0; ax < 3; ++ax)
    if (!overlaps(a.span(ax), b.span(ax))) return false;
  return true;
}

template <class S>
concept MeasurableSet1D = requires(const S& s, const Interval1D& w) {
  { s.measure() } -> std::same_as<Dyadic>;
  { s.measure_within(w) } -> std::same_as<Dyadic>;
};

/// x1-interval times a one-dimensional set.
template <MeasurableSet1D S>
struct ProductSet2 {
  Interval1D x1;
  S x2set;

  Dyadic measure() const { return x1.measure() * x2set.measure(); }
  /// m2(this ∩ r)
  Dyadic mass(const Rect2& r) const {
    return intersect(x1, r.x1_span()).measure() * x2set.measure_within(r.x2_span());
  }
};

/// ProductSet2 times an x3 interval.
template <MeasurableSet1D S>
struct Cylinder3 {
  ProductSet2<S> base;
  Interval1D x3;

  Dyadic measure() const { return base.measure() * x3.measure(); }
  /// m3(this ∩ b)
  Dyadic mass(const Box3& b) const {
    return base.mass(b.base) * intersect(x3, b.x3).measure();
  }
};

/// Dilation by delta keeping the lower-left corner fixed.
inline Rect2 homothety(const Rect2& r, const Dyadic& delta) {
  if (delta.sign() <= 0)
    throw error(errc::invalid_argument, "homothety factor must be positive");
  return {r.x1, r.x2, r.d1 * delta, r.d2 * delta};
}

/// Vertical translate by s.
inline Rect2 vtranslate(const Rect2& r, const Dyadic& s) { return {r.x1, r.x2 + s, r.d1, r.d2}; }

/// Right half along x1.
inline Rect2 right_half(const Rect2& r) {
  Dyadic h = r.d1.halve();
  return {r.x1 + h, r.x2, h, r.d2};
}

template <MeasurableSet1D S>
Dyadic avg2(const ProductSet2<S>& e, const Rect2& r) {
  return Dyadic::divide(e.mass(r), r.area());
}

template <MeasurableSet1D S>
Dyadic avg3(const Cylinder3<S>& z, const Box3& b) {
  return Dyadic::divide(z.mass(b), b.volume());
}

inline Dyadic piece_volume(const Rect2& r, const Interval1D& slab) {
  return r.area() * slab.measure();
}

/// Sum of volumes, after checking that no two boxes share positive volume.
inline Dyadic disjoint_union_volume(const std::vector<Box3>& boxes) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return boxes[a].base.x1 < boxes[b].base.x1;
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Box3& a = boxes[order[i]];
    const Dyadic a_end = a.base.x1 + a.base.d1;
    for (std::size_t j = i + 1; j < order.size() && boxes[order[j]].base.x1 < a_end; ++j) {
      if (overlaps(a, boxes[order[j]]))
        throw error(errc::overlap_detected,
                    "pieces " + std::to_string(std::min(order[i], order[j])) + " and " +
                        std::to_string(std::max(order[i], order[j])) + " overlap");
    }
  }
  Dyadic total;
  for (const auto& b : boxes) total += b.volume();
  return total;
}

}  // namespace rarebase
