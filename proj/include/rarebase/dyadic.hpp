#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rarebase/error.hpp"

namespace rarebase {

using bigint = boost::multiprecision::cpp_int;

/// Exact dyadic rational mantissa / 2^exponent.
///
/// Values are kept canonical: either the exponent is zero or the mantissa is
/// odd. Zero is stored as 0 / 2^0. Every arithmetic operation is exact.
class Dyadic {
 public:
  Dyadic() = default;
  template <std::integral T>
  Dyadic(T v) : m_(v) {}  // NOLINT: integers convert implicitly
  Dyadic(bigint mantissa, std::uint64_t exponent)
      : m_(std::move(mantissa)), e_(exponent) {
    normalize();
  }

  /// 2^k for any signed k.
  static Dyadic pow2(std::int64_t k) {
    if (k >= 0) return Dyadic(bigint(1) << static_cast<unsigned>(k), 0);
    return Dyadic(bigint(1), static_cast<std::uint64_t>(-k));
  }

  const bigint& mantissa() const noexcept { return m_; }
  std::uint64_t exponent() const noexcept { return e_; }
  int sign() const { return m_.sign(); }
  bool is_zero() const { return m_.is_zero(); }

  Dyadic operator-() const {
    Dyadic r = *this;
    r.m_ = -r.m_;
    return r;
  }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    auto e = std::max(a.e_, b.e_);
    return Dyadic(shifted(a, e) + shifted(b, e), e);
  }
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) {
    auto e = std::max(a.e_, b.e_);
    return Dyadic(shifted(a, e) - shifted(b, e), e);
  }
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    return Dyadic(a.m_ * b.m_, a.e_ + b.e_);
  }
  Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
  Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
  Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.e_ == b.e_ && a.m_ == b.m_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    auto e = std::max(a.e_, b.e_);
    auto l = shifted(a, e);
    auto r = shifted(b, e);
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  /// Multiplies by 2^k.
  Dyadic ldexp(std::int64_t k) const {
    if (is_zero()) return {};
    if (k < 0) return Dyadic(m_, e_ + static_cast<std::uint64_t>(-k));
    auto uk = static_cast<std::uint64_t>(k);
    if (uk <= e_) return Dyadic(m_, e_ - uk);
    return Dyadic(m_ << static_cast<unsigned>(uk - e_), 0);
  }
  Dyadic halve() const { return ldexp(-1); }
  Dyadic twice() const { return ldexp(1); }
  Dyadic abs() const { return sign() < 0 ? -*this : *this; }

  bigint floor() const {
    if (e_ == 0) return m_;
    if (m_ >= 0) return m_ >> static_cast<unsigned>(e_);
    bigint mag = -m_;
    bigint one = bigint(1) << static_cast<unsigned>(e_);
    return -((mag + one - 1) >> static_cast<unsigned>(e_));
  }

  /// log2 of the value when it is a positive power of two.
  std::optional<std::int64_t> log2_exact() const {
    if (m_ <= 0) return std::nullopt;
    auto lo = boost::multiprecision::lsb(m_);
    auto hi = boost::multiprecision::msb(m_);
    if (lo != hi) return std::nullopt;
    return static_cast<std::int64_t>(hi) - static_cast<std::int64_t>(e_);
  }

  /// True when the value is an integer multiple of 2^-q.
  bool on_grid(std::uint64_t q) const { return e_ <= q; }

  /// Binary digit of weight 2^-pos (pos >= 1) for a value in [0, 1).
  int digit(std::uint64_t pos) const {
    if (pos == 0 || pos > e_) return 0;
    return boost::multiprecision::bit_test(m_, static_cast<unsigned>(e_ - pos)) ? 1 : 0;
  }

  /// a / b when the quotient is dyadic; throws NotDyadic otherwise.
  static Dyadic divide(const Dyadic& a, const Dyadic& b) {
    if (b.is_zero()) throw error(errc::invalid_argument, "division by zero");
    if (a.is_zero()) return {};
    bigint mb = b.m_ < 0 ? bigint(-b.m_) : b.m_;
    auto t = boost::multiprecision::lsb(mb);
    bigint odd = mb >> t;
    bigint q, r;
    boost::multiprecision::divide_qr(a.m_, odd, q, r);
    if (!r.is_zero())
      throw error(errc::not_dyadic, a.to_string() + " / " + b.to_string() + " is not dyadic");
    if (b.m_ < 0) q = -q;
    // a.m 2^-ea / (odd 2^t 2^-eb) = q 2^(eb - ea - t)
    auto shift = static_cast<std::int64_t>(b.e_) - static_cast<std::int64_t>(a.e_) -
                 static_cast<std::int64_t>(t);
    return Dyadic(q, 0).ldexp(shift);
  }

  /// "m" for integers, otherwise "m/d" with d = 2^e written in decimal.
  std::string to_string() const {
    if (e_ == 0) return m_.str();
    return m_.str() + "/" + (bigint(1) << static_cast<unsigned>(e_)).str();
  }

  /// Accepts "a", "a/b" (b a power of two), "a/2^e", "2^k" and terminating
  /// decimals such as "0.375".
  static Dyadic parse(std::string_view s) {
    auto fail = [&] { return error(errc::parse_error, "not a dyadic: '" + std::string(s) + "'"); };
    auto parse_int = [&](std::string_view t) -> bigint {
      if (t.empty()) throw fail();
      std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
      if (i == t.size()) throw fail();
      for (std::size_t k = i; k < t.size(); ++k)
        if (t[k] < '0' || t[k] > '9') throw fail();
      // strip leading zeros so cpp_int does not read octal
      std::string body(t.substr(i));
      auto nz = body.find_first_not_of('0');
      body = nz == std::string::npos ? "0" : body.substr(nz);
      return bigint((t[0] == '-' ? "-" : "") + body);
    };
    auto parse_pow = [&](std::string_view t) -> std::optional<std::int64_t> {
      if (t.size() < 3 || t.substr(0, 2) != "2^") return std::nullopt;
      auto k = parse_int(t.substr(2));
      if (k > 1 << 20 || k < -(1 << 20)) throw fail();
      return k.convert_to<std::int64_t>();
    };
    if (auto k = parse_pow(s)) return pow2(*k);
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
      Dyadic num(parse_int(s.substr(0, slash)), 0);
      auto den_text = s.substr(slash + 1);
      Dyadic den;
      if (auto k = parse_pow(den_text))
        den = pow2(*k);
      else
        den = Dyadic(parse_int(den_text), 0);
      if (den.is_zero()) throw fail();
      try {
        return divide(num, den);
      } catch (const error&) {
        throw fail();
      }
    }
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      auto whole = s.substr(0, dot);
      auto frac = s.substr(dot + 1);
      bool neg = !whole.empty() && whole[0] == '-';
      std::string digits = std::string(neg ? whole.substr(1) : whole) + std::string(frac);
      if (digits.empty()) throw fail();
      bigint num = parse_int(digits);
      bigint ten = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) ten *= 10;
      Dyadic r;
      try {
        r = divide(Dyadic(num, 0), Dyadic(ten, 0));
      } catch (const error&) {
        throw fail();
      }
      return neg ? -r : r;
    }
    return Dyadic(parse_int(s), 0);
  }

  double to_double() const {
    bigint m = m_;
    std::int64_t e = static_cast<std::int64_t>(e_);
    if (!m.is_zero()) {
      auto bits = static_cast<std::int64_t>(boost::multiprecision::msb(m < 0 ? bigint(-m) : m));
      if (bits > 60) {
        auto drop = bits - 60;
        m = (m < 0) ? bigint(-((-m) >> drop)) : bigint(m >> drop);
        e -= drop;
      }
    }
    return std::ldexp(m.convert_to<double>(), static_cast<int>(-e));
  }

  /// Human-readable approximation; never used for comparisons.
  std::string to_decimal(int significant = 12) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, to_double());
    return buf;
  }

 private:
  static bigint shifted(const Dyadic& d, std::uint64_t e) {
    return d.m_ << static_cast<unsigned>(e - d.e_);
  }

  void normalize() {
    if (m_.is_zero()) {
      e_ = 0;
      return;
    }
    if (e_ == 0) return;
    bool neg = m_ < 0;
    bigint mag = neg ? bigint(-m_) : m_;
    std::uint64_t tz = boost::multiprecision::lsb(mag);
    std::uint64_t s = std::min<std::uint64_t>(tz, e_);
    if (s == 0) return;
    mag >>= static_cast<unsigned>(s);
    m_ = neg ? bigint(-mag) : mag;
    e_ -= s;
  }

  bigint m_{0};
  std::uint64_t e_ = 0;
};

inline Dyadic min(const Dyadic& a, const Dyadic& b) { return b < a ? b : a; }
inline Dyadic max(const Dyadic& a, const Dyadic& b) { return a < b ? b : a; }

/// Half-open interval [lo, hi). Closed intervals in the mathematics differ
/// only by null sets.
struct Interval1D {
  Dyadic lo;
  Dyadic hi;

  Interval1D() = default;
  Interval1D(Dyadic l, Dyadic h) : lo(std::move(l)), hi(std::move(h)) {
    if (hi < lo)
      throw error(errc::invalid_argument,
                  "interval with hi < lo: [" + lo.to_string() + ", " + hi.to_string() + ")");
  }

  Dyadic measure() const { return hi - lo; }
  bool empty() const { return lo == hi; }
  bool contains(const Dyadic& t) const { return lo <= t && t < hi; }
  bool contains(const Interval1D& o) const { return o.empty() || (lo <= o.lo && o.hi <= hi); }
  Interval1D translated(const Dyadic& d) const { return {lo + d, hi + d}; }

  friend bool operator==(const Interval1D&, const Interval1D&) = default;
};

inline Interval1D intersect(const Interval1D& a, const Interval1D& b) {
  Dyadic l = max(a.lo, b.lo);
  Dyadic h = min(a.hi, b.hi);
  if (h < l) h = l;
  return {l, h};
}

/// True when the intersection has positive length.
inline bool overlaps(const Interval1D& a, const Interval1D& b) {
  return max(a.lo, b.lo) < min(a.hi, b.hi);
}

/// Finite disjoint union of half-open dyadic intervals, sorted and merged.
class Set1D {
 public:
  Set1D() = default;
  Set1D(std::vector<Interval1D> intervals) : iv_(std::move(intervals)) {  // NOLINT
    canonicalize();
  }
  Set1D(std::initializer_list<Interval1D> intervals)
      : Set1D(std::vector<Interval1D>(intervals)) {}

  const std::vector<Interval1D>& intervals() const noexcept { return iv_; }
  std::size_t size() const noexcept { return iv_.size(); }
  bool empty() const noexcept { return iv_.empty(); }

  Dyadic measure() const {
    Dyadic s;
    for (const auto& i : iv_) s += i.measure();
    return s;
  }

  bool contains(const Dyadic& t) const {
    auto it = std::partition_point(iv_.begin(), iv_.end(),
                                   [&](const Interval1D& i) { return i.hi <= t; });
    return it != iv_.end() && it->contains(t);
  }

  /// measure(s ∩ window) without materializing the intersection.
  Dyadic measure_within(const Interval1D& w) const {
    Dyadic s;
    if (w.empty()) return s;
    auto it = std::partition_point(iv_.begin(), iv_.end(),
                                   [&](const Interval1D& i) { return i.hi <= w.lo; });
    for (; it != iv_.end() && it->lo < w.hi; ++it) s += intersect(*it, w).measure();
    return s;
  }

  friend bool operator==(const Set1D&, const Set1D&) = default;

  struct canonical_tag {};
  Set1D(canonical_tag, std::vector<Interval1D> intervals) : iv_(std::move(intervals)) {}

 private:
  void canonicalize() {
    std::erase_if(iv_, [](const Interval1D& i) { return i.empty(); });
    std::sort(iv_.begin(), iv_.end(),
              [](const Interval1D& a, const Interval1D& b) { return a.lo < b.lo; });
    std::vector<Interval1D> out;
    out.reserve(iv_.size());
    for (auto& i : iv_) {
      if (!out.empty() && i.lo <= out.back().hi) {
        if (out.back().hi < i.hi) out.back().hi = std::move(i.hi);
      } else {
        out.push_back(std::move(i));
      }
    }
    iv_ = std::move(out);
  }

  std::vector<Interval1D> iv_;
};

inline Dyadic measure(const Set1D& s) { return s.measure(); }

inline Set1D intersect(const Set1D& a, const Set1D& b) {
  std::vector<Interval1D> out;
  const auto& x = a.intervals();
  const auto& y = b.intervals();
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (overlaps(x[i], y[j])) out.push_back(intersect(x[i], y[j]));
    if (x[i].hi < y[j].hi)
      ++i;
    else
      ++j;
  }
  return Set1D(std::move(out));
}

inline Set1D unite(const Set1D& a, const Set1D& b) {
  std::vector<Interval1D> all = a.intervals();
  all.insert(all.end(), b.intervals().begin(), b.intervals().end());
  return Set1D(std::move(all));
}

inline Set1D restrict(const Set1D& s, const Interval1D& window) {
  return intersect(s, Set1D{window});
}

inline Set1D translate(const Set1D& s, const Dyadic& d) {
  std::vector<Interval1D> out;
  out.reserve(s.size());
  for (const auto& i : s.intervals()) out.push_back(i.translated(d));
  return Set1D(Set1D::canonical_tag{}, std::move(out));
}

/// Image under t -> delta * t; delta must be positive.
inline Set1D scale(const Set1D& s, const Dyadic& delta) {
  if (delta.sign() <= 0)
    throw error(errc::invalid_argument, "scale factor must be positive, got " + delta.to_string());
  std::vector<Interval1D> out;
  out.reserve(s.size());
  for (const auto& i : s.intervals()) out.push_back({i.lo * delta, i.hi * delta});
  return Set1D(Set1D::canonical_tag{}, std::move(out));
}

}  // namespace rarebase
