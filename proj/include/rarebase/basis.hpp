#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rarebase/dyadic.hpp"
#include "rarebase/error.hpp"
#include "rarebase/geometry.hpp"

namespace rarebase {

/// A set S of integers: an explicit list, a one-signed arithmetic
/// progression, a half line, or all of Z.
class ExponentSet {
 public:
  enum class Kind { list, progression, at_most, at_least, all };
  enum class Sign { any, nonneg, nonpos };

  static ExponentSet list(std::vector<std::int64_t> values) {
    ExponentSet s(Kind::list);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    s.values_ = std::move(values);
    return s;
  }
  static ExponentSet progression(std::int64_t a, std::int64_t d, Sign sign = Sign::any) {
    ExponentSet s(Kind::progression);
    s.a_ = a;
    s.d_ = d < 0 ? -d : d;
    s.sign_ = sign;
    return s;
  }
  static ExponentSet at_most(std::int64_t bound) {
    ExponentSet s(Kind::at_most);
    s.a_ = bound;
    return s;
  }
  static ExponentSet at_least(std::int64_t bound) {
    ExponentSet s(Kind::at_least);
    s.a_ = bound;
    return s;
  }
  static ExponentSet all() { return ExponentSet(Kind::all); }

  Kind kind() const noexcept { return kind_; }
  const std::vector<std::int64_t>& elements() const noexcept { return values_; }

  bool contains(std::int64_t j) const {
    switch (kind_) {
      case Kind::list: return std::binary_search(values_.begin(), values_.end(), j);
      case Kind::progression: {
        if (sign_ == Sign::nonneg && j < 0) return false;
        if (sign_ == Sign::nonpos && j > 0) return false;
        if (d_ == 0) return j == a_;
        return (j - a_) % d_ == 0;
      }
      case Kind::at_most: return j <= a_;
      case Kind::at_least: return j >= a_;
      case Kind::all: return true;
    }
    return false;
  }

  /// Explicit lists are empty when they have no entries; a progression is
  /// empty when its single point is excluded by the sign filter.
  bool empty() const {
    if (kind_ == Kind::list) return values_.empty();
    if (kind_ == Kind::progression && d_ == 0) return !contains(a_);
    return false;
  }
  bool finite() const {
    return kind_ == Kind::list || (kind_ == Kind::progression && d_ == 0);
  }
  bool unbounded_below() const {
    switch (kind_) {
      case Kind::progression: return d_ != 0 && sign_ != Sign::nonneg;
      case Kind::at_most:
      case Kind::all: return true;
      default: return false;
    }
  }
  bool unbounded_above() const {
    switch (kind_) {
      case Kind::progression: return d_ != 0 && sign_ != Sign::nonpos;
      case Kind::at_least:
      case Kind::all: return true;
      default: return false;
    }
  }

  std::string to_string() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::list:
        os << "list=";
        for (std::size_t i = 0; i < values_.size(); ++i) os << (i ? "," : "") << values_[i];
        break;
      case Kind::progression:
        os << "apd=" << a_ << "," << d_ << ","
           << (sign_ == Sign::any ? "any" : sign_ == Sign::nonneg ? "nonneg" : "nonpos");
        break;
      case Kind::at_most: os << "le=" << a_; break;
      case Kind::at_least: os << "ge=" << a_; break;
      case Kind::all: os << "all"; break;
    }
    return os.str();
  }

  friend bool operator==(const ExponentSet&, const ExponentSet&) = default;

 private:
  explicit ExponentSet(Kind k) : kind_(k) {}

  Kind kind_;
  std::vector<std::int64_t> values_;
  std::int64_t a_ = 0, d_ = 0;
  Sign sign_ = Sign::any;
};

enum class Orientation { normal, swapped };

inline const char* to_string(Orientation o) { return o == Orientation::normal ? "normal" : "swapped"; }

/// log2(d2 / d1) when the ratio is an exact power of two.
inline std::optional<std::int64_t> eccentricity_exponent(const Rect2& r) {
  return Dyadic::divide(r.d2, r.d1).log2_exact();
}

/// Homothecy-invariant families of axis-parallel boxes in R^3.
class BasisSpec {
 public:
  struct Strong {
    friend bool operator==(const Strong&, const Strong&) = default;
  };
  struct FixedEccentricity {
    std::int64_t j;
    friend bool operator==(const FixedEccentricity&, const FixedEccentricity&) = default;
  };
  struct ZygmundShifted {
    ExponentSet exponents;
    Orientation orientation = Orientation::normal;
    friend bool operator==(const ZygmundShifted&, const ZygmundShifted&) = default;
  };
  using Variant = std::variant<Strong, FixedEccentricity, ZygmundShifted>;

  BasisSpec() : v_(Strong{}) {}
  BasisSpec(Variant v) : v_(std::move(v)) {  // NOLINT
    if (auto* z = std::get_if<ZygmundShifted>(&v_); z && z->exponents.empty())
      throw error(errc::invalid_argument, "zygmund basis needs a nonempty exponent set");
  }

  static BasisSpec strong() { return {Strong{}}; }
  static BasisSpec fixed_eccentricity(std::int64_t j) { return {FixedEccentricity{j}}; }
  static BasisSpec zygmund(ExponentSet s, Orientation o = Orientation::normal) {
    return {ZygmundShifted{std::move(s), o}};
  }

  const Variant& variant() const noexcept { return v_; }
  bool is_strong() const { return std::holds_alternative<Strong>(v_); }

  /// Finite set of admissible eccentricity exponents, if any.
  bool finite_exponents() const {
    if (std::holds_alternative<FixedEccentricity>(v_)) return true;
    if (auto* z = std::get_if<ZygmundShifted>(&v_)) return z->exponents.finite();
    return false;
  }

  /// Whether a box with planar eccentricity exponent e is a member.
  bool admits_exponent(std::int64_t e) const {
    if (std::holds_alternative<Strong>(v_)) return true;
    if (auto* f = std::get_if<FixedEccentricity>(&v_)) return e == f->j;
    const auto& z = std::get<ZygmundShifted>(v_);
    return z.exponents.contains(z.orientation == Orientation::normal ? e : -e);
  }

  /// Height is never constrained. Swapped orientation reads the ratio d1/d2.
  bool contains(const Box3& b) const {
    if (std::holds_alternative<Strong>(v_)) return true;
    auto e = eccentricity_exponent(b.base);
    return e && admits_exponent(*e);
  }

  BasisSpec with_orientation(Orientation o) const {
    if (auto* z = std::get_if<ZygmundShifted>(&v_)) return zygmund(z->exponents, o);
    return *this;
  }

  std::string to_string() const {
    if (std::holds_alternative<Strong>(v_)) return "strong";
    if (auto* f = std::get_if<FixedEccentricity>(&v_)) return "fixed-ecc:" + std::to_string(f->j);
    const auto& z = std::get<ZygmundShifted>(v_);
    return "zygmund:" + z.exponents.to_string() +
           (z.orientation == Orientation::swapped ? ":swapped" : "");
  }

  /// strong | fixed-ecc:J | zygmund:list=a,b,.. | zygmund:apd=a,d[,sign] |
  /// zygmund:le=B | zygmund:ge=B | zygmund:all, optionally suffixed :swapped.
  static BasisSpec parse(std::string_view text) {
    auto fail = [&](const std::string& why) {
      return error(errc::parse_error, "bad basis '" + std::string(text) + "': " + why);
    };
    auto to_int = [&](std::string_view t) -> std::int64_t {
      std::string s(t);
      char* end = nullptr;
      errno = 0;
      long long v = std::strtoll(s.c_str(), &end, 10);
      if (s.empty() || *end != '\0' || errno != 0) throw fail("expected integer, got '" + s + "'");
      return v;
    };
    auto split = [](std::string_view t, char sep) {
      std::vector<std::string_view> out;
      std::size_t start = 0;
      while (true) {
        auto p = t.find(sep, start);
        out.push_back(t.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
        if (p == std::string_view::npos) break;
        start = p + 1;
      }
      return out;
    };

    if (text == "strong") return strong();
    if (text.starts_with("fixed-ecc:")) return fixed_eccentricity(to_int(text.substr(10)));
    if (!text.starts_with("zygmund:")) throw fail("unknown family");
    std::string_view rest = text.substr(8);
    Orientation o = Orientation::normal;
    if (rest.ends_with(":swapped")) {
      o = Orientation::swapped;
      rest.remove_suffix(8);
    } else if (rest.ends_with(":normal")) {
      rest.remove_suffix(7);
    }
    if (rest == "all") return zygmund(ExponentSet::all(), o);
    auto eq = rest.find('=');
    if (eq == std::string_view::npos) throw fail("expected key=value");
    auto key = rest.substr(0, eq);
    auto val = rest.substr(eq + 1);
    if (key == "list") {
      std::vector<std::int64_t> vals;
      for (auto p : split(val, ',')) vals.push_back(to_int(p));
      if (vals.empty()) throw fail("empty list");
      return zygmund(ExponentSet::list(std::move(vals)), o);
    }
    if (key == "apd") {
      auto parts = split(val, ',');
      if (parts.size() < 2 || parts.size() > 3) throw fail("apd takes a,d[,sign]");
      ExponentSet::Sign sg = ExponentSet::Sign::any;
      if (parts.size() == 3) {
        auto s = parts[2];
        if (s == "any") sg = ExponentSet::Sign::any;
        else if (s == "nonneg" || s == "+" || s == "pos") sg = ExponentSet::Sign::nonneg;
        else if (s == "nonpos" || s == "-" || s == "neg") sg = ExponentSet::Sign::nonpos;
        else throw fail("sign must be any|nonneg|nonpos");
      }
      return zygmund(ExponentSet::progression(to_int(parts[0]), to_int(parts[1]), sg), o);
    }
    if (key == "le") return zygmund(ExponentSet::at_most(to_int(val)), o);
    if (key == "ge") return zygmund(ExponentSet::at_least(to_int(val)), o);
    throw fail("unknown key '" + std::string(key) + "'");
  }

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;

 private:
  Variant v_;
};

// ---- exponent selection ----------------------------------------------------

/// Eccentricity exponent of the k-th base rectangle, sides (2^(1-k), 2^-j_k),
/// read in the given orientation.
inline std::int64_t shifted_exponent(int k, std::int64_t jk, Orientation o) {
  std::int64_t e = (k - 1) - jk;
  return o == Orientation::normal ? e : -e;
}

inline bool strictly_decreasing_naturals(std::span<const std::int64_t> js) {
  if (js.empty() || js.back() < 1) return false;
  for (std::size_t i = 1; i < js.size(); ++i)
    if (js[i - 1] <= js[i]) return false;
  return true;
}

/// j_{k-1} > N + j_k for k = 2..N.
inline bool gap_condition(std::span<const std::int64_t> js) {
  const auto n = static_cast<std::int64_t>(js.size());
  for (std::size_t i = 1; i < js.size(); ++i)
    if (js[i - 1] <= n + js[i]) return false;
  return true;
}

inline bool exponents_in_set(std::span<const std::int64_t> js, const ExponentSet& s, Orientation o) {
  for (std::size_t k = 1; k <= js.size(); ++k)
    if (!s.contains(shifted_exponent(static_cast<int>(k), js[k - 1], o))) return false;
  return true;
}

struct ExponentSelection {
  std::vector<std::int64_t> j;  // j_1 > ... > j_N
  Orientation orientation = Orientation::normal;
};

/// Default schedule j_k = (N - k + 1)(N + 1).
inline std::vector<std::int64_t> default_schedule(int n) {
  std::vector<std::int64_t> js;
  for (int k = 1; k <= n; ++k) js.push_back(static_cast<std::int64_t>(n - k + 1) * (n + 1));
  return js;
}

/// Picks j_1 > ... > j_N with the gap condition and every shifted exponent in
/// S. Starts from the default schedule and raises entries as needed, from
/// j_N upward; returns the default schedule itself whenever it is admissible.
inline ExponentSelection select_exponents(const ExponentSet& s, int n,
                                          std::int64_t search_bound = 4096) {
  if (n < 1) throw error(errc::invalid_argument, "N must be positive");
  if (s.empty()) throw error(errc::insufficient_exponents, "empty exponent set");
  const auto base = default_schedule(n);
  for (Orientation o : {Orientation::normal, Orientation::swapped}) {
    std::vector<std::int64_t> js(static_cast<std::size_t>(n));
    bool ok = true;
    for (int k = n; k >= 1 && ok; --k) {
      std::int64_t lo = base[static_cast<std::size_t>(k - 1)];
      if (k < n) lo = std::max<std::int64_t>(lo, js[static_cast<std::size_t>(k)] + n + 1);
      std::int64_t j = lo;
      while (j <= search_bound && !s.contains(shifted_exponent(k, j, o))) ++j;
      if (j > search_bound) ok = false;
      else js[static_cast<std::size_t>(k - 1)] = j;
    }
    if (ok) return {js, o};
  }
  throw error(errc::insufficient_exponents,
              "no admissible exponents for N=" + std::to_string(n) + " in S=" + s.to_string() +
                  " below " + std::to_string(search_bound));
}

}  // namespace rarebase
