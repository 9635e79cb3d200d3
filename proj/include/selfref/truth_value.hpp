#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>

namespace selfref {

/// One of the four truth values T, F, L (lie) and V (vacuous).
///
/// Each value is a pair of flags recording whether a proposition can get
/// stuck in true and whether it can get stuck in false:
/// T = (1,0), F = (0,1), V = (1,1), L = (0,0).
class TruthValue4 {
 public:
  enum class Kind : std::uint8_t { T, F, L, V };

  constexpr TruthValue4() = default;
  constexpr TruthValue4(Kind kind) : kind_(kind) {}  // NOLINT(google-explicit-constructor)

  static constexpr TruthValue4 from_flags(bool stuck_true, bool stuck_false) {
    if (stuck_true) return stuck_false ? Kind::V : Kind::T;
    return stuck_false ? Kind::F : Kind::L;
  }

  constexpr Kind kind() const { return kind_; }
  constexpr bool stuck_true() const { return kind_ == Kind::T || kind_ == Kind::V; }
  constexpr bool stuck_false() const { return kind_ == Kind::F || kind_ == Kind::V; }

  constexpr bool is_classical() const { return kind_ == Kind::T || kind_ == Kind::F; }

  constexpr char symbol() const {
    switch (kind_) {
      case Kind::T: return 'T';
      case Kind::F: return 'F';
      case Kind::L: return 'L';
      case Kind::V: return 'V';
    }
    return '?';
  }

  static constexpr std::optional<TruthValue4> from_symbol(char c) {
    switch (c) {
      case 'T': return TruthValue4(Kind::T);
      case 'F': return TruthValue4(Kind::F);
      case 'L': return TruthValue4(Kind::L);
      case 'V': return TruthValue4(Kind::V);
      default: return std::nullopt;
    }
  }

  /// Position in the T < F < L < V enumeration order used for tables.
  constexpr int index() const { return static_cast<int>(kind_); }

  friend constexpr bool operator==(TruthValue4, TruthValue4) = default;

  friend std::ostream& operator<<(std::ostream& os, TruthValue4 v) { return os << v.symbol(); }

 private:
  Kind kind_ = Kind::V;
};

inline constexpr TruthValue4 T{TruthValue4::Kind::T};
inline constexpr TruthValue4 F{TruthValue4::Kind::F};
inline constexpr TruthValue4 L{TruthValue4::Kind::L};
inline constexpr TruthValue4 V{TruthValue4::Kind::V};

/// Enumeration order for table rows.
inline constexpr std::array<TruthValue4, 4> kAllValues = {T, F, L, V};
inline constexpr std::array<TruthValue4, 2> kClassicalValues = {T, F};

// The diamond V < {F, T} < L. A larger value can get stuck in fewer ways,
// so sup is the componentwise AND of the stuck flags and inf the OR.

constexpr TruthValue4 sup(TruthValue4 a, TruthValue4 b) {
  return TruthValue4::from_flags(a.stuck_true() && b.stuck_true(), a.stuck_false() && b.stuck_false());
}

constexpr TruthValue4 inf(TruthValue4 a, TruthValue4 b) {
  return TruthValue4::from_flags(a.stuck_true() || b.stuck_true(), a.stuck_false() || b.stuck_false());
}

/// a ⪯ b in the diamond order.
constexpr bool leq(TruthValue4 a, TruthValue4 b) { return sup(a, b) == b; }

inline TruthValue4 sup(std::span<const TruthValue4> values) {
  if (values.empty()) throw std::invalid_argument("sup of an empty set");
  TruthValue4 acc = values.front();
  for (auto v : values.subspan(1)) acc = sup(acc, v);
  return acc;
}

inline TruthValue4 inf(std::span<const TruthValue4> values) {
  if (values.empty()) throw std::invalid_argument("inf of an empty set");
  TruthValue4 acc = values.front();
  for (auto v : values.subspan(1)) acc = inf(acc, v);
  return acc;
}

inline TruthValue4 sup(std::initializer_list<TruthValue4> values) {
  return sup(std::span<const TruthValue4>(values.begin(), values.size()));
}

inline TruthValue4 inf(std::initializer_list<TruthValue4> values) {
  return inf(std::span<const TruthValue4>(values.begin(), values.size()));
}

inline std::string to_string(std::span<const TruthValue4> values) {
  std::string out;
  out.reserve(values.size());
  for (auto v : values) out.push_back(v.symbol());
  return out;
}

}  // namespace selfref
