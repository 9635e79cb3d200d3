#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "selfref/engine.hpp"
#include "selfref/error.hpp"
#include "selfref/graph.hpp"
#include "selfref/tables.hpp"
#include "selfref/truth_value.hpp"

namespace selfref {

/// Default letter names for constructed formulas: p, q, r, s, then x5, x6...
inline std::vector<std::string> letter_names(int k) {
  static const char* base[] = {"p", "q", "r", "s"};
  std::vector<std::string> out;
  for (int i = 0; i < k; ++i) out.push_back(i < 4 ? base[i] : "x" + std::to_string(i + 1));
  return out;
}

namespace detail {

// Star output for a base cell: t, f, own value, or its negation.
inline bool cell_output(TruthValue4 g, bool self) {
  if (g == T) return true;
  if (g == F) return false;
  if (g == V) return self;
  return !self;
}

// Row index into a RestrictedTable from letter bits (1 = t), first letter
// most significant. T sorts before F, so each bit is complemented.
inline std::size_t restricted_row(std::uint64_t letter_bits, int k) {
  return (~letter_bits) & ((std::uint64_t{1} << k) - 1);
}

}  // namespace detail

/// Realizes a restricted table with k free letters and one starred
/// (k+1)-ary operator whose last child is the star itself.
inline Formula realize_restricted(const RestrictedTable& g) {
  const int k = g.k;
  auto letters = letter_names(k);
  std::vector<bool> out(std::size_t{1} << (k + 1));
  for (std::uint64_t row = 0; row < out.size(); ++row) {
    bool self = row & 1u;
    out[row] = detail::cell_output(g.entries[detail::restricted_row(row >> 1, k)], self);
  }
  auto table = std::make_shared<const OperatorTable>("G_" + g.to_string(),
                                                     k + 1, std::move(out));
  auto u = std::make_shared<NodeUniverse>();
  for (const auto& p : letters) u->add_letter(p);
  std::vector<std::string> children = letters;
  children.push_back("s");
  u->add_operator("s", table, children);
  return Formula(u, "s", letters, "realized");
}

/// Adds [∧S] ∧ ¬[∨S] over the letter nodes S to `u` and returns its root id.
/// With one letter n this is n ∧ ¬n.
inline std::string add_detector(NodeUniverse& u, const std::vector<std::string>& letters) {
  if (letters.empty()) throw Error(ErrorCode::invalid_argument, "detector needs at least one letter");
  std::string base = "det";
  for (const auto& l : letters) base += "_" + l;
  const std::string root = u.fresh_id(base);
  if (letters.size() == 1) {
    const std::string neg = u.fresh_id(root + "_not");
    u.add_operator(neg, builtin::NOT(), {letters[0]});
    u.add_operator(root, builtin::AND(), {letters[0], neg});
    return root;
  }
  const int r = static_cast<int>(letters.size());
  const std::string conj = u.fresh_id(root + "_and"), disj = u.fresh_id(root + "_or"), neg = u.fresh_id(root + "_not");
  u.add_operator(conj, builtin::and_n(r), letters);
  u.add_operator(disj, builtin::or_n(r), letters);
  u.add_operator(neg, builtin::NOT(), {disj});
  u.add_operator(root, builtin::AND(), {conj, neg});
  return root;
}

/// The detector over fresh letters as a standalone formula, the letters free.
inline Formula detector_gadget(const std::vector<std::string>& letters) {
  auto u = std::make_shared<NodeUniverse>();
  for (const auto& l : letters) u->add_letter(l);
  auto root = add_detector(*u, letters);
  return Formula(u, root, letters, "detector");
}

namespace detail {

// Nonempty subsets of {0..k-1} as bit masks, by size then lexicographically
// on the sorted member list.
inline std::vector<std::uint32_t> ordered_subsets(int k) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t m = 1; m < (1u << k); ++m) out.push_back(m);
  auto members = [k](std::uint32_t m) {
    std::vector<int> v;
    for (int i = 0; i < k; ++i)
      if ((m >> i) & 1u) v.push_back(i);
    return v;
  };
  std::sort(out.begin(), out.end(), [&](std::uint32_t a, std::uint32_t b) {
    auto ma = members(a), mb = members(b);
    if (ma.size() != mb.size()) return ma.size() < mb.size();
    return ma < mb;
  });
  return out;
}

// Inf over {T,F} resolutions of the V coordinates of `eps`, read from h.
inline TruthValue4 v_resolution_inf(const FullTable& h, std::span<const TruthValue4> eps) {
  std::vector<int> vs;
  for (int i = 0; i < h.k; ++i)
    if (eps[i] == V) vs.push_back(i);
  std::vector<TruthValue4> mu(eps.begin(), eps.end());
  std::optional<TruthValue4> acc;
  for (std::uint32_t m = 0; m < (1u << vs.size()); ++m) {
    for (std::size_t j = 0; j < vs.size(); ++j) mu[vs[j]] = ((m >> j) & 1u) ? F : T;
    auto v = h.at(mu);
    acc = acc ? inf(*acc, v) : v;
  }
  return *acc;
}

inline std::string tuple_string(std::span<const TruthValue4> eps) { return to_string(eps); }

}  // namespace detail

/// Throws bound-violated or unrealizable-V-coordinate unless h is realizable.
inline void check_realizable(const FullTable& h) {
  const auto g = h.restricted();
  for (std::size_t row = 0; row < h.entries.size(); ++row) {
    auto eps = h.args(row);
    auto bound = inequality_bound(g, eps);
    if (!leq(bound, h.entries[row]))
      throw Error(ErrorCode::bound_violated, "at (" + detail::tuple_string(eps) + "): " + h.entries[row].symbol() +
                                                 " is not above the bound " + bound.symbol());
  }
  // A letter bound L has every transition it would have bound T or F, so
  // the value can only rise when one coordinate is raised to L.
  for (std::size_t row = 0; row < h.entries.size(); ++row) {
    auto eps = h.args(row);
    for (int i = 0; i < h.k; ++i) {
      if (eps[i] != L) continue;
      for (auto r : kClassicalValues) {
        auto lower = eps;
        lower[i] = r;
        if (!leq(h.at(lower), h.entries[row]))
          throw Error(ErrorCode::bound_violated, "at (" + detail::tuple_string(eps) + "): " + h.entries[row].symbol() +
                                                     " is not above " + h.at(lower).symbol() + " at (" +
                                                     detail::tuple_string(lower) + ")");
      }
    }
  }
  for (std::size_t row = 0; row < h.entries.size(); ++row) {
    auto eps = h.args(row);
    if (std::find(eps.begin(), eps.end(), V) == eps.end()) continue;
    auto want = detail::v_resolution_inf(h, eps);
    if (h.entries[row] != want)
      throw Error(ErrorCode::unrealizable_v_coordinate, "at (" + detail::tuple_string(eps) + "): " +
                                                            h.entries[row].symbol() + " differs from " + want.symbol());
  }
}

/// Realizes a full table: the restricted base plus one lie detector per
/// nonempty letter subset feeding the star. Throws when h is not realizable
/// and verifies the result against the evaluator.
inline Formula realize_full(const FullTable& h, EngineOptions options = {}) {
  check_realizable(h);
  const int k = h.k;
  const auto g = h.restricted();
  auto letters = letter_names(k);
  auto u = std::make_shared<NodeUniverse>();
  for (const auto& p : letters) u->add_letter(p);

  const auto subsets = detail::ordered_subsets(k);
  std::vector<std::string> detectors;
  for (auto m : subsets) {
    std::vector<std::string> s;
    for (int i = 0; i < k; ++i)
      if ((m >> i) & 1u) s.push_back(letters[i]);
    detectors.push_back(add_detector(*u, s));
  }

  // Star inputs: letters, detectors, then the star itself.
  const int nd = static_cast<int>(detectors.size());
  const int arity = k + nd + 1;
  std::vector<bool> out(std::size_t{1} << arity);
  for (std::uint64_t row = 0; row < out.size(); ++row) {
    const bool self = row & 1u;
    const std::uint64_t det_bits = (row >> 1) & ((std::uint64_t{1} << nd) - 1);
    const std::uint64_t letter_bits = row >> (nd + 1);
    const TruthValue4 base = g.entries[detail::restricted_row(letter_bits, k)];
    out[row] = detail::cell_output(base, self);
    if (std::popcount(det_bits) != 1) continue;
    // Detector j sits at input k+j; its bit in det_bits is (nd-1-j).
    const int j = nd - 1 - std::countr_zero(det_bits);
    const std::uint32_t s = subsets[j];
    std::vector<TruthValue4> eps(k);
    for (int i = 0; i < k; ++i) {
      bool t = (letter_bits >> (k - 1 - i)) & 1u;
      eps[i] = ((s >> i) & 1u) ? L : (t ? T : F);
    }
    const auto bound = inequality_bound(g, eps);
    const auto want = h.at(eps);
    const bool drop_true = bound.stuck_true() && !want.stuck_true();
    const bool drop_false = bound.stuck_false() && !want.stuck_false();
    if (drop_true && drop_false) out[row] = !self;
    else if (drop_true) out[row] = false;
    else if (drop_false) out[row] = true;
  }
  auto table = std::make_shared<const OperatorTable>("H_" + h.to_string(), arity, std::move(out));
  std::vector<std::string> children = letters;
  children.insert(children.end(), detectors.begin(), detectors.end());
  children.push_back("s");
  u->add_operator("s", table, children);

  Formula f(u, "s", letters, "realized");
  auto got = truth_table(f, letters, options);
  if (got != h)
    throw Error(ErrorCode::unverified_construction,
                "constructed formula has table " + got.to_string() + ", wanted " + h.to_string());
  return f;
}

/// Four-entry table (h(T), h(F), h(L), h(V)) of a one-letter formula.
struct GateSignature {
  std::array<TruthValue4, 4> values{T, T, T, T};

  static GateSignature from_string(std::string_view s) {
    if (s.size() != 4) throw Error(ErrorCode::invalid_argument, "gate signature needs four values");
    auto v = FullTable::from_string(s);
    return {{v.entries[0], v.entries[1], v.entries[2], v.entries[3]}};
  }
  FullTable table() const { return {1, {values.begin(), values.end()}}; }
  std::string to_string() const { return selfref::to_string(values); }

  friend bool operator==(const GateSignature&, const GateSignature&) = default;
  friend bool operator<(const GateSignature& a, const GateSignature& b) { return a.to_string() < b.to_string(); }
};

struct Gate {
  GateSignature signature;
  Formula witness;
};

/// Every realizable signature among the 256, each with a verified witness,
/// in row order of the signature taken as a base-4 number.
inline std::vector<Gate> enumerate_gates(EngineOptions options = {}) {
  std::vector<Gate> out;
  for (int code = 0; code < 256; ++code) {
    GateSignature sig{{kAllValues[(code >> 6) & 3], kAllValues[(code >> 4) & 3], kAllValues[(code >> 2) & 3],
                       kAllValues[code & 3]}};
    try {
      out.push_back({sig, realize_full(sig.table(), options)});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::bound_violated && e.code() != ErrorCode::unrealizable_v_coordinate) throw;
    }
  }
  return out;
}

inline GateSignature classify_gate(const Formula& f, EngineOptions options = {}) {
  require_valid(f);
  if (f.free().size() != 1 || !f.universe().at(f.free()[0]).is_letter())
    throw Error(ErrorCode::not_a_gate, "a gate has exactly one free node and it is a letter");
  auto t = truth_table(f, {}, options);
  return {{t.entries[0], t.entries[1], t.entries[2], t.entries[3]}};
}

}  // namespace selfref
