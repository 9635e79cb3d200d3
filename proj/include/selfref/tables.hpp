#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "selfref/engine.hpp"
#include "selfref/error.hpp"
#include "selfref/graph.hpp"
#include "selfref/truth_value.hpp"

namespace selfref {

namespace detail {

inline std::vector<TruthValue4> parse_values(std::string_view s, bool classical_only) {
  std::vector<TruthValue4> out;
  for (char c : s) {
    auto v = TruthValue4::from_symbol(c);
    if (!v || (classical_only && !v->is_classical()))
      throw Error(ErrorCode::invalid_argument, std::string("bad truth value '") + c + "'");
    out.push_back(*v);
  }
  return out;
}

inline int log_base(std::size_t n, std::size_t base) {
  int k = 0;
  std::size_t size = 1;
  while (size < n) {
    size *= base;
    ++k;
  }
  if (size != n) return -1;
  return k;
}

}  // namespace detail

/// Map {T,F}^k -> {T,F,L,V}. Rows are in lexicographic order with T < F
/// and the first coordinate most significant.
struct RestrictedTable {
  int k = 0;
  std::vector<TruthValue4> entries{V};

  static RestrictedTable from_string(std::string_view s) {
    int k = detail::log_base(s.size(), 2);
    if (k < 0) throw Error(ErrorCode::invalid_argument, "restricted table needs 2^k entries");
    return {k, detail::parse_values(s, false)};
  }

  std::size_t index(std::span<const TruthValue4> args) const {
    std::size_t i = 0;
    for (auto v : args) {
      if (!v.is_classical()) throw Error(ErrorCode::invalid_argument, "restricted table takes T/F arguments");
      i = i * 2 + (v == F ? 1 : 0);
    }
    return i;
  }

  TruthValue4 at(std::span<const TruthValue4> args) const { return entries.at(index(args)); }

  std::vector<TruthValue4> args(std::size_t row) const {
    std::vector<TruthValue4> out(k);
    for (int j = k - 1; j >= 0; --j, row /= 2) out[j] = (row % 2) ? F : T;
    return out;
  }

  std::string to_string() const { return selfref::to_string(entries); }

  friend bool operator==(const RestrictedTable&, const RestrictedTable&) = default;
};

/// Map {T,F,L,V}^k -> {T,F,L,V}. Rows are in lexicographic order with
/// T < F < L < V and the first coordinate most significant.
struct FullTable {
  int k = 0;
  std::vector<TruthValue4> entries{V};

  static FullTable from_string(std::string_view s) {
    int k = detail::log_base(s.size(), 4);
    if (k < 0) throw Error(ErrorCode::invalid_argument, "full table needs 4^k entries");
    return {k, detail::parse_values(s, false)};
  }

  std::size_t index(std::span<const TruthValue4> args) const {
    std::size_t i = 0;
    for (auto v : args) i = i * 4 + static_cast<std::size_t>(v.index());
    return i;
  }

  TruthValue4 at(std::span<const TruthValue4> args) const { return entries.at(index(args)); }

  std::vector<TruthValue4> args(std::size_t row) const {
    std::vector<TruthValue4> out(k);
    for (int j = k - 1; j >= 0; --j, row /= 4) out[j] = kAllValues[row % 4];
    return out;
  }

  RestrictedTable restricted() const {
    RestrictedTable r{k, std::vector<TruthValue4>(std::size_t{1} << k)};
    for (std::size_t row = 0; row < r.entries.size(); ++row) r.entries[row] = at(r.args(row));
    return r;
  }

  std::string to_string() const { return selfref::to_string(entries); }

  friend bool operator==(const FullTable&, const FullTable&) = default;
};

namespace detail {

inline std::vector<std::string> table_order(const Formula& f, const std::vector<std::string>& order) {
  if (order.empty()) return f.free();
  std::vector<std::string> a = order, b = f.free();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b || std::adjacent_find(a.begin(), a.end()) != a.end())
    throw Error(ErrorCode::free_set_mismatch, "column order is not a permutation of the free nodes");
  return order;
}

}  // namespace detail

/// Truth value of the star for every evaluation of the free nodes, in the
/// column order `order` (the formula's free order when empty).
inline FullTable truth_table(const Formula& f, const std::vector<std::string>& order = {}, EngineOptions options = {}) {
  auto cols = detail::table_order(f, order);
  FullTable table{static_cast<int>(cols.size()), {}};
  const std::size_t rows = std::size_t{1} << (2 * cols.size());
  table.entries.reserve(rows);
  for (std::size_t row = 0; row < rows; ++row) {
    auto args = table.args(row);
    Evaluation e;
    for (std::size_t j = 0; j < cols.size(); ++j) e[cols[j]] = args[j];
    table.entries.push_back(truth_value(Proposition{f, e}, options));
  }
  return table;
}

inline RestrictedTable restricted_truth_table(const Formula& f, const std::vector<std::string>& order = {},
                                              EngineOptions options = {}) {
  auto cols = detail::table_order(f, order);
  RestrictedTable table{static_cast<int>(cols.size()), {}};
  const std::size_t rows = std::size_t{1} << cols.size();
  table.entries.reserve(rows);
  for (std::size_t row = 0; row < rows; ++row) {
    auto args = table.args(row);
    Evaluation e;
    for (std::size_t j = 0; j < cols.size(); ++j) e[cols[j]] = args[j];
    table.entries.push_back(truth_value(Proposition{f, e}, options));
  }
  return table;
}

enum class EquivalenceMode { full, restricted };

/// Same truth table; columns of both formulas follow `f1`'s free order.
inline bool equivalent(const Formula& f1, const Formula& f2, EquivalenceMode mode = EquivalenceMode::full,
                       EngineOptions options = {}) {
  std::vector<std::string> a = f1.free(), b = f2.free();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw Error(ErrorCode::free_set_mismatch, "formulas have different free nodes");
  if (mode == EquivalenceMode::restricted)
    return restricted_truth_table(f1, f1.free(), options) == restricted_truth_table(f2, f1.free(), options);
  return truth_table(f1, f1.free(), options) == truth_table(f2, f1.free(), options);
}

enum class TautologyClass { none, weak, strong };

inline std::string_view to_string(TautologyClass c) {
  switch (c) {
    case TautologyClass::none: return "none";
    case TautologyClass::weak: return "weak";
    case TautologyClass::strong: return "strong";
  }
  return "?";
}

inline TautologyClass tautology_class(const Formula& f, EngineOptions options = {}) {
  auto all_t = [](const std::vector<TruthValue4>& v) {
    return std::all_of(v.begin(), v.end(), [](TruthValue4 x) { return x == T; });
  };
  if (!all_t(restricted_truth_table(f, {}, options).entries)) return TautologyClass::none;
  return all_t(truth_table(f, {}, options).entries) ? TautologyClass::strong : TautologyClass::weak;
}

/// Lower bound on the value at `eps` forced by the restricted table `g`:
/// the inf over T/F choices at V coordinates of the sup over T/F choices at
/// L coordinates, with T/F coordinates held fixed.
inline TruthValue4 inequality_bound(const RestrictedTable& g, std::span<const TruthValue4> eps) {
  if (static_cast<int>(eps.size()) != g.k) throw Error(ErrorCode::invalid_argument, "tuple length differs from table arity");
  std::vector<int> l_coords, v_coords;
  for (int i = 0; i < g.k; ++i) {
    if (eps[i] == L) l_coords.push_back(i);
    if (eps[i] == V) v_coords.push_back(i);
  }
  std::vector<TruthValue4> mu(eps.begin(), eps.end());
  std::optional<TruthValue4> outer;
  for (std::uint32_t vm = 0; vm < (1u << v_coords.size()); ++vm) {
    for (std::size_t j = 0; j < v_coords.size(); ++j) mu[v_coords[j]] = ((vm >> j) & 1u) ? F : T;
    std::optional<TruthValue4> inner;
    for (std::uint32_t lm = 0; lm < (1u << l_coords.size()); ++lm) {
      for (std::size_t j = 0; j < l_coords.size(); ++j) mu[l_coords[j]] = ((lm >> j) & 1u) ? F : T;
      auto value = g.at(mu);
      inner = inner ? sup(*inner, value) : value;
    }
    outer = outer ? inf(*outer, *inner) : *inner;
  }
  return *outer;
}

}  // namespace selfref
