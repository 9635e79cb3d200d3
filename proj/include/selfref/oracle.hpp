#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "selfref/engine.hpp"
#include "selfref/error.hpp"
#include "selfref/graph.hpp"
#include "selfref/truth_value.hpp"

namespace selfref::oracle {

inline constexpr int kOracleNodeCap = 14;
inline constexpr int kOracleMaxCap = 20;

// Direct transcription of the elementary-consequence definition. Every
// condition is tested by enumerating rows and child subsets, the transition
// relation is materialised, and reachability is relational closure. Nothing
// here shares code with StateSpace.

namespace detail {

struct Graph {
  std::vector<std::string> ids;
  std::map<std::string, int> index;
  std::vector<const Node*> nodes;
  std::vector<std::optional<TruthValue4>> binding;
  int star = 0;
};

inline Graph load(const Proposition& prop, int cap) {
  Graph g;
  for (const auto& id : prop.formula.node_set()) {
    g.index[id] = static_cast<int>(g.ids.size());
    g.ids.push_back(id);
  }
  if (g.ids.size() > static_cast<std::size_t>(std::clamp(cap, 1, kOracleMaxCap)))
    throw Error(ErrorCode::too_many_nodes, "oracle cap is " + std::to_string(cap) + " nodes, formula has " +
                                               std::to_string(g.ids.size()));
  for (const auto& id : g.ids) {
    g.nodes.push_back(&prop.formula.universe().at(id));
    auto it = prop.evaluation.find(id);
    g.binding.push_back(it == prop.evaluation.end() ? std::nullopt : std::optional<TruthValue4>(it->second));
  }
  g.star = g.index.at(prop.formula.star());
  return g;
}

inline bool bit(std::uint32_t h, int i) { return (h >> i) & 1u; }

// Tuple of a row or hypothesis restricted to the child positions of `d`
// wired to nodes in C, followed by the output coordinate.
using Tuple = std::vector<bool>;

inline Tuple row_tuple(const OperatorTable& table, std::uint64_t row, const std::vector<int>& positions) {
  Tuple t;
  for (int j : positions) t.push_back((row >> (table.arity() - 1 - j)) & 1u);
  t.push_back(table.output(row));
  return t;
}

// The clause shared by rules (d) and (e): some nonempty C (containing c,
// for (e)) with no row equal to H|C, and some row equal to H|C after the
// given coordinates are negated.
inline bool clause_holds(const Graph& g, std::uint32_t h, int d, int c, bool toggle_output) {
  const Node& parent = *g.nodes[d];
  std::vector<int> distinct;
  std::vector<int> child_index;
  for (const auto& child : parent.children) child_index.push_back(g.index.at(child));
  for (int ci : child_index) {
    bool dup = false;
    for (int x : distinct) dup |= (x == ci);
    if (!dup) distinct.push_back(ci);
  }
  const std::size_t m = distinct.size();
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::set<int> C;
    for (std::size_t i = 0; i < m; ++i)
      if ((mask >> i) & 1u) C.insert(distinct[i]);
    if (!toggle_output && !C.count(c)) continue;
    std::vector<int> positions;
    for (std::size_t j = 0; j < child_index.size(); ++j)
      if (C.count(child_index[j])) positions.push_back(static_cast<int>(j));
    Tuple mine;
    for (int j : positions) mine.push_back(bit(h, child_index[j]));
    mine.push_back(bit(h, d));
    Tuple toggled = mine;
    if (toggle_output) {
      toggled.back() = !toggled.back();
    } else {
      for (std::size_t k = 0; k < positions.size(); ++k)
        if (child_index[positions[k]] == c) toggled[k] = !toggled[k];
    }
    bool some_equal = false, some_toggled = false;
    for (std::uint64_t row = 0; row < parent.table->rows(); ++row) {
      Tuple r = row_tuple(*parent.table, row, positions);
      some_equal |= (r == mine);
      some_toggled |= (r == toggled);
    }
    if (!some_equal && some_toggled) return true;
  }
  return false;
}

inline bool elementary(const Graph& g, std::uint32_t h, int c) {
  if (const auto& b = g.binding[c]) {
    if (*b == T) return !bit(h, c);
    if (*b == F) return bit(h, c);
    if (*b == L) return true;
    return false;
  }
  const Node& node = *g.nodes[c];
  if (node.table && node.children.empty()) {
    if (node.table->output(0) != bit(h, c)) return true;
  } else if (!node.children.empty() && clause_holds(g, h, c, c, true)) {
    return true;
  }
  for (std::size_t d = 0; d < g.nodes.size(); ++d) {
    const Node& parent = *g.nodes[d];
    bool is_parent = false;
    for (const auto& child : parent.children) is_parent |= (child == g.ids[c]);
    if (is_parent && clause_holds(g, h, static_cast<int>(d), c, false)) return true;
  }
  return false;
}

}  // namespace detail

/// Full transition relation: successor lists over 2^N hypotheses, bit i of a
/// state is the i-th node of the formula's node set in sorted id order.
inline std::vector<std::vector<std::uint32_t>> transitions(const Proposition& prop, int cap = kOracleNodeCap) {
  auto g = detail::load(prop, cap);
  const std::uint32_t states = 1u << g.ids.size();
  std::vector<std::vector<std::uint32_t>> next(states);
  for (std::uint32_t h = 0; h < states; ++h)
    for (int c = 0; c < static_cast<int>(g.ids.size()); ++c)
      if (detail::elementary(g, h, c)) next[h].push_back(h ^ (1u << c));
  return next;
}

inline TruthValue4 truth_value(const Proposition& prop, int cap = kOracleNodeCap) {
  require_valid(prop.formula);
  for (const auto& id : prop.formula.free())
    if (!prop.evaluation.count(id)) throw Error(ErrorCode::unbound_free_node, "free node '" + id + "' is unbound");
  auto g = detail::load(prop, cap);
  auto next = transitions(prop, cap);
  const std::uint32_t states = static_cast<std::uint32_t>(next.size());

  auto closure = [&](bool goal) {
    std::vector<bool> reach(states);
    for (std::uint32_t h = 0; h < states; ++h) reach[h] = detail::bit(h, g.star) == goal;
    for (bool changed = true; changed;) {
      changed = false;
      for (std::uint32_t h = 0; h < states; ++h) {
        if (reach[h]) continue;
        for (auto k : next[h])
          if (reach[k]) {
            reach[h] = true;
            changed = true;
            break;
          }
      }
    }
    return reach;
  };
  auto to_false = closure(false);
  auto to_true = closure(true);
  bool all_true_fall = true, all_false_rise = true;
  for (std::uint32_t h = 0; h < states; ++h) {
    if (detail::bit(h, g.star) && !to_false[h]) all_true_fall = false;
    if (!detail::bit(h, g.star) && !to_true[h]) all_false_rise = false;
  }
  if (all_false_rise && !all_true_fall) return T;
  if (all_true_fall && !all_false_rise) return F;
  if (!all_true_fall && !all_false_rise) return V;
  return L;
}

}  // namespace selfref::oracle
