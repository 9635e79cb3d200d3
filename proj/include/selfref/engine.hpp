#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "selfref/error.hpp"
#include "selfref/graph.hpp"
#include "selfref/truth_value.hpp"

namespace selfref {

/// Free node -> bound value.
using Evaluation = std::map<std::string, TruthValue4>;

struct Proposition {
  Formula formula;
  Evaluation evaluation;
};

inline constexpr int kDefaultNodeCap = 22;
inline constexpr int kMaxNodeCap = 30;

struct EngineOptions {
  int node_cap = kDefaultNodeCap;
};

/// Node cap from SELFREF_NODE_CAP, else the default.
inline int node_cap_from_env() {
  if (const char* s = std::getenv("SELFREF_NODE_CAP")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && v >= 1 && v <= kMaxNodeCap) return static_cast<int>(v);
  }
  return kDefaultNodeCap;
}

/// Which clauses of the elementary-consequence definition license a flip.
struct FlipRules {
  bool bound_true = false;   // bound T and currently f
  bool bound_false = false;  // bound F and currently t
  bool bound_lie = false;    // bound L
  bool output = false;       // unbound, value disagrees with its own operator
  bool input = false;        // unbound, a parent's row becomes consistent after the flip

  bool any() const { return bound_true || bound_false || bound_lie || output || input; }
};

enum class RuleTag { bound_true, bound_false, bound_lie, output, input };

inline std::string_view to_string(RuleTag r) {
  switch (r) {
    case RuleTag::bound_true: return "boundT";
    case RuleTag::bound_false: return "boundF";
    case RuleTag::bound_lie: return "boundL";
    case RuleTag::output: return "output";
    case RuleTag::input: return "input";
  }
  return "?";
}

struct TraceStep {
  std::string node;
  bool old_value;
  bool new_value;
  RuleTag rule;
};

using Trace = std::vector<TraceStep>;

/// Hypothesis as a bit vector over `StateSpace::nodes()`; bit i set means
/// node i is t.
using StateBits = std::uint64_t;

struct Classification {
  TruthValue4 value;
  /// A hypothesis with the star t from which no flip sequence reaches f.
  std::optional<StateBits> stuck_true_witness;
  /// A hypothesis with the star f from which no flip sequence reaches t.
  std::optional<StateBits> stuck_false_witness;
};

/// A proposition compiled for explicit-state exploration.
///
/// Flip permission for a node depends only on the node, its children, and
/// the families of its parents. Rule (e) is tabulated once per parent family
/// valuation; every other check is a few bit operations.
class StateSpace {
 public:
  explicit StateSpace(const Proposition& prop, EngineOptions options = {}) {
    const Formula& f = prop.formula;
    require_valid(f);
    for (const auto& id : f.free())
      if (!prop.evaluation.count(id))
        throw Error(ErrorCode::unbound_free_node, "free node '" + id + "' has no value in the evaluation");
    for (const auto& [id, v] : prop.evaluation)
      if (!f.is_free(id)) throw Error(ErrorCode::free_set_mismatch, "'" + id + "' is bound but not free");

    auto node_set = f.node_set();
    int cap = std::clamp(options.node_cap, 1, kMaxNodeCap);
    if (static_cast<int>(node_set.size()) > cap)
      throw Error(ErrorCode::too_many_nodes,
                  std::to_string(node_set.size()) + " nodes exceeds the cap of " + std::to_string(cap));

    ids_.assign(node_set.begin(), node_set.end());
    for (std::size_t i = 0; i < ids_.size(); ++i) index_[ids_[i]] = static_cast<int>(i);
    star_ = index_.at(f.star());

    nodes_.resize(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      const Node& n = f.universe().at(ids_[i]);
      auto& cn = nodes_[i];
      cn.table = n.table;
      for (const auto& c : n.children) cn.children.push_back(index_.at(c));
      if (auto it = prop.evaluation.find(ids_[i]); it != prop.evaluation.end()) cn.binding = it->second;
    }
    for (std::size_t d = 0; d < nodes_.size(); ++d) build_family(static_cast<int>(d));
  }

  const std::vector<std::string>& nodes() const { return ids_; }
  int size() const { return static_cast<int>(ids_.size()); }
  int star() const { return star_; }
  std::uint64_t state_count() const { return std::uint64_t{1} << ids_.size(); }

  int index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error(ErrorCode::unknown_node, "'" + id + "' is not a node of the proposition");
    return it->second;
  }

  StateBits encode(const std::map<std::string, bool>& values) const {
    StateBits h = 0;
    for (const auto& [id, v] : values)
      if (v) h |= StateBits{1} << index_of(id);
    return h;
  }

  std::map<std::string, bool> decode(StateBits h) const {
    std::map<std::string, bool> out;
    for (std::size_t i = 0; i < ids_.size(); ++i) out[ids_[i]] = (h >> i) & 1u;
    return out;
  }

  std::string format(StateBits h) const {
    std::string s;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (i) s += ' ';
      s += ids_[i] + "=" + (((h >> i) & 1u) ? "t" : "f");
    }
    return s;
  }

  bool star_value(StateBits h) const { return (h >> star_) & 1u; }

  FlipRules flip_rules(StateBits h, int c) const {
    FlipRules r;
    const auto& n = nodes_[c];
    bool value = (h >> c) & 1u;
    if (n.binding) {
      switch (n.binding->kind()) {
        case TruthValue4::Kind::T: r.bound_true = !value; break;
        case TruthValue4::Kind::F: r.bound_false = value; break;
        case TruthValue4::Kind::L: r.bound_lie = true; break;
        case TruthValue4::Kind::V: break;
      }
      return r;
    }
    r.output = output_inconsistent(h, c);
    r.input = input_flippable(h, c);
    return r;
  }

  bool flip_allowed(StateBits h, int c) const {
    const auto& n = nodes_[c];
    bool value = (h >> c) & 1u;
    if (n.binding) {
      switch (n.binding->kind()) {
        case TruthValue4::Kind::T: return !value;
        case TruthValue4::Kind::F: return value;
        case TruthValue4::Kind::L: return true;
        case TruthValue4::Kind::V: return false;
      }
    }
    return output_inconsistent(h, c) || input_flippable(h, c);
  }

  std::vector<StateBits> successors(StateBits h) const {
    std::vector<StateBits> out;
    for (int c = 0; c < size(); ++c)
      if (flip_allowed(h, c)) out.push_back(h ^ (StateBits{1} << c));
    return out;
  }

  /// Bitset of states from which some flip sequence reaches a state whose
  /// star equals `goal`. Computed as a backward-reachability fixpoint.
  std::vector<std::uint64_t> can_reach(bool goal) const {
    const std::uint64_t states = state_count();
    const std::size_t words = static_cast<std::size_t>((states + 63) / 64);
    std::vector<std::uint64_t> reached(words, 0), frontier(words, 0), next(words, 0);
    for (std::uint64_t h = 0; h < states; ++h)
      if (star_value(h) == goal) {
        reached[h >> 6] |= std::uint64_t{1} << (h & 63);
      }
    frontier = reached;
    std::uint64_t count = states / 2;
    const int n = size();
    while (count < states) {
      std::fill(next.begin(), next.end(), 0);
      bool grew = false;
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t bits = frontier[w];
        while (bits) {
          int b = std::countr_zero(bits);
          bits &= bits - 1;
          StateBits k = (static_cast<StateBits>(w) << 6) | static_cast<StateBits>(b);
          for (int c = 0; c < n; ++c) {
            StateBits h = k ^ (StateBits{1} << c);
            std::uint64_t& slot = reached[h >> 6];
            std::uint64_t mask = std::uint64_t{1} << (h & 63);
            if ((slot & mask) || !flip_allowed(h, c)) continue;
            slot |= mask;
            next[h >> 6] |= mask;
            ++count;
            grew = true;
          }
        }
      }
      if (!grew) break;
      frontier.swap(next);
    }
    return reached;
  }

  Classification classify() const {
    const std::uint64_t states = state_count();
    auto to_false = can_reach(false);
    auto to_true = can_reach(true);
    Classification out;
    for (std::uint64_t h = 0; h < states; ++h) {
      bool in_f = (to_false[h >> 6] >> (h & 63)) & 1u;
      bool in_t = (to_true[h >> 6] >> (h & 63)) & 1u;
      if (!out.stuck_true_witness && star_value(h) && !in_f) out.stuck_true_witness = h;
      if (!out.stuck_false_witness && !star_value(h) && !in_t) out.stuck_false_witness = h;
      if (out.stuck_true_witness && out.stuck_false_witness) break;
    }
    out.value = TruthValue4::from_flags(out.stuck_true_witness.has_value(), out.stuck_false_witness.has_value());
    return out;
  }

  /// Shortest licensed flip sequence from `from` to a state whose star is
  /// `goal`, or nullopt if none exists.
  std::optional<Trace> trace(StateBits from, bool goal) const {
    std::unordered_map<StateBits, std::pair<StateBits, int>> parent;
    std::deque<StateBits> queue{from};
    parent.emplace(from, std::make_pair(from, -1));
    while (!queue.empty()) {
      StateBits h = queue.front();
      queue.pop_front();
      if (star_value(h) == goal) {
        Trace steps;
        for (StateBits cur = h; cur != from;) {
          auto [prev, c] = parent.at(cur);
          bool old_value = (prev >> c) & 1u;
          steps.push_back({ids_[c], old_value, !old_value, tag(flip_rules(prev, c))});
          cur = prev;
        }
        std::reverse(steps.begin(), steps.end());
        return steps;
      }
      for (int c = 0; c < size(); ++c) {
        if (!flip_allowed(h, c)) continue;
        StateBits k = h ^ (StateBits{1} << c);
        if (parent.emplace(k, std::make_pair(h, c)).second) queue.push_back(k);
      }
    }
    return std::nullopt;
  }

  static RuleTag tag(const FlipRules& r) {
    if (r.bound_true) return RuleTag::bound_true;
    if (r.bound_false) return RuleTag::bound_false;
    if (r.bound_lie) return RuleTag::bound_lie;
    if (r.output) return RuleTag::output;
    return RuleTag::input;
  }

 private:
  struct CompiledNode {
    TablePtr table;
    std::vector<int> children;  // positional
    std::optional<TruthValue4> binding;
    // Family of this node as a parent: distinct members, member 0 is the
    // node itself (output coordinate).
    std::vector<int> family;
    std::vector<int> position_member;  // child position -> family member index
    // For each family valuation, the family members rule (e) may flip.
    std::vector<std::uint32_t> input_flips;
    // Parents d of this node, with this node's member index in d's family.
    std::vector<std::pair<int, int>> parents;
  };

  static constexpr int kMaxFamily = 13;

  bool output_inconsistent(StateBits h, int c) const {
    const auto& n = nodes_[c];
    // A constant has no children; rule (d) then reads the output alone.
    if (n.children.empty()) return n.table && n.table->output(0) != static_cast<bool>((h >> c) & 1u);
    std::uint64_t row = 0;
    for (int child : n.children) row = (row << 1) | ((h >> child) & 1u);
    return n.table->output(row) != static_cast<bool>((h >> c) & 1u);
  }

  bool input_flippable(StateBits h, int c) const {
    for (auto [d, member] : nodes_[c].parents) {
      const auto& pd = nodes_[d];
      std::uint32_t valuation = 0;
      for (std::size_t m = 0; m < pd.family.size(); ++m)
        valuation |= static_cast<std::uint32_t>((h >> pd.family[m]) & 1u) << m;
      if ((pd.input_flips[valuation] >> member) & 1u) return true;
    }
    return false;
  }

  // Tabulates rule (e) for parent d:
  //   some nonempty set C of d's children containing c has no row agreeing
  //   with H on C (inputs at positions wired to C, plus d's output), while
  //   toggling the input coordinates wired to c yields a tuple some row has.
  void build_family(int d) {
    auto& nd = nodes_[d];
    if (nd.children.empty()) return;
    nd.family.push_back(d);
    for (int child : nd.children) {
      auto it = std::find(nd.family.begin(), nd.family.end(), child);
      if (it == nd.family.end()) {
        nd.position_member.push_back(static_cast<int>(nd.family.size()));
        nd.family.push_back(child);
      } else {
        nd.position_member.push_back(static_cast<int>(it - nd.family.begin()));
      }
    }
    std::vector<int> child_members;  // distinct members that occur as children
    for (int m : nd.position_member)
      if (std::find(child_members.begin(), child_members.end(), m) == child_members.end()) child_members.push_back(m);
    std::sort(child_members.begin(), child_members.end());

    const int fam = static_cast<int>(nd.family.size());
    const int kc = static_cast<int>(child_members.size());
    if (fam > kMaxFamily)
      throw Error(ErrorCode::too_many_nodes, "family of '" + ids_[d] + "' has " + std::to_string(fam) +
                                                 " distinct nodes; the limit is " + std::to_string(kMaxFamily));

    // Tuples are keyed by (input bits of C's members in child-member order,
    // output bit in bit kc). matched[C] is the set of keys some row produces.
    const std::uint32_t subsets = 1u << kc;
    const std::uint32_t keys = 1u << (kc + 1);
    std::vector<std::vector<bool>> matched(subsets, std::vector<bool>(keys, false));
    const int arity = nd.table->arity();
    std::vector<int> pos_child(arity);  // position -> index into child_members
    for (int j = 0; j < arity; ++j)
      pos_child[j] = static_cast<int>(std::find(child_members.begin(), child_members.end(), nd.position_member[j]) -
                                      child_members.begin());
    for (std::uint64_t row = 0; row < nd.table->rows(); ++row) {
      // Per child member: bit value if all its positions agree, else conflict.
      std::uint32_t value = 0, conflict = 0, seen = 0;
      for (int j = 0; j < arity; ++j) {
        std::uint32_t bit = 1u << pos_child[j];
        bool in = nd.table->input(row, j);
        if (seen & bit) {
          if (static_cast<bool>(value & bit) != in) conflict |= bit;
        } else {
          seen |= bit;
          if (in) value |= bit;
        }
      }
      std::uint32_t out = nd.table->output(row) ? (1u << kc) : 0u;
      for (std::uint32_t C = 1; C < subsets; ++C) {
        if (C & conflict) continue;
        matched[C][(value & C) | out] = true;
      }
    }

    nd.input_flips.assign(std::size_t{1} << fam, 0);
    for (std::uint32_t v = 0; v < (1u << fam); ++v) {
      std::uint32_t key_all = (v & 1u) ? (1u << kc) : 0u;  // member 0 is d
      for (int i = 0; i < kc; ++i)
        if ((v >> child_members[i]) & 1u) key_all |= 1u << i;
      std::uint32_t flips = 0;
      for (std::uint32_t C = 1; C < subsets; ++C) {
        std::uint32_t key = key_all & (C | (1u << kc));
        if (matched[C][key]) continue;
        for (int i = 0; i < kc; ++i) {
          if (!((C >> i) & 1u)) continue;
          if (matched[C][key ^ (1u << i)]) flips |= 1u << child_members[i];
        }
      }
      nd.input_flips[v] = flips;
    }

    for (int m : child_members) nodes_[nd.family[m]].parents.emplace_back(d, m);
  }

  std::vector<std::string> ids_;
  std::unordered_map<std::string, int> index_;
  std::vector<CompiledNode> nodes_;
  int star_ = 0;
};

inline Classification classify(const Proposition& prop, EngineOptions options = {}) {
  return StateSpace(prop, options).classify();
}

inline TruthValue4 truth_value(const Proposition& prop, EngineOptions options = {}) {
  return classify(prop, options).value;
}

inline TruthValue4 truth_value(const Formula& f, const Evaluation& e, EngineOptions options = {}) {
  return truth_value(Proposition{f, e}, options);
}

inline bool flip_allowed(const Proposition& prop, const std::map<std::string, bool>& hypothesis, const std::string& c,
                         EngineOptions options = {}) {
  StateSpace s(prop, options);
  return s.flip_allowed(s.encode(hypothesis), s.index_of(c));
}

inline std::vector<std::map<std::string, bool>> successors(const Proposition& prop,
                                                           const std::map<std::string, bool>& hypothesis,
                                                           EngineOptions options = {}) {
  StateSpace s(prop, options);
  std::vector<std::map<std::string, bool>> out;
  for (auto k : s.successors(s.encode(hypothesis))) out.push_back(s.decode(k));
  return out;
}

inline std::optional<Trace> witness_trace(const Proposition& prop, const std::map<std::string, bool>& from,
                                          bool goal, EngineOptions options = {}) {
  StateSpace s(prop, options);
  return s.trace(s.encode(from), goal);
}

}  // namespace selfref
