#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "selfref/error.hpp"

namespace selfref {

/// A named k-ary boolean operator given by its output column.
///
/// Row i of the column holds the output for the input tuple whose child
/// position j carries bit (k-1-j) of i, with 1 meaning t. The first child is
/// therefore the most significant bit.
class OperatorTable {
 public:
  OperatorTable() = default;
  OperatorTable(std::string name, int arity, std::vector<bool> outputs)
      : name_(std::move(name)), arity_(arity), outputs_(std::move(outputs)) {
    if (arity_ < 0 || arity_ > 24) throw Error(ErrorCode::invalid_argument, "operator arity out of range");
    if (outputs_.size() != (std::size_t{1} << arity_))
      throw Error(ErrorCode::bits_length_mismatch,
                  "operator '" + name_ + "' needs " + std::to_string(std::size_t{1} << arity_) + " outputs");
  }

  /// Parse the `"0001"` bit-string form; character i is the output of row i.
  static OperatorTable from_bits(std::string name, int arity, std::string_view bits) {
    if (arity < 0 || arity > 24) throw Error(ErrorCode::invalid_argument, "operator arity out of range");
    if (bits.size() != (std::size_t{1} << arity))
      throw Error(ErrorCode::bits_length_mismatch, "operator '" + name + "' of arity " + std::to_string(arity) +
                                                       " needs " + std::to_string(std::size_t{1} << arity) +
                                                       " bits, got " + std::to_string(bits.size()));
    std::vector<bool> out;
    out.reserve(bits.size());
    for (char c : bits) {
      if (c != '0' && c != '1') throw Error(ErrorCode::syntax_error, "operator bits must be 0 or 1");
      out.push_back(c == '1');
    }
    return OperatorTable(std::move(name), arity, std::move(out));
  }

  const std::string& name() const { return name_; }
  int arity() const { return arity_; }
  std::size_t rows() const { return outputs_.size(); }
  const std::vector<bool>& outputs() const { return outputs_; }
  bool output(std::uint64_t row) const { return outputs_[row]; }

  /// Evaluate on inputs listed by child position.
  bool eval(std::span<const bool> inputs) const {
    std::uint64_t row = 0;
    for (bool b : inputs) row = (row << 1) | (b ? 1u : 0u);
    return outputs_[row];
  }

  /// Input at child position j for row i.
  bool input(std::uint64_t row, int position) const { return (row >> (arity_ - 1 - position)) & 1u; }

  std::string bits() const {
    std::string s;
    s.reserve(outputs_.size());
    for (bool b : outputs_) s.push_back(b ? '1' : '0');
    return s;
  }

  bool same_column(const OperatorTable& o) const { return arity_ == o.arity_ && outputs_ == o.outputs_; }

  friend bool operator==(const OperatorTable&, const OperatorTable&) = default;

 private:
  std::string name_;
  int arity_ = 0;
  std::vector<bool> outputs_{false};
};

using TablePtr = std::shared_ptr<const OperatorTable>;

namespace builtin {

inline TablePtr make(const char* name, int arity, const char* bits) {
  return std::make_shared<const OperatorTable>(OperatorTable::from_bits(name, arity, bits));
}

inline const TablePtr& NOT() { static const TablePtr t = make("NOT", 1, "10"); return t; }
inline const TablePtr& AND() { static const TablePtr t = make("AND", 2, "0001"); return t; }
inline const TablePtr& OR() { static const TablePtr t = make("OR", 2, "0111"); return t; }
inline const TablePtr& IMPLIES() { static const TablePtr t = make("IMPLIES", 2, "1101"); return t; }
inline const TablePtr& IFF() { static const TablePtr t = make("IFF", 2, "1001"); return t; }
inline const TablePtr& ID() { static const TablePtr t = make("ID", 1, "01"); return t; }
inline const TablePtr& TRUE() { static const TablePtr t = make("TRUE", 0, "1"); return t; }
inline const TablePtr& FALSE() { static const TablePtr t = make("FALSE", 0, "0"); return t; }

inline const std::vector<TablePtr>& all() {
  static const std::vector<TablePtr> tables = {NOT(), AND(), OR(), IMPLIES(), IFF(), ID(), TRUE(), FALSE()};
  return tables;
}

inline TablePtr find(std::string_view name) {
  for (const auto& t : all())
    if (t->name() == name) return t;
  return nullptr;
}

/// True when `table` is the builtin of the same name with the same column.
inline bool is_builtin(const OperatorTable& table) {
  auto b = find(table.name());
  return b && b->same_column(table);
}

/// r-ary conjunction; the builtin AND for r = 2.
inline TablePtr and_n(int r) {
  if (r == 2) return AND();
  std::vector<bool> out(std::size_t{1} << r, false);
  out.back() = true;
  return std::make_shared<const OperatorTable>("AND" + std::to_string(r), r, std::move(out));
}

/// r-ary disjunction; the builtin OR for r = 2.
inline TablePtr or_n(int r) {
  if (r == 2) return OR();
  std::vector<bool> out(std::size_t{1} << r, true);
  out.front() = false;
  return std::make_shared<const OperatorTable>("OR" + std::to_string(r), r, std::move(out));
}

inline bool is_conjunction(const OperatorTable& t) {
  if (t.arity() < 1) return false;
  for (std::size_t i = 0; i < t.rows(); ++i)
    if (t.output(i) != (i + 1 == t.rows())) return false;
  return true;
}

inline bool is_disjunction(const OperatorTable& t) {
  if (t.arity() < 1) return false;
  for (std::size_t i = 0; i < t.rows(); ++i)
    if (t.output(i) != (i != 0)) return false;
  return true;
}

}  // namespace builtin

struct Node {
  std::string id;
  TablePtr table;  // null for a propositional letter
  std::vector<std::string> children;

  bool is_letter() const { return table == nullptr; }
  int arity() const { return table ? table->arity() : 0; }
};

/// The node pool formulas are drawn from. Insertion order is kept so that
/// duplicate declarations stay visible to `validate`.
class NodeUniverse {
 public:
  NodeUniverse() = default;

  /// Unchecked construction; use `validate` on formulas over the result.
  explicit NodeUniverse(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (!index_.try_emplace(nodes_[i].id, i).second) ++duplicates_[nodes_[i].id];
  }

  const Node& add_letter(const std::string& id) { return add(Node{id, nullptr, {}}); }

  const Node& add_operator(const std::string& id, TablePtr table, std::vector<std::string> children) {
    if (!table) throw Error(ErrorCode::invalid_argument, "operator node '" + id + "' has no table");
    if (static_cast<int>(children.size()) != table->arity())
      throw Error(ErrorCode::arity_mismatch, "node '" + id + "': operator " + table->name() + " has arity " +
                                                 std::to_string(table->arity()) + ", got " +
                                                 std::to_string(children.size()) + " children");
    return add(Node{id, std::move(table), std::move(children)});
  }

  const Node& add(Node node) {
    if (index_.count(node.id)) throw Error(ErrorCode::duplicate_name, "node '" + node.id + "' already declared");
    index_.emplace(node.id, nodes_.size());
    nodes_.push_back(std::move(node));
    return nodes_.back();
  }

  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  const Node* find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &nodes_[it->second];
  }

  const Node& at(const std::string& id) const {
    const Node* n = find(id);
    if (!n) throw Error(ErrorCode::unknown_node, "no node '" + id + "'");
    return *n;
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  /// Ids declared more than once, with the number of extra declarations.
  const std::map<std::string, int>& duplicates() const { return duplicates_; }

  /// Returns an id not yet used, derived from `base`.
  std::string fresh_id(const std::string& base) const {
    if (!contains(base)) return base;
    for (int i = 1;; ++i) {
      auto candidate = base + "_" + std::to_string(i);
      if (!contains(candidate)) return candidate;
    }
  }

 private:
  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::string, int> duplicates_;
};

using UniversePtr = std::shared_ptr<const NodeUniverse>;

/// Nodes reachable from `roots` through child edges, roots included.
/// Unknown ids are skipped.
inline std::set<std::string> descendant_closure(const NodeUniverse& u, std::span<const std::string> roots) {
  std::set<std::string> seen;
  std::vector<std::string> stack;
  for (const auto& r : roots)
    if (u.contains(r) && seen.insert(r).second) stack.push_back(r);
  while (!stack.empty()) {
    auto id = std::move(stack.back());
    stack.pop_back();
    for (const auto& c : u.at(id).children)
      if (u.contains(c) && seen.insert(c).second) stack.push_back(c);
  }
  return seen;
}

inline std::set<std::string> descendant_closure(const NodeUniverse& u, const std::string& root) {
  return descendant_closure(u, std::span<const std::string>(&root, 1));
}

/// A pointed graph with a set of free nodes: (universe, star, free).
///
/// The node set is the descendant closure of the declared nodes: the star,
/// the free nodes and any extra graph roots. Roots let the star sit below
/// the rest of the graph, as when a truth value is computed for a letter
/// that a self-referential operator points at. Free nodes are kept in
/// declaration order; that order is the default column order of tables.
class Formula {
 public:
  Formula() = default;
  Formula(UniversePtr universe, std::string star, std::vector<std::string> free = {}, std::string name = {})
      : universe_(std::move(universe)), star_(std::move(star)), name_(std::move(name)) {
    for (auto& f : free)
      if (std::find(free_.begin(), free_.end(), f) == free_.end()) free_.push_back(std::move(f));
  }

  const NodeUniverse& universe() const { return *universe_; }
  const UniversePtr& universe_ptr() const { return universe_; }
  const std::string& star() const { return star_; }
  const std::vector<std::string>& free() const { return free_; }
  const std::string& name() const { return name_; }
  const std::vector<std::string>& roots() const { return roots_; }

  bool is_free(const std::string& id) const { return std::find(free_.begin(), free_.end(), id) != free_.end(); }

  std::set<std::string> node_set() const {
    std::vector<std::string> roots{star_};
    roots.insert(roots.end(), free_.begin(), free_.end());
    roots.insert(roots.end(), roots_.begin(), roots_.end());
    return descendant_closure(*universe_, roots);
  }

  std::vector<std::string> letters() const {
    std::vector<std::string> out;
    for (const auto& id : node_set())
      if (universe_->at(id).is_letter()) out.push_back(id);
    return out;
  }

  Formula with_star(std::string star) const {
    Formula f = *this;
    f.star_ = std::move(star);
    return f;
  }
  Formula with_free(std::vector<std::string> free) const {
    Formula f(universe_, star_, std::move(free), name_);
    f.roots_ = roots_;
    return f;
  }
  Formula with_name(std::string name) const {
    Formula f = *this;
    f.name_ = std::move(name);
    return f;
  }
  Formula with_universe(UniversePtr u) const {
    Formula f = *this;
    f.universe_ = std::move(u);
    return f;
  }
  /// Extra declared nodes; ids already covered by the star are dropped.
  Formula with_roots(std::vector<std::string> roots) const {
    Formula f = *this;
    f.roots_.clear();
    for (auto& r : roots)
      if (r != star_ && std::find(f.roots_.begin(), f.roots_.end(), r) == f.roots_.end()) f.roots_.push_back(std::move(r));
    return f;
  }

 private:
  UniversePtr universe_ = std::make_shared<const NodeUniverse>();
  std::string star_;
  std::vector<std::string> free_;
  std::vector<std::string> roots_;
  std::string name_;
};

struct Diagnostic {
  ErrorCode code;
  std::string node;
  std::string message;
};

/// Structural checks; an empty result means the formula is valid.
inline std::vector<Diagnostic> validate(const Formula& f) {
  std::vector<Diagnostic> errs;
  const auto& u = f.universe();
  for (const auto& [id, extra] : u.duplicates()) {
    bool letter = u.at(id).is_letter();
    errs.push_back({letter ? ErrorCode::duplicate_letter_node : ErrorCode::duplicate_node, id,
                    "node '" + id + "' declared " + std::to_string(extra + 1) + " times"});
  }
  if (!u.contains(f.star())) errs.push_back({ErrorCode::star_outside_graph, f.star(), "star '" + f.star() + "' is not a node"});
  for (const auto& id : f.free())
    if (!u.contains(id)) errs.push_back({ErrorCode::free_outside_graph, id, "free node '" + id + "' is not a node"});
  for (const auto& id : f.roots())
    if (!u.contains(id)) errs.push_back({ErrorCode::star_outside_graph, id, "graph root '" + id + "' is not a node"});
  for (const auto& id : f.node_set()) {
    const Node& n = u.at(id);
    if (n.table && n.arity() != static_cast<int>(n.children.size()))
      errs.push_back({ErrorCode::arity_mismatch, id,
                      "node '" + id + "': " + n.table->name() + " has arity " + std::to_string(n.arity()) + " but " +
                          std::to_string(n.children.size()) + " children"});
    if (!n.table && !n.children.empty())
      errs.push_back({ErrorCode::arity_mismatch, id, "letter '" + id + "' has children"});
    for (const auto& c : n.children)
      if (!u.contains(c)) errs.push_back({ErrorCode::dangling_child, id, "node '" + id + "' has unknown child '" + c + "'"});
  }
  return errs;
}

inline void require_valid(const Formula& f) {
  auto errs = validate(f);
  if (!errs.empty()) throw Error(errs.front().code, errs.front().message);
}

/// The pointed subgraph rooted at `n`; free nodes are those of `f` inside it.
inline Formula subformula_at(const Formula& f, const std::string& n) {
  if (!f.node_set().count(n)) throw Error(ErrorCode::unknown_node, "'" + n + "' is not a node of the formula");
  auto closure = descendant_closure(f.universe(), n);
  std::vector<std::string> free;
  for (const auto& id : f.free())
    if (closure.count(id)) free.push_back(id);
  return Formula(f.universe_ptr(), n, std::move(free));
}

inline bool is_well_grounded(const Formula& f) {
  const auto& u = f.universe();
  auto nodes = f.node_set();
  if (descendant_closure(u, f.star()).size() != nodes.size()) return false;
  // Acyclicity by DFS colouring.
  std::map<std::string, int> colour;
  std::vector<std::pair<std::string, std::size_t>> stack;
  for (const auto& start : nodes) {
    if (colour[start] != 0) continue;
    stack.emplace_back(start, 0);
    colour[start] = 1;
    while (!stack.empty()) {
      auto& [id, next] = stack.back();
      const auto& children = u.at(id).children;
      if (next < children.size()) {
        const auto& c = children[next++];
        int& cc = colour[c];
        if (cc == 1) return false;
        if (cc == 0) {
          cc = 1;
          stack.emplace_back(c, 0);
        }
      } else {
        colour[id] = 2;
        stack.pop_back();
      }
    }
  }
  return true;
}

inline bool is_strongly_well_grounded(const Formula& f) {
  if (!is_well_grounded(f)) return false;
  std::set<std::string> free(f.free().begin(), f.free().end());
  auto letters = f.letters();
  return free == std::set<std::string>(letters.begin(), letters.end());
}

/// Replace letter `p` of `phi` by `psi`: edges into p are redirected to
/// psi's star and p is dropped.
inline Formula substitute(const Formula& psi, const Formula& phi, const std::string& p) {
  auto phi_nodes = phi.node_set();
  auto psi_nodes = psi.node_set();
  for (const auto& id : psi_nodes)
    if (phi_nodes.count(id)) throw Error(ErrorCode::shared_nodes, "formulas share node '" + id + "'");
  if (!phi_nodes.count(p) || !phi.universe().at(p).is_letter())
    throw Error(ErrorCode::p_not_letter, "'" + p + "' is not a letter of the formula");

  auto redirect = [&](const std::string& id) { return id == p ? psi.star() : id; };
  auto u = std::make_shared<NodeUniverse>();
  for (const auto& id : phi_nodes) {
    if (id == p) continue;
    Node n = phi.universe().at(id);
    for (auto& c : n.children) c = redirect(c);
    u->add(std::move(n));
  }
  for (const auto& id : psi_nodes) u->add(psi.universe().at(id));

  std::vector<std::string> free;
  for (const auto& id : phi.free())
    if (id != p) free.push_back(id);
  for (const auto& id : psi.free()) free.push_back(id);
  std::vector<std::string> roots;
  for (const auto& id : phi.roots()) roots.push_back(redirect(id));
  for (const auto& id : psi.roots()) roots.push_back(id);
  return Formula(std::move(u), redirect(phi.star()), std::move(free), phi.name()).with_roots(std::move(roots));
}

/// Every operator gets every node of the formula as a child: its original
/// child positions first, then the remaining nodes sorted by id. The new
/// table ignores the appended coordinates.
inline Formula make_completely_connected(const Formula& f) {
  auto nodes = f.node_set();
  auto u = std::make_shared<NodeUniverse>();
  for (const auto& id : nodes) {
    const Node& n = f.universe().at(id);
    if (n.is_letter()) {
      u->add(n);
      continue;
    }
    std::vector<std::string> children = n.children;
    std::set<std::string> present(children.begin(), children.end());
    for (const auto& other : nodes)
      if (!present.count(other)) children.push_back(other);
    int q = n.arity();
    int k = static_cast<int>(children.size());
    if (k > 24) throw Error(ErrorCode::too_many_nodes, "completely connected operator too wide");
    std::vector<bool> out(std::size_t{1} << k);
    for (std::uint64_t row = 0; row < out.size(); ++row) out[row] = n.table->output(row >> (k - q));
    auto table = std::make_shared<const OperatorTable>(n.table->name() + "_cc" + std::to_string(k), k, std::move(out));
    u->add(Node{id, std::move(table), std::move(children)});
  }
  return f.with_universe(std::move(u));
}

/// Copy the node set of `f` into `target`, renaming operator nodes with
/// `prefix` and sharing letters by id. `target_ptr` is the handle the
/// returned formula refers to; it must point at `target`. The id mapping
/// is written to `renamed` when given.
inline Formula import_formula(NodeUniverse& target, const UniversePtr& target_ptr, const Formula& f,
                              const std::string& prefix, std::map<std::string, std::string>* renamed = nullptr) {
  auto nodes = f.node_set();
  std::map<std::string, std::string> rename;
  std::set<std::string> taken;
  for (const auto& id : nodes) {
    const Node& n = f.universe().at(id);
    if (n.is_letter()) {
      if (const Node* existing = target.find(id); existing && !existing->is_letter())
        throw Error(ErrorCode::duplicate_name, "letter '" + id + "' clashes with an operator node");
      rename[id] = id;
      continue;
    }
    std::string candidate = prefix + id;
    for (int i = 1; target.contains(candidate) || taken.count(candidate); ++i)
      candidate = prefix + id + "_" + std::to_string(i);
    taken.insert(candidate);
    rename[id] = candidate;
  }
  for (const auto& id : nodes) {
    Node copy = f.universe().at(id);
    if (copy.is_letter()) {
      if (!target.contains(id)) target.add(std::move(copy));
      continue;
    }
    copy.id = rename.at(id);
    for (auto& c : copy.children) c = rename.at(c);
    target.add(std::move(copy));
  }
  std::vector<std::string> free;
  for (const auto& id : f.free()) free.push_back(rename.at(id));
  std::vector<std::string> roots;
  for (const auto& id : f.roots()) roots.push_back(rename.at(id));
  if (renamed) *renamed = rename;
  return Formula(target_ptr, rename.at(f.star()), std::move(free), f.name()).with_roots(std::move(roots));
}

}  // namespace selfref
