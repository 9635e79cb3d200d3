#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "selfref/error.hpp"
#include "selfref/graph.hpp"

namespace selfref {

/// Tree-shaped sentential formula over ¬ ∧ ∨ → ↔. Letters may repeat.
class ClassicalFormula {
 public:
  enum class Op { Letter, Not, And, Or, Implies, Iff };

  static ClassicalFormula letter(std::string name) { return ClassicalFormula(Op::Letter, std::move(name), {}); }
  static ClassicalFormula negation(ClassicalFormula a) { return ClassicalFormula(Op::Not, {}, {std::move(a)}); }
  static ClassicalFormula conj(ClassicalFormula a, ClassicalFormula b) { return binary(Op::And, std::move(a), std::move(b)); }
  static ClassicalFormula disj(ClassicalFormula a, ClassicalFormula b) { return binary(Op::Or, std::move(a), std::move(b)); }
  static ClassicalFormula implies(ClassicalFormula a, ClassicalFormula b) {
    return binary(Op::Implies, std::move(a), std::move(b));
  }
  static ClassicalFormula iff(ClassicalFormula a, ClassicalFormula b) { return binary(Op::Iff, std::move(a), std::move(b)); }

  Op op() const { return op_; }
  const std::string& name() const { return name_; }
  const std::vector<ClassicalFormula>& args() const { return args_; }
  const ClassicalFormula& arg(std::size_t i) const { return args_.at(i); }

  bool eval(const std::map<std::string, bool>& assignment) const {
    switch (op_) {
      case Op::Letter: {
        auto it = assignment.find(name_);
        if (it == assignment.end()) throw Error(ErrorCode::unknown_node, "letter '" + name_ + "' is unassigned");
        return it->second;
      }
      case Op::Not: return !args_[0].eval(assignment);
      case Op::And: return args_[0].eval(assignment) && args_[1].eval(assignment);
      case Op::Or: return args_[0].eval(assignment) || args_[1].eval(assignment);
      case Op::Implies: return !args_[0].eval(assignment) || args_[1].eval(assignment);
      case Op::Iff: return args_[0].eval(assignment) == args_[1].eval(assignment);
    }
    return false;
  }

  std::set<std::string> letters() const {
    std::set<std::string> out;
    collect_letters(out);
    return out;
  }

  std::size_t connective_count() const {
    std::size_t n = op_ == Op::Letter ? 0 : 1;
    for (const auto& a : args_) n += a.connective_count();
    return n;
  }

  /// Fully parenthesised rendering, e.g. `((p & q) | ~p)`.
  std::string to_string() const {
    switch (op_) {
      case Op::Letter: return name_;
      case Op::Not: return "~" + args_[0].to_string();
      case Op::And: return "(" + args_[0].to_string() + " & " + args_[1].to_string() + ")";
      case Op::Or: return "(" + args_[0].to_string() + " | " + args_[1].to_string() + ")";
      case Op::Implies: return "(" + args_[0].to_string() + " -> " + args_[1].to_string() + ")";
      case Op::Iff: return "(" + args_[0].to_string() + " <-> " + args_[1].to_string() + ")";
    }
    return {};
  }

  friend bool operator==(const ClassicalFormula&, const ClassicalFormula&) = default;

 private:
  ClassicalFormula(Op op, std::string name, std::vector<ClassicalFormula> args)
      : op_(op), name_(std::move(name)), args_(std::move(args)) {}

  static ClassicalFormula binary(Op op, ClassicalFormula a, ClassicalFormula b) {
    std::vector<ClassicalFormula> args;
    args.push_back(std::move(a));
    args.push_back(std::move(b));
    return ClassicalFormula(op, {}, std::move(args));
  }

  void collect_letters(std::set<std::string>& out) const {
    if (op_ == Op::Letter) out.insert(name_);
    for (const auto& a : args_) a.collect_letters(out);
  }

  Op op_;
  std::string name_;
  std::vector<ClassicalFormula> args_;
};

namespace detail {

inline TablePtr table_for(ClassicalFormula::Op op) {
  using Op = ClassicalFormula::Op;
  switch (op) {
    case Op::Not: return builtin::NOT();
    case Op::And: return builtin::AND();
    case Op::Or: return builtin::OR();
    case Op::Implies: return builtin::IMPLIES();
    case Op::Iff: return builtin::IFF();
    case Op::Letter: break;
  }
  return nullptr;
}

/// Adds the tree below `cf` to `u`; repeated letters share one node.
inline std::string build_classical(NodeUniverse& u, const ClassicalFormula& cf, const std::string& prefix, int& counter) {
  if (cf.op() == ClassicalFormula::Op::Letter) {
    if (const Node* n = u.find(cf.name()); !n) u.add_letter(cf.name());
    else if (!n->is_letter()) throw Error(ErrorCode::duplicate_name, "letter '" + cf.name() + "' clashes with an operator node");
    return cf.name();
  }
  std::vector<std::string> children;
  for (const auto& a : cf.args()) children.push_back(build_classical(u, a, prefix, counter));
  std::string id;
  do {
    id = prefix + std::to_string(counter++);
  } while (u.contains(id));
  u.add_operator(id, table_for(cf.op()), std::move(children));
  return id;
}

}  // namespace detail

/// Build `cf` into `u` with operator ids `<prefix><n>`; returns the root id.
inline std::string add_classical(NodeUniverse& u, const ClassicalFormula& cf, const std::string& prefix = "n") {
  int counter = 0;
  return detail::build_classical(u, cf, prefix, counter);
}

/// The strongly well-grounded formula of `cf`: letters are free, listed in
/// order of first occurrence.
inline Formula from_classical(const ClassicalFormula& cf, const std::string& prefix = "n") {
  auto u = std::make_shared<NodeUniverse>();
  auto root = add_classical(*u, cf, prefix);
  std::vector<std::string> free;
  std::function<void(const ClassicalFormula&)> walk = [&](const ClassicalFormula& c) {
    if (c.op() == ClassicalFormula::Op::Letter) {
      if (std::find(free.begin(), free.end(), c.name()) == free.end()) free.push_back(c.name());
      return;
    }
    for (const auto& a : c.args()) walk(a);
  };
  walk(cf);
  return Formula(std::move(u), root, std::move(free));
}

/// Unfold a well-grounded formula built from the builtin connectives into a
/// tree. Shared nodes are duplicated.
inline ClassicalFormula unfold_classical(const NodeUniverse& u, const std::string& id) {
  const Node& n = u.at(id);
  if (n.is_letter()) return ClassicalFormula::letter(id);
  const auto& name = n.table->name();
  if (!builtin::is_builtin(*n.table) || name == "ID" || name == "TRUE" || name == "FALSE")
    throw Error(ErrorCode::non_builtin_operator, "node '" + id + "' uses operator " + name);
  auto child = [&](std::size_t i) { return unfold_classical(u, n.children[i]); };
  if (name == "NOT") return ClassicalFormula::negation(child(0));
  if (name == "AND") return ClassicalFormula::conj(child(0), child(1));
  if (name == "OR") return ClassicalFormula::disj(child(0), child(1));
  if (name == "IMPLIES") return ClassicalFormula::implies(child(0), child(1));
  return ClassicalFormula::iff(child(0), child(1));
}

inline ClassicalFormula to_classical(const Formula& f) {
  if (!is_strongly_well_grounded(f))
    throw Error(ErrorCode::not_strongly_well_grounded, "formula '" + f.star() + "' is not strongly well-grounded");
  return unfold_classical(f.universe(), f.star());
}

namespace detail {

inline ClassicalFormula nnf(const ClassicalFormula& cf, bool negate) {
  using Op = ClassicalFormula::Op;
  using CF = ClassicalFormula;
  switch (cf.op()) {
    case Op::Letter: return negate ? CF::negation(cf) : cf;
    case Op::Not: return nnf(cf.arg(0), !negate);
    case Op::And:
      return negate ? CF::disj(nnf(cf.arg(0), true), nnf(cf.arg(1), true))
                    : CF::conj(nnf(cf.arg(0), false), nnf(cf.arg(1), false));
    case Op::Or:
      return negate ? CF::conj(nnf(cf.arg(0), true), nnf(cf.arg(1), true))
                    : CF::disj(nnf(cf.arg(0), false), nnf(cf.arg(1), false));
    case Op::Implies:
      return negate ? CF::conj(nnf(cf.arg(0), false), nnf(cf.arg(1), true))
                    : CF::disj(nnf(cf.arg(0), true), nnf(cf.arg(1), false));
    case Op::Iff: {
      // a <-> b  ==  (a & b) | (~a & ~b);  ~(a <-> b)  ==  (a & ~b) | (~a & b)
      const auto& a = cf.arg(0);
      const auto& b = cf.arg(1);
      if (negate)
        return CF::disj(CF::conj(nnf(a, false), nnf(b, true)), CF::conj(nnf(a, true), nnf(b, false)));
      return CF::disj(CF::conj(nnf(a, false), nnf(b, false)), CF::conj(nnf(a, true), nnf(b, true)));
    }
  }
  return cf;
}

using Clause = std::vector<ClassicalFormula>;  // conjunction of literals

inline std::vector<Clause> dnf_clauses(const ClassicalFormula& nnf_formula) {
  using Op = ClassicalFormula::Op;
  switch (nnf_formula.op()) {
    case Op::Or: {
      auto left = dnf_clauses(nnf_formula.arg(0));
      auto right = dnf_clauses(nnf_formula.arg(1));
      left.insert(left.end(), right.begin(), right.end());
      return left;
    }
    case Op::And: {
      auto left = dnf_clauses(nnf_formula.arg(0));
      auto right = dnf_clauses(nnf_formula.arg(1));
      std::vector<Clause> out;
      for (const auto& l : left)
        for (const auto& r : right) {
          Clause c = l;
          c.insert(c.end(), r.begin(), r.end());
          out.push_back(std::move(c));
        }
      return out;
    }
    default: return {Clause{nnf_formula}};
  }
}

inline ClassicalFormula fold(const std::vector<ClassicalFormula>& items, ClassicalFormula (*join)(ClassicalFormula, ClassicalFormula)) {
  ClassicalFormula acc = items.front();
  for (std::size_t i = 1; i < items.size(); ++i) acc = join(std::move(acc), items[i]);
  return acc;
}

}  // namespace detail

/// Disjunction of conjunctions of literals, by negation-normal form and
/// distribution. Both joins are left-associated.
inline ClassicalFormula to_dnf(const ClassicalFormula& cf) {
  auto clauses = detail::dnf_clauses(detail::nnf(cf, false));
  std::vector<ClassicalFormula> terms;
  terms.reserve(clauses.size());
  for (const auto& c : clauses) terms.push_back(detail::fold(c, &ClassicalFormula::conj));
  return detail::fold(terms, &ClassicalFormula::disj);
}

inline bool is_dnf(const ClassicalFormula& cf) {
  using Op = ClassicalFormula::Op;
  auto literal = [](const ClassicalFormula& c) {
    return c.op() == Op::Letter || (c.op() == Op::Not && c.arg(0).op() == Op::Letter);
  };
  std::function<bool(const ClassicalFormula&)> conj = [&](const ClassicalFormula& c) {
    return literal(c) || (c.op() == Op::And && conj(c.arg(0)) && conj(c.arg(1)));
  };
  std::function<bool(const ClassicalFormula&)> disj = [&](const ClassicalFormula& c) {
    return conj(c) || (c.op() == Op::Or && disj(c.arg(0)) && disj(c.arg(1)));
  };
  return disj(cf);
}

/// Build `cf` into `u` and put an identity node above every node except the
/// root. Returns the root id. Letters already present in `u` are shared.
inline std::string add_expanded(NodeUniverse& u, const ClassicalFormula& cf, const std::string& prefix) {
  NodeUniverse scratch;
  auto root = add_classical(scratch, cf, "o");
  std::map<std::string, std::string> real;   // scratch id -> id in u
  std::map<std::string, std::string> guard;  // scratch id -> id of its "=" node in u
  auto fresh = [&](const std::string& base) {
    std::string id = prefix + base;
    for (int i = 1; u.contains(id); ++i) id = prefix + base + "_" + std::to_string(i);
    return id;
  };
  for (const auto& n : scratch.nodes()) {
    if (n.is_letter()) {
      if (const Node* e = u.find(n.id); !e) u.add_letter(n.id);
      else if (!e->is_letter()) throw Error(ErrorCode::duplicate_name, "letter '" + n.id + "' clashes with an operator node");
      real[n.id] = n.id;
    } else {
      real[n.id] = fresh(n.id);
    }
  }
  for (const auto& n : scratch.nodes()) {
    if (n.id == root) continue;
    guard[n.id] = fresh("eq_" + n.id);
    u.add_operator(guard[n.id], builtin::ID(), {real[n.id]});
  }
  for (const auto& n : scratch.nodes()) {
    if (n.is_letter()) continue;
    std::vector<std::string> children;
    for (const auto& c : n.children) children.push_back(guard.at(c));
    u.add_operator(real[n.id], n.table, std::move(children));
  }
  return real.at(root);
}

/// Expanded disjunctive normal form as a formula whose letters are free.
inline Formula expand_dnf(const ClassicalFormula& cf, const std::string& prefix = "") {
  auto u = std::make_shared<NodeUniverse>();
  auto root = add_expanded(*u, cf, prefix);
  auto letters = cf.letters();
  return Formula(std::move(u), root, std::vector<std::string>(letters.begin(), letters.end()));
}

/// Bottom-up value of a well-grounded formula under a letter assignment.
/// Returns nullopt if the formula has a cycle or an unassigned letter.
inline std::optional<bool> classical_value(const NodeUniverse& u, const std::string& root,
                                           const std::map<std::string, bool>& assignment) {
  std::map<std::string, int> state;  // 1 = in progress, 2 = done
  std::map<std::string, bool> value;
  std::function<std::optional<bool>(const std::string&)> go = [&](const std::string& id) -> std::optional<bool> {
    int& s = state[id];
    if (s == 2) return value[id];
    if (s == 1) return std::nullopt;
    s = 1;
    const Node& n = u.at(id);
    bool result;
    if (n.is_letter()) {
      auto it = assignment.find(id);
      if (it == assignment.end()) return std::nullopt;
      result = it->second;
    } else {
      std::vector<bool> inputs;
      for (const auto& c : n.children) {
        auto v = go(c);
        if (!v) return std::nullopt;
        inputs.push_back(*v);
      }
      std::uint64_t row = 0;
      for (bool b : inputs) row = (row << 1) | (b ? 1u : 0u);
      result = n.table->output(row);
    }
    state[id] = 2;
    value[id] = result;
    return result;
  };
  return go(root);
}

}  // namespace selfref
