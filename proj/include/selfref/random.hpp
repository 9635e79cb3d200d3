#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "selfref/classical.hpp"
#include "selfref/graph.hpp"

namespace selfref {

using Rng = std::mt19937_64;

struct RandomFormulaOptions {
  int max_nodes = 10;
  int max_free = 2;
  int max_arity = 3;
  double letter_probability = 0.25;
  double custom_probability = 0.4;  // random table instead of a builtin
};

namespace detail {

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline TablePtr random_table(Rng& rng, int arity, double custom_probability) {
  std::vector<TablePtr> builtins;
  for (const auto& t : builtin::all())
    if (t->arity() == arity) builtins.push_back(t);
  if (!builtins.empty() && std::bernoulli_distribution(1.0 - custom_probability)(rng))
    return builtins[uniform(rng, 0, static_cast<int>(builtins.size()) - 1)];
  std::vector<bool> out(std::size_t{1} << arity);
  std::string name = "R";
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::bernoulli_distribution(0.5)(rng);
    name += out[i] ? '1' : '0';
  }
  return std::make_shared<const OperatorTable>(name, arity, std::move(out));
}

}  // namespace detail

/// A random valid formula: operator children are drawn from all nodes, so
/// cycles are common. Every node is reachable from the star or a free node.
inline Formula random_formula(Rng& rng, const RandomFormulaOptions& o = {}) {
  const int n = detail::uniform(rng, 1, std::max(1, o.max_nodes));
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("n" + std::to_string(i));
  auto u = std::make_shared<NodeUniverse>();
  for (const auto& id : ids) {
    if (std::bernoulli_distribution(o.letter_probability)(rng)) {
      u->add_letter(id);
      continue;
    }
    int arity = detail::uniform(rng, 0, o.max_arity);
    std::vector<std::string> children;
    for (int j = 0; j < arity; ++j) children.push_back(ids[detail::uniform(rng, 0, n - 1)]);
    u->add_operator(id, detail::random_table(rng, arity, o.custom_probability), children);
  }
  const std::string star = ids[detail::uniform(rng, 0, n - 1)];
  auto reach = descendant_closure(*u, star);
  std::vector<std::string> pool(reach.begin(), reach.end());
  std::shuffle(pool.begin(), pool.end(), rng);
  const int k = detail::uniform(rng, 0, std::min<int>(o.max_free, static_cast<int>(pool.size())));
  std::vector<std::string> free(pool.begin(), pool.begin() + k);
  // Drop unreachable nodes so the universe is exactly the formula.
  auto keep = std::make_shared<NodeUniverse>();
  for (const auto& nd : u->nodes())
    if (reach.count(nd.id)) keep->add(nd);
  return Formula(keep, star, free, "random");
}

/// A random classical formula with at most `max_connectives` connectives.
inline ClassicalFormula random_classical(Rng& rng, const std::vector<std::string>& letters, int max_connectives) {
  using CF = ClassicalFormula;
  const int c = detail::uniform(rng, 0, std::max(0, max_connectives));
  // Grow a tree by splitting the connective budget.
  auto grow = [&](auto& self, int budget) -> CF {
    if (budget == 0) return CF::letter(letters[detail::uniform(rng, 0, static_cast<int>(letters.size()) - 1)]);
    int op = detail::uniform(rng, 0, 4);
    if (op == 0) return CF::negation(self(self, budget - 1));
    int left = detail::uniform(rng, 0, budget - 1);
    CF a = self(self, left), b = self(self, budget - 1 - left);
    switch (op) {
      case 1: return CF::conj(a, b);
      case 2: return CF::disj(a, b);
      case 3: return CF::implies(a, b);
      default: return CF::iff(a, b);
    }
  };
  return grow(grow, c);
}

/// A closed random formula over the given letters, built inside `u` with
/// ids under `prefix`. Builtin connectives only; cycles allowed.
inline Formula random_closed_formula(Rng& rng, NodeUniverse& u, const UniversePtr& u_ptr,
                                     const std::vector<std::string>& letters, const std::string& prefix,
                                     int max_operators = 4) {
  static const std::vector<TablePtr> ops = {builtin::NOT(), builtin::AND(), builtin::OR(), builtin::IMPLIES(),
                                            builtin::IFF(), builtin::ID()};
  const int n = detail::uniform(rng, 1, std::max(1, max_operators));
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back(u.fresh_id(prefix + std::to_string(i)));
  std::vector<std::string> pool = letters;
  pool.insert(pool.end(), ids.begin(), ids.end());
  for (const auto& id : ids) {
    auto t = ops[detail::uniform(rng, 0, static_cast<int>(ops.size()) - 1)];
    std::vector<std::string> children;
    for (int j = 0; j < t->arity(); ++j) children.push_back(pool[detail::uniform(rng, 0, static_cast<int>(pool.size()) - 1)]);
    u.add_operator(id, t, children);
  }
  return Formula(u_ptr, ids.front(), {}, ids.front());
}

}  // namespace selfref
