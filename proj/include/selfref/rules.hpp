#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "selfref/classical.hpp"
#include "selfref/error.hpp"
#include "selfref/graph.hpp"
#include "selfref/model.hpp"
#include "selfref/random.hpp"
#include "selfref/tables.hpp"

namespace selfref {

/// Every axiom is a letter assumed true or false, and every letter of M is
/// an axiom.
inline bool is_simple(const Model& m) {
  if (!m.axioms_lie.empty() || !m.axioms_vacuous.empty()) return false;
  std::set<std::string> axiom_letters;
  for (const auto& [a, v] : m.all_axioms()) {
    const Node* n = m.universe->find(a.star());
    if (!n || !n->is_letter()) return false;
    axiom_letters.insert(a.star());
  }
  return axiom_letters == std::set<std::string>(m.letters.begin(), m.letters.end());
}

inline bool is_special_connective(const Node& n) {
  if (n.is_letter()) return true;
  const auto& t = *n.table;
  if (builtin::is_builtin(t) && (t.name() == "NOT" || t.name() == "ID")) return true;
  return builtin::is_conjunction(t) || builtin::is_disjunction(t);
}

/// Special in the model: well-grounded, built from ∧, ∨, ¬, = and letters,
/// no "=" subformula is an axiom, every subaxiom Ψ inside it (other than an
/// "=" node) has "=Ψ" as a subaxiom of the same axiom, and every axiom star
/// inside it points only at "=" nodes.
inline bool is_special(const Formula& phi, const ModelEvaluator& ev) {
  if (!is_well_grounded(phi)) return false;
  const auto& u = phi.universe();
  auto is_id = [&](const std::string& id) {
    const Node& n = u.at(id);
    return !n.is_letter() && builtin::is_builtin(*n.table) && n.table->name() == "ID";
  };
  std::map<std::string, Formula> axioms;
  for (const auto& [a, v] : ev.model().all_axioms()) axioms.emplace(a.star(), a);
  const auto subs = subaxioms(ev.model());
  for (const auto& id : phi.node_set()) {
    const Node& n = u.at(id);
    if (!is_special_connective(n)) return false;
    if (is_id(id) && axioms.count(id)) return false;
    if (axioms.count(id) && !n.is_letter())
      for (const auto& c : n.children)
        if (!is_id(c)) return false;
    auto sub = subs.find(id);
    if (sub == subs.end() || is_id(id)) continue;
    for (const auto& star : sub->second.axioms) {
      const Formula& a = axioms.at(star);
      bool guarded = false;
      for (const auto& e : a.node_set())
        if (e != a.star() && is_id(e) && u.at(e).children[0] == id) guarded = true;
      if (!guarded) return false;
    }
  }
  return true;
}

inline bool is_special(const Formula& phi, const Model& m, EngineOptions options = {}) {
  return is_special(phi, ModelEvaluator(m, options));
}

/// The value in the model differs from the value with only letter axioms bound.
inline bool is_generically_inconsistent(const Formula& phi, const ModelEvaluator& ev) {
  return ev.value(phi) != ev.letter_value(phi);
}

inline bool is_generically_inconsistent(const Formula& phi, const Model& m, EngineOptions options = {}) {
  return is_generically_inconsistent(phi, ModelEvaluator(m, options));
}

// ---------------------------------------------------------------------------
// External rules of inference

struct RuleResult {
  std::string rule;
  std::size_t instances = 0;     // instances whose premises all hold
  std::vector<std::string> counterexamples;
  bool holds() const { return counterexamples.empty(); }
};

struct SchemaResult {
  std::string schema;
  TautologyClass tautology = TautologyClass::none;
  bool rule_holds = false;  // every substitution instance from the pool is true
  std::size_t instances = 0;
  std::string counterexample;
  bool agrees() const { return rule_holds == (tautology == TautologyClass::strong); }
};

struct ExternalRulesReport {
  std::vector<RuleResult> rules;
  std::vector<SchemaResult> schemas;
  bool all_rules_hold() const {
    return std::all_of(rules.begin(), rules.end(), [](const RuleResult& r) { return r.holds(); });
  }
  bool schemas_agree() const {
    return std::all_of(schemas.begin(), schemas.end(), [](const SchemaResult& s) { return s.agrees(); });
  }
};

/// Tautologies, weak and strong, whose rules R(Φ) are checked by default.
inline std::vector<ClassicalFormula> default_schemas() {
  using CF = ClassicalFormula;
  auto p = CF::letter("p"), q = CF::letter("q");
  return {
      CF::disj(p, CF::negation(p)),
      CF::iff(p, p),
      CF::implies(p, p),
      CF::negation(CF::conj(p, CF::negation(p))),
      CF::implies(CF::conj(p, CF::implies(p, q)), q),
      CF::implies(q, CF::disj(p, CF::negation(p))),
  };
}

namespace detail {

// Builds connectives over existing nodes of a growing copy of the model's
// universe, reusing a node when the same connective is asked for twice.
class Composer {
 public:
  explicit Composer(const ModelEvaluator& ev)
      : ev_(ev), u_(std::make_shared<NodeUniverse>(*ev.model().universe)) {}

  std::string make(const TablePtr& table, std::vector<std::string> children) {
    std::string key = table->name() + "(";
    for (const auto& c : children) key += c + ",";
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::string id = u_->fresh_id("x" + std::to_string(memo_.size()));
    u_->add_operator(id, table, std::move(children));
    memo_.emplace(key, id);
    return id;
  }
  std::string neg(const std::string& a) { return make(builtin::NOT(), {a}); }
  std::string conj(const std::string& a, const std::string& b) { return make(builtin::AND(), {a, b}); }
  std::string disj(const std::string& a, const std::string& b) { return make(builtin::OR(), {a, b}); }
  std::string implies(const std::string& a, const std::string& b) { return make(builtin::IMPLIES(), {a, b}); }

  std::string build(const ClassicalFormula& cf, const std::map<std::string, std::string>& letters) {
    using Op = ClassicalFormula::Op;
    if (cf.op() == Op::Letter) return letters.at(cf.name());
    std::vector<std::string> children;
    for (std::size_t i = 0; i < cf.args().size(); ++i) children.push_back(build(cf.arg(i), letters));
    return make(table_for(cf.op()), std::move(children));
  }

  bool holds(const std::string& id) {
    auto it = values_.find(id);
    if (it == values_.end()) it = values_.emplace(id, ev_.value(Formula(u_, id))).first;
    return it->second == T;
  }
  TruthValue4 value(const std::string& id) {
    holds(id);
    return values_.at(id);
  }

 private:
  const ModelEvaluator& ev_;
  std::shared_ptr<NodeUniverse> u_;
  std::map<std::string, std::string> memo_;
  std::map<std::string, TruthValue4> values_;
};

}  // namespace detail

/// Checks the ten rules of inference externally on all pairs and triples
/// from `samples`, and R(Φ) for each schema with letters replaced by samples.
inline ExternalRulesReport check_external_rules(const Model& m, const std::vector<Formula>& samples,
                                                const std::vector<ClassicalFormula>& schemas = default_schemas(),
                                                EngineOptions options = {}) {
  if (!is_simple(m)) throw Error(ErrorCode::not_simple, "model '" + m.name + "' is not simple");
  ModelEvaluator ev(m, options);
  detail::Composer c(ev);
  std::vector<std::string> s;
  for (const auto& f : samples) {
    if (f.universe_ptr() != m.universe && &f.universe() != m.universe.get())
      for (const auto& id : f.node_set())
        if (!m.universe->contains(id)) throw Error(ErrorCode::unknown_node, "sample node '" + id + "' is not in the model");
    s.push_back(f.star());
  }

  ExternalRulesReport report;
  std::map<std::string, RuleResult*> by_name;
  for (const char* name : {"modus ponens", "modus tollens", "contrapositive", "chain rule", "disjunctive inference",
                           "double negation", "De Morgan", "simplification", "conjunction", "disjunctive syllogism"})
    report.rules.push_back({name, 0, {}});
  for (auto& r : report.rules) by_name[r.rule] = &r;
  auto check = [&](const char* rule, bool premises, const std::function<bool()>& conclusion,
                   const std::function<std::string()>& describe) {
    if (!premises) return;
    RuleResult& r = *by_name.at(rule);
    ++r.instances;
    if (!conclusion() && r.counterexamples.size() < 10) r.counterexamples.push_back(describe());
  };

  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = s[i];
    auto nna = c.neg(c.neg(a));
    check("double negation", c.holds(nna), [&] { return c.holds(a); }, [&] { return "~~" + a; });
    check("double negation", c.holds(a), [&] { return c.holds(nna); }, [&] { return a; });
    for (std::size_t j = 0; j < n; ++j) {
      const auto& b = s[j];
      auto ab = c.implies(a, b);
      std::string pair = "(" + a + ", " + b + ")";
      auto d = [&] { return pair; };
      check("modus ponens", c.holds(a) && c.holds(ab), [&] { return c.holds(b); }, d);
      check("modus tollens", c.holds(ab) && c.holds(c.neg(b)), [&] { return c.holds(c.neg(a)); }, d);
      check("contrapositive", c.holds(ab), [&] { return c.holds(c.implies(c.neg(b), c.neg(a))); }, d);
      auto nand = c.neg(c.conj(a, b)), or_negs = c.disj(c.neg(a), c.neg(b));
      auto nor = c.neg(c.disj(a, b)), and_negs = c.conj(c.neg(a), c.neg(b));
      check("De Morgan", c.holds(nand), [&] { return c.holds(or_negs); }, d);
      check("De Morgan", c.holds(or_negs), [&] { return c.holds(nand); }, d);
      check("De Morgan", c.holds(nor), [&] { return c.holds(and_negs); }, d);
      check("De Morgan", c.holds(and_negs), [&] { return c.holds(nor); }, d);
      check("simplification", c.holds(c.conj(a, b)), [&] { return c.holds(a) && c.holds(b); }, d);
      check("conjunction", c.holds(a) && c.holds(b), [&] { return c.holds(c.conj(a, b)); }, d);
      check("disjunctive syllogism", c.holds(c.disj(a, b)) && c.holds(c.neg(a)), [&] { return c.holds(b); }, d);
      if (!c.holds(ab)) continue;
      for (std::size_t k = 0; k < n; ++k) {
        const auto& x = s[k];
        auto t = [&] { return "(" + a + ", " + b + ", " + x + ")"; };
        check("chain rule", c.holds(c.implies(b, x)), [&] { return c.holds(c.implies(a, x)); }, t);
      }
    }
  }
  // Disjunctive inference: ⊨ a∨b, ⊨ a→x, ⊨ b→x give ⊨ x.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!c.holds(c.disj(s[i], s[j]))) continue;
      for (std::size_t k = 0; k < n; ++k)
        check("disjunctive inference", c.holds(c.implies(s[i], s[k])) && c.holds(c.implies(s[j], s[k])),
              [&] { return c.holds(s[k]); }, [&] { return "(" + s[i] + ", " + s[j] + ", " + s[k] + ")"; });
    }

  for (const auto& schema : schemas) {
    SchemaResult r{schema.to_string(), tautology_class(from_classical(schema), options), true, 0, {}};
    auto letters = schema.letters();
    std::vector<std::string> names(letters.begin(), letters.end());
    std::vector<std::size_t> pick(names.size(), 0);
    const std::size_t total = [&] {
      std::size_t t = 1;
      for (std::size_t i = 0; i < names.size(); ++i) t *= n;
      return t;
    }();
    for (std::size_t code = 0; code < total && n > 0; ++code) {
      std::size_t rest = code;
      std::map<std::string, std::string> sub;
      for (const auto& l : names) {
        sub[l] = s[rest % n];
        rest /= n;
      }
      ++r.instances;
      if (!c.holds(c.build(schema, sub))) {
        r.rule_holds = false;
        std::string desc;
        for (const auto& [l, id] : sub) desc += (desc.empty() ? "" : ", ") + l + ":=" + id;
        r.counterexample = desc;
        break;
      }
    }
    report.schemas.push_back(std::move(r));
  }
  return report;
}

/// A simple model over fresh letters, each randomly true or false.
inline Model random_simple_model(Rng& rng, const std::vector<std::string>& letters) {
  auto u = std::make_shared<NodeUniverse>();
  Model m;
  m.name = "simple";
  for (const auto& l : letters) {
    u->add_letter(l);
    m.letters.push_back(l);
  }
  m.universe = u;
  for (const auto& l : letters)
    (std::bernoulli_distribution(0.5)(rng) ? m.axioms_true : m.axioms_false).emplace_back(u, l, std::vector<std::string>{}, l);
  return m;
}

/// `m` over a universe extended with `n` random closed formulas over its
/// letters, and those formulas.
inline std::pair<Model, std::vector<Formula>> random_samples(const Model& m, Rng& rng, int n, int max_operators = 4) {
  auto u = std::make_shared<NodeUniverse>(*m.universe);
  std::vector<Formula> pool;
  for (int i = 0; i < n; ++i)
    pool.push_back(random_closed_formula(rng, *u, u, m.letters, "s" + std::to_string(i) + "_", max_operators));
  Model next = m.rebased(u);
  for (auto& f : pool) f = f.with_universe(next.universe);
  return {std::move(next), std::move(pool)};
}

}  // namespace selfref
