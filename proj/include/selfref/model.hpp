#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "selfref/classical.hpp"
#include "selfref/engine.hpp"
#include "selfref/error.hpp"
#include "selfref/graph.hpp"
#include "selfref/truth_value.hpp"

namespace selfref {

/// (M, A, B, C, D): letters and true, false, lie and vacuous axioms, all
/// over one shared node universe. Axioms are identified by their star id.
struct Model {
  std::string name;
  UniversePtr universe = std::make_shared<const NodeUniverse>();
  std::vector<std::string> letters;
  std::vector<Formula> axioms_true, axioms_false, axioms_lie, axioms_vacuous;

  std::vector<Formula>& axioms(TruthValue4 v) {
    switch (v.kind()) {
      case TruthValue4::Kind::T: return axioms_true;
      case TruthValue4::Kind::F: return axioms_false;
      case TruthValue4::Kind::L: return axioms_lie;
      case TruthValue4::Kind::V: break;
    }
    return axioms_vacuous;
  }
  const std::vector<Formula>& axioms(TruthValue4 v) const { return const_cast<Model*>(this)->axioms(v); }

  /// Every axiom with the value its set assigns, in T, F, L, V order.
  std::vector<std::pair<Formula, TruthValue4>> all_axioms() const {
    std::vector<std::pair<Formula, TruthValue4>> out;
    for (auto v : kAllValues)
      for (const auto& a : axioms(v)) out.emplace_back(a, v);
    return out;
  }

  /// Same model over an extended universe; formulas are re-pointed.
  Model rebased(UniversePtr u) const {
    Model m = *this;
    m.universe = u;
    for (auto v : kAllValues)
      for (auto& a : m.axioms(v)) a = a.with_universe(u);
    return m;
  }
};

inline std::vector<Diagnostic> validate_model(const Model& m) {
  std::vector<Diagnostic> errs;
  if (m.letters.empty()) errs.push_back({ErrorCode::invalid_argument, "", "model has no letters"});
  std::set<std::string> letters(m.letters.begin(), m.letters.end());
  for (const auto& l : m.letters) {
    const Node* n = m.universe->find(l);
    if (!n || !n->is_letter()) errs.push_back({ErrorCode::unknown_node, l, "'" + l + "' is not a letter node"});
  }
  std::map<std::string, int> seen;
  for (const auto& [a, v] : m.all_axioms()) {
    for (const auto& d : validate(a)) errs.push_back(d);
    if (++seen[a.star()] == 2)
      errs.push_back({ErrorCode::overlapping_axioms, a.star(), "'" + a.star() + "' is an axiom more than once"});
    if (!a.free().empty())
      errs.push_back({ErrorCode::free_axiom, a.star(), "axiom '" + a.star() + "' has free nodes"});
    if (!m.universe->contains(a.star())) continue;
    for (const auto& l : a.letters())
      if (!letters.count(l))
        errs.push_back({ErrorCode::letter_outside_m, l, "letter '" + l + "' of axiom '" + a.star() + "' is not in M"});
  }
  return errs;
}

inline void require_valid(const Model& m) {
  auto errs = validate_model(m);
  if (!errs.empty()) throw Error(errs.front().code, errs.front().message);
}

struct Subaxiom {
  Formula formula;                  // rooted at the subaxiom's node
  std::vector<std::string> axioms;  // stars of the axioms containing it
};

/// Proper subformulas of axioms, keyed by root id.
inline std::map<std::string, Subaxiom> subaxioms(const Model& m) {
  std::map<std::string, Subaxiom> out;
  for (const auto& [a, v] : m.all_axioms()) {
    for (const auto& id : a.node_set()) {
      if (id == a.star()) continue;
      auto [it, fresh] = out.try_emplace(id, Subaxiom{subformula_at(a, id), {}});
      it->second.axioms.push_back(a.star());
    }
  }
  return out;
}

enum class Provenance { axiom, subaxiom, computed };

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::axiom: return "axiom";
    case Provenance::subaxiom: return "subaxiom";
    case Provenance::computed: return "computed";
  }
  return "?";
}

struct NodeValue {
  std::string node;
  TruthValue4 value;
  Provenance provenance = Provenance::computed;
  std::vector<TruthValue4> r_trace;  // R_1, R_2, ... for subaxioms
};

struct ValueReport {
  std::string formula;
  std::string star;
  TruthValue4 value;
  Provenance provenance = Provenance::computed;
  std::vector<NodeValue> nodes;  // bound nodes of the formula, then the star
};

/// Values of formulas in a model. Subaxiom values are computed once, on
/// construction, by iterating R_n to its fixpoint.
class ModelEvaluator {
 public:
  explicit ModelEvaluator(Model m, EngineOptions options = {}) : model_(std::move(m)), options_(options) {
    require_valid(model_);
    for (const auto& [a, v] : model_.all_axioms()) {
      axiom_value_[a.star()] = v;
      axioms_.emplace(a.star(), a);
    }
    for (auto& [id, sub] : selfref::subaxioms(model_))
      if (!axiom_value_.count(id)) subaxioms_.emplace(id, std::move(sub));
    iterate();
  }

  const Model& model() const { return model_; }
  std::optional<TruthValue4> axiom_value(const std::string& id) const {
    auto it = axiom_value_.find(id);
    if (it == axiom_value_.end()) return std::nullopt;
    return it->second;
  }
  bool is_subaxiom(const std::string& id) const { return subaxioms_.count(id) != 0; }
  const std::map<std::string, Subaxiom>& subaxioms() const { return subaxioms_; }
  /// R_1, R_2, ... up to the fixpoint.
  const std::vector<TruthValue4>& r_trace(const std::string& id) const { return traces_.at(id); }
  TruthValue4 subaxiom_value(const std::string& id) const { return traces_.at(id).back(); }

  /// Value of a bound node if it is an axiom or subaxiom.
  std::optional<TruthValue4> bound_value(const std::string& id) const {
    if (auto v = axiom_value(id)) return v;
    if (is_subaxiom(id)) return subaxiom_value(id);
    return std::nullopt;
  }

  TruthValue4 value(const Formula& phi) const { return report(phi).value; }

  ValueReport report(const Formula& phi) const {
    check_formula(phi);
    ValueReport r{phi.name(), phi.star(), V, Provenance::computed, {}};
    if (auto v = axiom_value(phi.star())) {
      r.value = *v;
      r.provenance = Provenance::axiom;
      r.nodes.push_back({phi.star(), *v, Provenance::axiom, {}});
      return r;
    }
    if (is_subaxiom(phi.star())) {
      r.value = subaxiom_value(phi.star());
      r.provenance = Provenance::subaxiom;
      r.nodes.push_back({phi.star(), r.value, Provenance::subaxiom, r_trace(phi.star())});
      return r;
    }
    Evaluation e;
    for (const auto& id : phi.node_set()) {
      if (auto v = axiom_value(id)) {
        e[id] = *v;
        r.nodes.push_back({id, *v, Provenance::axiom, {}});
      } else if (is_subaxiom(id)) {
        e[id] = subaxiom_value(id);
        r.nodes.push_back({id, e[id], Provenance::subaxiom, r_trace(id)});
      }
    }
    r.value = evaluate(phi, e);
    r.nodes.push_back({phi.star(), r.value, Provenance::computed, {}});
    return r;
  }

  /// Value with only the letter axioms bound.
  TruthValue4 letter_value(const Formula& phi) const {
    check_formula(phi);
    Evaluation e;
    for (const auto& id : phi.node_set())
      if (phi.universe().at(id).is_letter())
        if (auto v = axiom_value(id)) e[id] = *v;
    return evaluate(phi, e);
  }

 private:
  void check_formula(const Formula& phi) const {
    require_valid(phi);
    if (!phi.free().empty()) throw Error(ErrorCode::free_axiom, "formula '" + phi.star() + "' has free nodes");
    std::set<std::string> letters(model_.letters.begin(), model_.letters.end());
    for (const auto& l : phi.letters())
      if (!letters.count(l)) throw Error(ErrorCode::letter_outside_m, "letter '" + l + "' is not in M");
  }

  TruthValue4 evaluate(const Formula& phi, const Evaluation& e) const {
    std::vector<std::string> free;
    for (const auto& [id, v] : e) free.push_back(id);
    return truth_value(Proposition{phi.with_free(std::move(free)), e}, options_);
  }

  // R_A for subaxiom `id` in axiom A: A with the star moved to `id`, the
  // axioms inside A bound, and, given `previous`, the other subaxioms inside
  // A bound to their previous values.
  TruthValue4 r_in(const std::string& id, const Formula& a, const std::map<std::string, TruthValue4>* previous) const {
    std::vector<std::string> roots = a.roots();
    roots.push_back(a.star());
    Formula star_moved = Formula(model_.universe, id, {}, a.name()).with_roots(roots);
    Evaluation e;
    for (const auto& n : a.node_set()) {
      if (auto v = axiom_value(n)) e[n] = *v;
      else if (previous && n != id && subaxioms_.count(n)) e[n] = previous->at(n);
    }
    return evaluate(star_moved, e);
  }

  void iterate() {
    if (subaxioms_.empty()) return;
    auto step = [&](const std::map<std::string, TruthValue4>* previous) {
      std::map<std::string, TruthValue4> next;
      for (const auto& [id, sub] : subaxioms_) {
        std::optional<TruthValue4> acc;
        for (const auto& star : sub.axioms) {
          auto v = r_in(id, axioms_.at(star), previous);
          acc = acc ? sup(*acc, v) : v;
        }
        next.emplace(id, *acc);
      }
      return next;
    };
    const std::size_t cap = 4 * subaxioms_.size();
    auto current = step(nullptr);
    for (const auto& [id, v] : current) traces_[id].push_back(v);
    for (std::size_t n = 2;; ++n) {
      if (n > cap)
        throw Error(ErrorCode::fixpoint_cap_exceeded, "R_n did not stabilise within " + std::to_string(cap) + " steps");
      auto next = step(&current);
      for (const auto& [id, v] : next) {
        if (!leq(current.at(id), v))
          throw Error(ErrorCode::non_monotone_r, "R_" + std::to_string(n) + " of '" + id + "' fell from " +
                                                     current.at(id).symbol() + " to " + v.symbol());
      }
      if (next == current) break;
      for (const auto& [id, v] : next) traces_[id].push_back(v);
      current = std::move(next);
    }
  }

  Model model_;
  EngineOptions options_;
  std::map<std::string, TruthValue4> axiom_value_;
  std::map<std::string, Formula> axioms_;
  std::map<std::string, Subaxiom> subaxioms_;
  std::map<std::string, std::vector<TruthValue4>> traces_;
};

inline TruthValue4 value_in_model(const Model& m, const Formula& phi, EngineOptions options = {}) {
  return ModelEvaluator(m, options).value(phi);
}

inline bool satisfies(const ModelEvaluator& ev, const Formula& phi, TruthValue4 flavor = T) {
  return ev.value(phi) == flavor;
}

inline bool satisfies(const Model& m, const Formula& phi, TruthValue4 flavor = T, EngineOptions options = {}) {
  return value_in_model(m, phi, options) == flavor;
}

/// No well-grounded formula of `corpus` is V in the model.
inline bool is_complete(const ModelEvaluator& ev, const std::vector<Formula>& corpus) {
  return std::none_of(corpus.begin(), corpus.end(),
                      [&](const Formula& f) { return is_well_grounded(f) && ev.value(f) == V; });
}

inline bool is_complete(const Model& m, const std::vector<Formula>& corpus, EngineOptions options = {}) {
  return is_complete(ModelEvaluator(m, options), corpus);
}

/// Copies formulas from other universes into the model's universe: letters
/// are shared by id, operator nodes get `prefix` plus an index per source
/// universe, so formulas from one file keep sharing their nodes.
inline std::pair<Model, std::vector<Formula>> import_into(const Model& m, const std::vector<Formula>& formulas,
                                                          const std::string& prefix = "c") {
  auto u = std::make_shared<NodeUniverse>(*m.universe);
  std::vector<const NodeUniverse*> sources;
  for (const auto& f : formulas)
    if (std::find(sources.begin(), sources.end(), &f.universe()) == sources.end()) sources.push_back(&f.universe());
  std::map<const NodeUniverse*, std::map<std::string, std::string>> renames;
  for (std::size_t g = 0; g < sources.size(); ++g) {
    std::vector<std::string> roots;
    const Formula* first = nullptr;
    for (const auto& f : formulas) {
      if (&f.universe() != sources[g]) continue;
      if (!first) first = &f;
      for (const auto& id : f.node_set()) roots.push_back(id);
    }
    Formula all = first->with_free({}).with_roots(roots);
    import_formula(*u, u, all, prefix + std::to_string(g) + "_", &renames[sources[g]]);
  }
  Model next = m.rebased(u);
  std::vector<Formula> out;
  for (const auto& f : formulas) {
    const auto& rn = renames.at(&f.universe());
    std::vector<std::string> free, roots;
    for (const auto& id : f.free()) free.push_back(rn.at(id));
    for (const auto& id : f.roots()) roots.push_back(rn.at(id));
    out.push_back(Formula(next.universe, rn.at(f.star()), free, f.name()).with_roots(roots));
  }
  return {std::move(next), std::move(out)};
}

/// Adds classical formulas to the model's universe, sharing letters.
inline std::pair<Model, std::vector<Formula>> add_classical_formulas(const Model& m,
                                                                     const std::vector<ClassicalFormula>& formulas,
                                                                     const std::string& prefix = "k") {
  auto u = std::make_shared<NodeUniverse>(*m.universe);
  std::vector<std::string> roots;
  for (std::size_t i = 0; i < formulas.size(); ++i)
    roots.push_back(add_classical(*u, formulas[i], prefix + std::to_string(i) + "_"));
  Model next = m.rebased(u);
  std::vector<Formula> out;
  for (std::size_t i = 0; i < formulas.size(); ++i)
    out.emplace_back(next.universe, roots[i], std::vector<std::string>{}, formulas[i].to_string());
  return {std::move(next), std::move(out)};
}

/// Every subformula of the given formulas, one per root id, first
/// occurrence kept.
inline std::vector<Formula> subformula_closure(const std::vector<Formula>& formulas) {
  std::vector<Formula> out;
  std::set<std::string> seen;
  for (const auto& f : formulas) {
    if (seen.insert(f.star()).second) out.push_back(f);
    for (const auto& id : f.node_set())
      if (seen.insert(id).second) out.push_back(subformula_at(f, id).with_name(id));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classical theories

struct ClassicalTheoryModel {
  std::vector<ClassicalFormula> theory;
  std::map<std::string, bool> assignment;
};

/// M(T): the theory in expanded disjunctive normal form and the true letters
/// as true axioms, the false letters as false axioms.
inline Model build_classical_model(const ClassicalTheoryModel& tm) {
  std::set<std::string> letters;
  for (const auto& [l, v] : tm.assignment) letters.insert(l);
  for (const auto& cf : tm.theory)
    for (const auto& l : cf.letters())
      if (!tm.assignment.count(l)) throw Error(ErrorCode::letter_outside_m, "letter '" + l + "' has no value");
  auto u = std::make_shared<NodeUniverse>();
  for (const auto& l : letters) u->add_letter(l);
  std::vector<std::string> roots;
  for (std::size_t i = 0; i < tm.theory.size(); ++i) {
    // A bare letter would be its own expansion and collide with the letter
    // axiom, so it is written as p ∧ p.
    const auto& cf = tm.theory[i];
    auto body = cf.op() == ClassicalFormula::Op::Letter ? ClassicalFormula::conj(cf, cf) : cf;
    roots.push_back(add_expanded(*u, to_dnf(body), "a" + std::to_string(i) + "_"));
  }
  Model m;
  m.name = "M(T)";
  m.universe = u;
  m.letters.assign(letters.begin(), letters.end());
  for (std::size_t i = 0; i < roots.size(); ++i)
    m.axioms_true.emplace_back(u, roots[i], std::vector<std::string>{}, tm.theory[i].to_string());
  for (const auto& [l, v] : tm.assignment) (v ? m.axioms_true : m.axioms_false).emplace_back(u, l, std::vector<std::string>{}, l);
  return m;
}

/// Reads a theory and assignment off a model: letter axioms give the
/// assignment, every other true axiom joins the theory. Each letter needs a
/// value and the other axioms must be classical.
inline ClassicalTheoryModel classical_theory_of(const Model& m) {
  require_valid(m);
  ClassicalTheoryModel tm;
  for (const auto& [a, v] : m.all_axioms()) {
    if (m.universe->at(a.star()).is_letter()) {
      if (v != T && v != F) throw Error(ErrorCode::invalid_argument, "letter '" + a.star() + "' must be true or false");
      tm.assignment[a.star()] = v == T;
    } else if (v == T) {
      if (!is_well_grounded(a)) throw Error(ErrorCode::invalid_argument, "theory axiom '" + a.name() + "' is not well-grounded");
      tm.theory.push_back(unfold_classical(*m.universe, a.star()));
    } else {
      throw Error(ErrorCode::invalid_argument, "theory axiom '" + a.name() + "' must be true");
    }
  }
  for (const auto& l : m.letters)
    if (!tm.assignment.count(l)) throw Error(ErrorCode::letter_outside_m, "letter '" + l + "' has no value");
  return tm;
}

struct CorrespondenceVerdict {
  bool is_classical_model = false;
  std::vector<std::string> l_formulas;  // well-grounded corpus formulas valued L
  std::vector<std::string> disagreements;  // well-grounded, classically valued, not matching
  std::map<std::string, std::pair<TruthValue4, bool>> values;  // engine value, classical value
  std::size_t corpus_size = 0;
  bool iff_holds() const { return is_classical_model == l_formulas.empty(); }
  bool agreement_holds() const { return !is_classical_model || disagreements.empty(); }
};

/// Compares M(T) with the classical model on the subformulas of the axioms
/// plus `corpus`, all evaluated in M(T).
inline CorrespondenceVerdict check_classical_correspondence(const ClassicalTheoryModel& tm,
                                                             const std::vector<ClassicalFormula>& corpus,
                                                             EngineOptions options = {}) {
  CorrespondenceVerdict verdict;
  verdict.is_classical_model = std::all_of(tm.theory.begin(), tm.theory.end(),
                                           [&](const ClassicalFormula& cf) { return cf.eval(tm.assignment); });
  auto [m, extra] = add_classical_formulas(build_classical_model(tm), corpus);
  std::vector<Formula> all;
  for (const auto& a : m.axioms_true) all.push_back(a);
  for (const auto& a : m.axioms_false) all.push_back(a);
  all.insert(all.end(), extra.begin(), extra.end());
  auto formulas = subformula_closure(all);
  verdict.corpus_size = formulas.size();
  ModelEvaluator ev(m, options);
  for (const auto& f : formulas) {
    if (!is_well_grounded(f)) continue;
    auto value = ev.value(f);
    auto classical = classical_value(*m.universe, f.star(), tm.assignment);
    verdict.values[f.star()] = {value, classical.value_or(false)};
    if (value == L) verdict.l_formulas.push_back(f.star());
    if (!classical || value != (*classical ? T : F)) verdict.disagreements.push_back(f.star());
  }
  return verdict;
}

// ---------------------------------------------------------------------------
// Models in which the Liar is false

struct LiarFalseStep {
  Model model;
  std::map<std::string, TruthValue4> values;  // corpus star -> value in this model
  std::vector<std::string> added;             // minimal L formulas made false axioms
};

struct LiarFalseRun {
  std::vector<Formula> corpus;  // subformula-closed, inside the models' universe
  std::vector<LiarFalseStep> steps;
};

/// Minimal L formulas: valued L, and no L-valued proper subformula lies
/// strictly below (its closure does not reach back to the formula's root).
inline std::vector<std::string> minimal_l(const std::vector<Formula>& corpus,
                                          const std::map<std::string, TruthValue4>& values) {
  std::vector<std::string> out;
  for (const auto& x : corpus) {
    if (values.at(x.star()) != L) continue;
    bool minimal = true;
    for (const auto& id : x.node_set()) {
      if (id == x.star()) continue;
      auto it = values.find(id);
      if (it == values.end() || it->second != L) continue;
      if (!descendant_closure(x.universe(), id).count(x.star())) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.push_back(x.star());
  }
  return out;
}

/// M_0 = M(T) with the corpus added; each step makes the minimal L corpus
/// formulas false axioms, until no corpus formula is L.
inline LiarFalseRun build_liar_false_model(const ClassicalTheoryModel& tm, const std::vector<Formula>& corpus,
                                           int max_iter = 8, EngineOptions options = {}) {
  auto [m, imported] = import_into(build_classical_model(tm), corpus);
  std::vector<Formula> all = m.axioms_true;
  all.insert(all.end(), m.axioms_false.begin(), m.axioms_false.end());
  all.insert(all.end(), imported.begin(), imported.end());
  LiarFalseRun run;
  run.corpus = subformula_closure(all);
  std::map<std::string, Formula> by_star;
  for (const auto& f : run.corpus) by_star.emplace(f.star(), f);

  for (int i = 0;; ++i) {
    ModelEvaluator ev(m, options);
    LiarFalseStep step{m, {}, {}};
    for (const auto& f : run.corpus) step.values[f.star()] = ev.value(f);
    step.added = minimal_l(run.corpus, step.values);
    bool done = step.added.empty();
    Model next = m;
    for (const auto& id : step.added) next.axioms_false.push_back(by_star.at(id));
    next.name = "M_" + std::to_string(i + 1);
    step.model.name = "M_" + std::to_string(i);
    run.steps.push_back(std::move(step));
    if (done) return run;
    if (i + 1 > max_iter)
      throw Error(ErrorCode::no_fixpoint_within_cap,
                  "L formulas remain after " + std::to_string(max_iter) + " iterations");
    m = std::move(next);
  }
}

}  // namespace selfref
