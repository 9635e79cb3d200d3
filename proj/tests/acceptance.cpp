// Acceptance run: one PASS/FAIL line per criterion, with its time limit.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "invariants.hpp"
#include "selfref/classical.hpp"
#include "selfref/corpus.hpp"
#include "selfref/model.hpp"
#include "selfref/oracle.hpp"
#include "selfref/random.hpp"
#include "selfref/realization.hpp"
#include "selfref/rules.hpp"
#include "selfref/tables.hpp"

using namespace selfref;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Collects the first few failure messages; `ok` drops on the first one.
struct Check {
  Outcome out;
  int failures = 0;
  void fail(const std::string& why) {
    out.ok = false;
    if (++failures <= 3) out.detail += (out.detail.empty() ? "" : "; ") + why;
  }
  void expect(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
  Outcome done(const std::string& summary) {
    if (failures > 3) out.detail += "; " + std::to_string(failures - 3) + " more";
    if (out.ok) out.detail = summary;
    return out;
  }
};

Evaluation random_bindings(Rng& rng, const Formula& f) {
  Evaluation ev;
  for (const auto& id : f.free()) ev[id] = kAllValues[detail::uniform(rng, 0, 3)];
  return ev;
}

std::string sym(TruthValue4 v) { return std::string(1, v.symbol()); }

const char* kConnectives =
    "let p, q\n"
    "node a = AND(p, q)\nnode o = OR(p, q)\nnode i = IMPLIES(p, q)\nnode e = IFF(p, q)\nnode n = NOT(p)\n"
    "formula and { star a free p q }\nformula or { star o free p q }\nformula imp { star i free p q }\n"
    "formula iff { star e free p q }\nformula not { star n free p }\n";

// 1 ------------------------------------------------------------------------
Outcome corpus_exactness() {
  Check c;
  auto results = run_corpus(corpus_catalog());
  for (const auto& r : results) c.expect(r.ok, r.id + " expected " + r.expected + " computed " + r.computed);
  return c.done(std::to_string(results.size()) + " entries");
}

// 2 ------------------------------------------------------------------------
Outcome and_table() {
  Check c;
  auto doc = dsl::parse(read_text(corpus_dir() / "and.pl"));
  auto t = truth_table(doc.formula("and").formula);
  // Rows p = T, F, L, V; columns q = T, F, L, V.
  const char* expected[4] = {"TFLV", "FFFF", "LFLF", "VFFV"};
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) {
      std::vector<TruthValue4> args{kAllValues[p], kAllValues[q]};
      auto got = t.at(args);
      c.expect(got.symbol() == expected[p][q], to_string(args) + " gave " + sym(got));
    }
  return c.done("16 entries");
}

// 3 ------------------------------------------------------------------------
Outcome oracle_equivalence() {
  Check c;
  int compared = 0;
  for (const auto& r : run_corpus(corpus_catalog())) {
    if (r.oracle.empty()) continue;
    ++compared;
    c.expect(r.oracle_ok, r.id + " engine " + r.computed + " oracle " + r.oracle);
  }
  Rng rng(3);
  RandomFormulaOptions o;
  o.max_nodes = 10;
  o.max_free = 2;
  o.max_arity = 3;
  for (int i = 0; i < 200; ++i) {
    auto f = random_formula(rng, o);
    Proposition p{f, random_bindings(rng, f)};
    auto a = truth_value(p), b = oracle::truth_value(p);
    ++compared;
    c.expect(a == b, "random " + std::to_string(i) + " engine " + sym(a) + " oracle " + sym(b));
  }
  return c.done(std::to_string(compared) + " propositions");
}

// 4 ------------------------------------------------------------------------
Outcome classical_restriction() {
  Check c;
  Rng rng(4);
  const std::vector<std::string> letters{"a", "b", "c", "d"};
  int evaluations = 0;
  for (int i = 0; i < 300; ++i) {
    auto cf = random_classical(rng, letters, 8);
    auto f = from_classical(cf);
    c.expect(is_strongly_well_grounded(f), cf.to_string() + " not strongly well-grounded");
    for (unsigned bits = 0; bits < 16; ++bits) {
      std::map<std::string, bool> assignment;
      Evaluation ev;
      for (std::size_t j = 0; j < letters.size(); ++j) {
        bool v = (bits >> j) & 1u;
        assignment[letters[j]] = v;
        if (std::count(f.free().begin(), f.free().end(), letters[j])) ev[letters[j]] = v ? T : F;
      }
      auto got = truth_value({f, ev});
      ++evaluations;
      c.expect(got == (cf.eval(assignment) ? T : F), cf.to_string() + " gave " + sym(got));
    }
  }
  return c.done(std::to_string(evaluations) + " evaluations");
}

// 5 ------------------------------------------------------------------------
Outcome restricted_realization() {
  Check c;
  auto verify = [&](const RestrictedTable& g) {
    auto got = restricted_truth_table(realize_restricted(g));
    c.expect(got == g, g.to_string() + " realized as " + got.to_string());
  };
  for (int code = 0; code < 16; ++code) {
    RestrictedTable g{1, {kAllValues[code / 4], kAllValues[code % 4]}};
    verify(g);
  }
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    RestrictedTable g{2, std::vector<TruthValue4>(4)};
    for (auto& v : g.entries) v = kAllValues[detail::uniform(rng, 0, 3)];
    verify(g);
  }
  return c.done("216 tables");
}

// 6 ------------------------------------------------------------------------
Outcome gate_atlas() {
  Check c;
  auto atlas = enumerate_gates();
  c.expect(atlas.size() == 25, std::to_string(atlas.size()) + " gates");
  std::set<std::string> sigs;
  for (const auto& g : atlas) {
    sigs.insert(g.signature.to_string());
    for (auto v : kAllValues) {
      auto o = oracle::truth_value({g.witness, {{g.witness.free()[0], v}}});
      c.expect(o == g.signature.values[v.index()], g.signature.to_string() + " witness gives " + sym(o) + " at " + sym(v));
    }
  }
  c.expect(sigs.count("FTLV") == 1, "FTLV missing");
  c.expect(sigs.count("FTVL") == 0, "FTVL present");
  try {
    realize_full(FullTable::from_string("FTVL"));
    c.fail("FTVL realized");
  } catch (const Error& e) {
    c.expect(e.code() == ErrorCode::bound_violated, std::string("FTVL rejected with ") + std::string(to_string(e.code())));
  }
  return c.done(std::to_string(atlas.size()) + " gates");
}

// 7 ------------------------------------------------------------------------
Outcome inequality() {
  Check c;
  Rng rng(7);
  RandomFormulaOptions o;
  o.max_nodes = 6;
  o.max_free = 2;
  for (int i = 0; i < 200; ++i) {
    auto f = random_formula(rng, o);
    auto t = truth_table(f);
    auto g = t.restricted();
    for (std::size_t row = 0; row < t.entries.size(); ++row) {
      auto b = inequality_bound(g, t.args(row));
      c.expect(leq(b, t.entries[row]), "random " + std::to_string(i) + " at " + to_string(t.args(row)));
    }
  }
  auto doc = dsl::parse(kConnectives);
  for (const char* name : {"not", "and", "or", "imp", "iff"}) {
    auto t = truth_table(doc.formula(name).formula);
    auto g = t.restricted();
    for (std::size_t row = 0; row < t.entries.size(); ++row)
      c.expect(t.entries[row] == inequality_bound(g, t.args(row)), std::string(name) + " at " + to_string(t.args(row)));
  }
  return c.done("200 formulas, 5 connectives");
}

// 8 ------------------------------------------------------------------------
Outcome model_theory() {
  Check c;
  using CF = ClassicalFormula;
  Rng rng(8);
  std::vector<CF> extra;
  for (int i = 0; i < 20; ++i) extra.push_back(random_classical(rng, {"p", "q"}, 5));
  for (bool p : {true, false})
    for (bool q : {true, false}) {
      ClassicalTheoryModel tm{{CF::implies(CF::letter("p"), CF::letter("q"))}, {{"p", p}, {"q", q}}};
      const std::string at = std::string("p=") + (p ? "t" : "f") + " q=" + (q ? "t" : "f");
      if (!p || q) {
        auto v = check_classical_correspondence(tm, extra);
        c.expect(v.is_classical_model, at + " not classical");
        c.expect(v.l_formulas.empty(), at + " has L formulas");
        c.expect(v.disagreements.empty(), at + " disagrees with classical values");
      } else {
        auto v = check_classical_correspondence(tm, {});
        c.expect(!v.is_classical_model, at + " classical");
        c.expect(!v.l_formulas.empty(), at + " has no well-grounded L axiom subformula");
      }
    }
  return c.done("4 assignments");
}

// 9 ------------------------------------------------------------------------
Outcome liar_false() {
  Check c;
  auto doc = dsl::parse(read_text(corpus_dir() / "liar_false_corpus.pl"));
  std::vector<Formula> corpus;
  for (const auto& nf : doc.formulas) corpus.push_back(nf.formula);
  auto run = build_liar_false_model({{}, {{"p", true}, {"q", true}}}, corpus);
  auto star_of = [&](const std::string& name) {
    for (const auto& f : run.corpus)
      if (f.name() == name) return f.star();
    throw Error(ErrorCode::unknown_node, "corpus has no " + name);
  };
  const int iterations = static_cast<int>(run.steps.size()) - 1;
  c.expect(iterations >= 1 && iterations <= 4, std::to_string(iterations) + " iterations");
  const auto& first = run.steps.front().values;
  const auto& last = run.steps.back().values;
  c.expect(last.at(star_of("liar")) == F, "Liar is " + sym(last.at(star_of("liar"))));
  c.expect(last.at(star_of("not_liar")) == T, "not Liar is " + sym(last.at(star_of("not_liar"))));
  for (const auto& [id, v] : last) c.expect(v != L, id + " still L");
  for (const auto& f : run.corpus)
    if (is_well_grounded(f)) c.expect(first.at(f.star()) == last.at(f.star()), f.star() + " changed");
  const auto two = star_of("two_liar_disjunction");
  c.expect(run.steps.size() > 1 && run.steps[1].values.at(two) == L, "two-liar disjunction not L in M_1");
  return c.done(std::to_string(iterations) + " iterations");
}

// 10 -----------------------------------------------------------------------
Outcome external_rules() {
  Check c;
  Rng rng(20);
  const std::vector<std::string> letters = {"p", "q", "r"};
  std::map<std::string, int> failing;
  std::size_t instances = 0;
  for (int i = 0; i < 20; ++i) {
    auto m = random_simple_model(rng, {letters.begin(), letters.begin() + 1 + static_cast<int>(rng() % 3)});
    auto [mm, pool] = random_samples(m, rng, 30);
    auto report = check_external_rules(mm, pool);
    for (const auto& r : report.rules) {
      instances += r.instances;
      if (!r.holds()) ++failing[r.rule];
    }
    for (const auto& s : report.schemas) c.expect(s.agrees(), "schema disagrees in model " + std::to_string(i));
  }
  for (const auto& [rule, models] : failing) c.fail(rule + " fails in " + std::to_string(models) + "/20 models");
  return c.done(std::to_string(instances) + " rule instances");
}

// 11 -----------------------------------------------------------------------
Outcome absorption() {
  Check c;
  std::size_t transitions = 0;
  auto props = test_support::corpus_propositions();
  for (const auto& p : props) {
    auto why = test_support::bound_node_violation(p, &transitions);
    c.expect(why.empty(), p.formula.name() + ": " + why);
  }
  return c.done(std::to_string(props.size()) + " propositions, " + std::to_string(transitions) + " transitions");
}

// 12 -----------------------------------------------------------------------
Outcome dsl_round_trip() {
  Check c;
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    auto doc = test_support::random_document(rng);
    auto text = dsl::serialize(doc);
    try {
      auto back = dsl::parse(text);
      auto diff = test_support::structural_difference(doc, back);
      c.expect(diff.empty(), "file " + std::to_string(i) + ": " + diff);
      c.expect(dsl::serialize(back) == text, "file " + std::to_string(i) + " reserializes differently");
    } catch (const Error& e) {
      c.fail("file " + std::to_string(i) + ": " + e.what());
    }
  }
  std::vector<std::string> seeds;
  for (const auto& e : corpus_catalog()) seeds.push_back(e.source);
  for (int i = 0; i < 10000; ++i) {
    auto input = test_support::fuzz_input(rng, seeds);
    try {
      dsl::parse(input);
    } catch (const dsl::ParseError& e) {
      for (const auto& d : e.diagnostics()) c.expect(d.line >= 1 && d.column >= 1, "diagnostic without a span");
    } catch (const std::exception& e) {
      c.fail(std::string("fuzz input raised ") + e.what());
    }
  }
  return c.done("500 files, 10000 fuzz inputs");
}

// 13 -----------------------------------------------------------------------
// A dense cyclic graph: node i reads the next node and a far one.
Formula dense(int operators, const std::vector<std::string>& letters) {
  static const std::vector<TablePtr> ops = {builtin::IFF(), builtin::AND(), builtin::OR(), builtin::IMPLIES(), builtin::NOT()};
  auto u = std::make_shared<NodeUniverse>();
  std::vector<std::string> ids;
  for (int i = 0; i < operators; ++i) ids.push_back("n" + std::to_string(i));
  std::vector<std::string> pool = ids;
  pool.insert(pool.end(), letters.begin(), letters.end());
  for (const auto& l : letters) u->add_letter(l);
  const int n = static_cast<int>(pool.size());
  for (int i = 0; i < operators; ++i) {
    auto t = ops[i % ops.size()];
    std::vector<std::string> children{pool[(i + 1) % n]};
    if (t->arity() == 2) children.push_back(pool[(5 * i + 3) % n]);
    u->add_operator(ids[i], t, children);
  }
  return Formula(u, ids[0], letters, "dense");
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Outcome performance() {
  Check c;
  auto big = dense(16, {});
  c.expect(big.node_set().size() == 16, std::to_string(big.node_set().size()) + " nodes");
  auto t0 = Clock::now();
  auto v = truth_value({big, {}});
  double first = seconds_since(t0);
  c.expect(first < 10.0, "16-node value took " + std::to_string(first) + " s");

  auto table_formula = dense(10, {"p", "q"});
  c.expect(table_formula.node_set().size() == 12, std::to_string(table_formula.node_set().size()) + " nodes");
  t0 = Clock::now();
  auto t = truth_table(table_formula);
  double second = seconds_since(t0);
  c.expect(second < 30.0, "12-node table took " + std::to_string(second) + " s");
  for (std::size_t row = 0; row < t.entries.size(); ++row) {
    auto args = t.args(row);
    auto o = oracle::truth_value({table_formula, {{"p", args[0]}, {"q", args[1]}}});
    c.expect(o == t.entries[row], "12-node table disagrees with the oracle at " + to_string(args));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "16-node value %c in %.3f s, 12-node table %s in %.3f s", v.symbol(), first,
                t.to_string().c_str(), second);
  return c.done(buf);
}

struct Criterion {
  int number;
  const char* name;
  double limit;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "corpus exactness", 10, corpus_exactness},
      {2, "conjunction table", 5, and_table},
      {3, "oracle equivalence", 60, oracle_equivalence},
      {4, "classical restriction", 30, classical_restriction},
      {5, "restricted realization", 60, restricted_realization},
      {6, "gate atlas", 60, gate_atlas},
      {7, "inequality bound", 60, inequality},
      {8, "classical correspondence", 10, model_theory},
      {9, "liar-false construction", 20, liar_false},
      {10, "external rules", 60, external_rules},
      {11, "absorption and frozen V", 30, absorption},
      {12, "DSL round trip and fuzz", 60, dsl_round_trip},
      {13, "performance", 40, performance},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    auto t0 = Clock::now();
    Outcome out;
    try {
      out = cr.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    double s = seconds_since(t0);
    bool ok = out.ok && s < cr.limit;
    if (out.ok && !ok) out.detail += "; over the time limit";
    failed += !ok;
    std::printf("criterion %d: %s  %s (%.2f s, limit %.0f s) %s\n", cr.number, ok ? "PASS" : "FAIL", cr.name, s, cr.limit,
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
