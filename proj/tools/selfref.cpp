// selfref: batch front end for the four-valued self-reference library.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "selfref/corpus.hpp"
#include "selfref/dsl.hpp"
#include "selfref/engine.hpp"
#include "selfref/export.hpp"
#include "selfref/model.hpp"
#include "selfref/oracle.hpp"
#include "selfref/random.hpp"
#include "selfref/realization.hpp"
#include "selfref/rules.hpp"
#include "selfref/tables.hpp"

using namespace selfref;

namespace {

enum Exit { ok = 0, usage = 1, parse_failed = 2, invalid = 3, cap_exceeded = 4, mismatch = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::optional<int> node_cap;
  int oracle_cap = oracle::kOracleNodeCap;
  std::string format = "text";

  EngineOptions engine() const { return {node_cap ? *node_cap : node_cap_from_env()}; }
};

dsl::Document load(const std::string& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return dsl::parse(text);
}

std::string letter(TruthValue4 v) { return std::string(1, v.symbol()); }

TruthValue4 parse_value(const std::string& s) {
  auto v = s.size() == 1 ? TruthValue4::from_symbol(s[0]) : std::nullopt;
  if (!v) throw UsageError("'" + s + "' is not one of T, F, L, V");
  return *v;
}

// NODE=V pairs from --bind.
Evaluation parse_binds(const std::vector<std::string>& binds) {
  Evaluation out;
  for (const auto& b : binds) {
    auto eq = b.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--bind expects NODE=VALUE, got '" + b + "'");
    out[b.substr(0, eq)] = parse_value(b.substr(eq + 1));
  }
  return out;
}

// The file's bindings with --bind on top; a bound node joins the free set.
Proposition proposition(const dsl::NamedFormula& nf, const Evaluation& overrides) {
  Evaluation ev = nf.bindings;
  for (const auto& [k, v] : overrides) ev[k] = v;
  auto free = nf.formula.free();
  for (const auto& [k, v] : ev)
    if (!nf.formula.is_free(k)) free.push_back(k);
  return {nf.formula.with_free(free), ev};
}

std::string format_state(const StateSpace& s, StateBits h) {
  std::string out;
  for (int i = 0; i < s.size(); ++i) out += (i ? " " : "") + s.nodes()[i] + "=" + (((h >> i) & 1u) ? "t" : "f");
  return out;
}

void print_trace(std::ostream& os, const Trace& t) {
  if (t.empty()) os << "    (already there)\n";
  for (const auto& step : t)
    os << "    " << step.node << ": " << (step.old_value ? 't' : 'f') << " -> " << (step.new_value ? 't' : 'f') << "  ["
       << to_string(step.rule) << "]\n";
}

// For each clause: the stuck hypothesis when it holds, otherwise a flip
// sequence from the all-t (resp. all-f) hypothesis that escapes.
struct Witness {
  const char* clause;
  bool holds;
  std::string state;
  std::optional<Trace> trace;
};

std::vector<Witness> witnesses(const Proposition& prop, const Config& cfg) {
  StateSpace s(prop, cfg.engine());
  auto c = s.classify();
  const StateBits all = s.state_count() - 1;
  std::vector<Witness> out;
  out.push_back(c.stuck_true_witness ? Witness{"stuck-true", true, format_state(s, *c.stuck_true_witness), std::nullopt}
                                     : Witness{"stuck-true", false, format_state(s, all), s.trace(all, false)});
  out.push_back(c.stuck_false_witness ? Witness{"stuck-false", true, format_state(s, *c.stuck_false_witness), std::nullopt}
                                      : Witness{"stuck-false", false, format_state(s, 0), s.trace(0, true)});
  return out;
}

void print_witnesses(std::ostream& os, const std::vector<Witness>& ws) {
  for (const auto& w : ws) {
    os << w.clause << (w.holds ? ": yes, stuck at " : ": no, from ") << w.state << "\n";
    if (w.trace) print_trace(os, *w.trace);
  }
}

Json witnesses_json(const std::vector<Witness>& ws) {
  Json out = Json::array();
  for (const auto& w : ws) {
    Json j{{"clause", w.clause}, {"holds", w.holds}, {"state", w.state}};
    if (w.trace) {
      Json steps = Json::array();
      for (const auto& step : *w.trace)
        steps.push_back(Json{{"node", step.node}, {"from", step.old_value ? "t" : "f"}, {"to", step.new_value ? "t" : "f"},
                             {"rule", std::string(to_string(step.rule))}});
      j["trace"] = steps;
    }
    out.push_back(std::move(j));
  }
  return out;
}

int cmd_eval(const Config& cfg, const std::string& file, const std::string& name, const std::vector<std::string>& binds,
             bool trace, bool check_oracle) {
  auto doc = load(file);
  auto prop = proposition(doc.formula(name), parse_binds(binds));
  auto v = truth_value(prop, cfg.engine());
  std::optional<TruthValue4> o;
  if (check_oracle) o = oracle::truth_value(prop, cfg.oracle_cap);
  if (cfg.format == "json") {
    Json j{{"formula", name}, {"value", letter(v)}};
    Json b = Json::object();
    for (const auto& [k, x] : prop.evaluation) b[k] = letter(x);
    j["bindings"] = b;
    if (o) j["oracle"] = letter(*o);
    if (trace) j["witnesses"] = witnesses_json(witnesses(prop, cfg));
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << letter(v) << "\n";
    if (o) std::cout << "oracle: " << letter(*o) << "\n";
    if (trace) print_witnesses(std::cout, witnesses(prop, cfg));
  }
  return o && *o != v ? mismatch : ok;
}

int cmd_table(const Config& cfg, const std::string& file, const std::string& name, bool restricted) {
  auto doc = load(file);
  const auto& f = doc.formula(name).formula;
  Json entries;
  std::vector<std::pair<std::string, TruthValue4>> rows;
  if (restricted) {
    auto t = restricted_truth_table(f, {}, cfg.engine());
    entries = to_json(t);
    for (std::size_t r = 0; r < t.entries.size(); ++r) rows.emplace_back(to_string(t.args(r)), t.entries[r]);
  } else {
    auto t = truth_table(f, {}, cfg.engine());
    entries = to_json(t);
    for (std::size_t r = 0; r < t.entries.size(); ++r) rows.emplace_back(to_string(t.args(r)), t.entries[r]);
  }
  if (cfg.format == "json") {
    std::cout << table_document(entries, f.free(), restricted).dump(2) << "\n";
    return ok;
  }
  for (const auto& [args, v] : rows) std::cout << (args.empty() ? "-" : args) << " " << v.symbol() << "\n";
  return ok;
}

int cmd_gates(const Config& cfg, const std::string& file, const std::string& name) {
  if (!file.empty()) {
    if (name.empty()) throw UsageError("--classify needs --formula");
    auto doc = load(file);
    auto sig = classify_gate(doc.formula(name).formula, cfg.engine());
    if (cfg.format == "json")
      std::cout << Json{{"formula", name}, {"signature", sig.to_string()}}.dump(2) << "\n";
    else
      std::cout << sig.to_string() << "\n";
    return ok;
  }
  auto atlas = enumerate_gates(cfg.engine());
  if (cfg.format == "json") {
    std::cout << to_json(atlas).dump(2) << "\n";
    return ok;
  }
  for (const auto& g : atlas) std::cout << g.signature.to_string() << "\n";
  return ok;
}

int cmd_realize(const Config& cfg, const std::string& restricted, const std::string& full) {
  if (restricted.empty() == full.empty()) throw UsageError("give exactly one of --restricted and --full");
  Formula f = restricted.empty() ? realize_full(FullTable::from_string(full), cfg.engine())
                                 : realize_restricted(RestrictedTable::from_string(restricted));
  if (cfg.format == "dot")
    std::cout << export_dot(f);
  else
    std::cout << dsl::serialize(f);
  return ok;
}

void print_report(const ValueReport& r, bool detail) {
  std::cout << (r.formula.empty() ? r.star : r.formula) << " " << r.value.symbol() << " (" << to_string(r.provenance)
            << ")\n";
  if (!detail) return;
  for (const auto& n : r.nodes) {
    std::cout << "  " << n.node << " " << n.value.symbol() << " " << to_string(n.provenance);
    if (!n.r_trace.empty()) std::cout << " R_n=" << to_string(n.r_trace);
    std::cout << "\n";
  }
}

int cmd_model(const Config& cfg, const std::string& file, const std::string& model, const std::string& name, bool all,
              bool report) {
  if (name.empty() == !all) throw UsageError("give exactly one of --formula and --all");
  auto doc = load(file);
  ModelEvaluator ev(doc.model(model), cfg.engine());
  std::vector<ValueReport> reports;
  for (const auto& nf : doc.formulas) {
    if (all ? !nf.formula.free().empty() : nf.formula.name() != name) continue;
    reports.push_back(ev.report(nf.formula));
  }
  if (!all && reports.empty()) doc.formula(name);  // raises unknown formula
  if (cfg.format == "json") {
    Json j = Json::array();
    for (const auto& r : reports) j.push_back(to_json(r));
    std::cout << (all ? j : j.at(0)).dump(2) << "\n";
    return ok;
  }
  for (const auto& r : reports) print_report(r, report);
  return ok;
}

std::vector<Formula> closed_formulas(const dsl::Document& doc) {
  std::vector<Formula> out;
  for (const auto& nf : doc.formulas)
    if (nf.formula.free().empty()) out.push_back(nf.formula);
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : " ") + s;
  return out.empty() ? "-" : out;
}

int cmd_classical(const Config& cfg, const std::string& file, const std::string& model, const std::string& corpus_file) {
  auto doc = load(file);
  auto tm = classical_theory_of(doc.model(model));
  std::vector<ClassicalFormula> corpus;
  std::vector<std::string> skipped;
  if (!corpus_file.empty()) {
    auto cdoc = load(corpus_file);
    for (const auto& f : closed_formulas(cdoc)) {
      if (is_well_grounded(f))
        corpus.push_back(unfold_classical(f.universe(), f.star()));
      else
        skipped.push_back(f.name());
    }
  }
  auto v = check_classical_correspondence(tm, corpus, cfg.engine());
  if (cfg.format == "json") {
    Json values = Json::object();
    for (const auto& [id, p] : v.values) values[id] = Json{{"value", letter(p.first)}, {"classical", p.second}};
    std::cout << Json{{"classical_model", v.is_classical_model}, {"l_formulas", v.l_formulas},
                      {"disagreements", v.disagreements}, {"iff_holds", v.iff_holds()},
                      {"corpus_size", v.corpus_size}, {"skipped", skipped}, {"values", values}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "classical model: " << (v.is_classical_model ? "yes" : "no") << "\n"
              << "well-grounded L formulas: " << join(v.l_formulas) << "\n"
              << "disagreements: " << join(v.disagreements) << "\n"
              << "corpus: " << v.corpus_size << " formulas";
    if (!skipped.empty()) std::cout << ", skipped (not well-grounded): " << join(skipped);
    std::cout << "\n" << "iff: " << (v.iff_holds() ? "holds" : "fails") << "\n";
  }
  return v.iff_holds() ? ok : mismatch;
}

int cmd_liarfalse(const Config& cfg, const std::string& file, const std::string& model, const std::string& corpus_file,
                  int max_iter) {
  auto doc = load(file);
  auto tm = classical_theory_of(doc.model(model));
  auto cdoc = load(corpus_file);
  auto corpus = closed_formulas(cdoc);
  auto run = build_liar_false_model(tm, corpus, max_iter, cfg.engine());
  // Report values under the corpus file's own names.
  std::map<std::string, std::string> names;
  for (const auto& f : run.corpus)
    if (!f.name().empty()) names.emplace(f.star(), f.name());
  auto label = [&](const std::string& id) {
    auto it = names.find(id);
    return it == names.end() || it->second == id ? id : it->second + "[" + id + "]";
  };
  if (cfg.format == "json") {
    Json steps = Json::array();
    for (const auto& s : run.steps) {
      Json values = Json::object();
      for (const auto& [id, val] : s.values) values[id] = letter(val);
      steps.push_back(Json{{"model", s.model.name}, {"added", s.added}, {"values", values}});
    }
    std::cout << Json{{"steps", steps}}.dump(2) << "\n";
    return ok;
  }
  for (const auto& s : run.steps) {
    std::size_t l = 0;
    for (const auto& [id, val] : s.values) l += val == L;
    std::vector<std::string> added;
    for (const auto& a : s.added) added.push_back(label(a));
    std::cout << s.model.name << ": " << l << " L formulas; made false: " << join(added) << "\n";
  }
  std::cout << "final values:\n";
  for (const auto& f : corpus) {
    auto it = std::find_if(run.corpus.begin(), run.corpus.end(), [&](const Formula& g) { return g.name() == f.name(); });
    if (it != run.corpus.end()) std::cout << "  " << f.name() << " " << run.steps.back().values.at(it->star()).symbol() << "\n";
  }
  return ok;
}

int cmd_rules(const Config& cfg, const std::string& file, const std::string& model, int samples, std::uint64_t seed) {
  auto doc = load(file);
  const Model& m = doc.model(model);
  Rng rng(seed);
  auto [mm, pool] = random_samples(m, rng, samples);
  auto report = check_external_rules(mm, pool, default_schemas(), cfg.engine());
  if (cfg.format == "json") {
    Json rules = Json::array(), schemas = Json::array();
    for (const auto& r : report.rules)
      rules.push_back(Json{{"rule", r.rule}, {"instances", r.instances}, {"holds", r.holds()},
                           {"counterexamples", r.counterexamples}});
    for (const auto& s : report.schemas)
      schemas.push_back(Json{{"schema", s.schema}, {"tautology", std::string(to_string(s.tautology))},
                             {"rule_holds", s.rule_holds}, {"agrees", s.agrees()}});
    std::cout << Json{{"seed", seed}, {"samples", samples}, {"rules", rules}, {"schemas", schemas}}.dump(2) << "\n";
    return ok;
  }
  for (const auto& r : report.rules) {
    std::cout << r.rule << ": " << (r.holds() ? "holds" : "fails") << " (" << r.instances << " instances";
    if (!r.holds()) std::cout << ", e.g. " << r.counterexamples.front();
    std::cout << ")\n";
  }
  for (const auto& s : report.schemas)
    std::cout << "R[" << s.schema << "]: " << (s.rule_holds ? "holds" : "fails") << ", " << to_string(s.tautology)
              << " tautology" << (s.agrees() ? "" : "  [disagrees]") << "\n";
  return ok;
}

int cmd_dot(const Config& cfg, const std::string& file, const std::string& name, const std::string& model,
            bool annotate) {
  auto doc = load(file);
  if (!model.empty()) {
    std::cout << export_dot(doc.model(model));
    return ok;
  }
  if (name.empty()) throw UsageError("dot needs --formula or --model");
  const auto& nf = doc.formula(name);
  std::map<std::string, TruthValue4> values;
  if (annotate) {
    // Star each node in turn, keeping the formula's bindings.
    for (const auto& id : nf.formula.node_set())
      values[id] = truth_value(Proposition{nf.formula.with_star(id).with_roots({nf.formula.star()}), nf.bindings},
                               cfg.engine());
  }
  std::cout << export_dot(nf.formula, values);
  return ok;
}

int cmd_corpus(const Config& cfg, const std::string& dir) {
  auto catalog = dir.empty() ? corpus_catalog() : corpus_catalog(dir);
  int failures = 0;
  Json j = Json::array();
  for (const auto& e : catalog) {
    auto r = run(e, cfg.engine());
    bool good = r.ok && r.oracle_ok;
    failures += !good;
    if (cfg.format == "json") {
      j.push_back(Json{{"id", r.id}, {"expected", r.expected}, {"computed", r.computed}, {"oracle", r.oracle}, {"ok", good}});
      continue;
    }
    std::cout << (good ? "ok   " : "FAIL ") << r.id << " expected " << r.expected << " computed " << r.computed;
    if (!r.oracle.empty() && !r.oracle_ok) std::cout << " oracle " << r.oracle;
    std::cout << "\n";
  }
  if (cfg.format == "json")
    std::cout << j.dump(2) << "\n";
  else
    std::cout << catalog.size() - failures << "/" << catalog.size() << " entries match\n";
  return failures ? mismatch : ok;
}

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::syntax_error:
    case ErrorCode::unknown_operator:
    case ErrorCode::duplicate_name:
    case ErrorCode::bits_length_mismatch:
      return parse_failed;
    case ErrorCode::too_many_nodes:
    case ErrorCode::fixpoint_cap_exceeded:
    case ErrorCode::no_fixpoint_within_cap:
      return cap_exceeded;
    default:
      return invalid;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Four-valued truth for self-referential formulas"};
  app.require_subcommand(1);
  Config cfg;
  app.add_option("--node-cap", cfg.node_cap, "state-space node cap (also SELFREF_NODE_CAP)")
      ->check(CLI::Range(1, kMaxNodeCap));
  app.add_option("--oracle-cap", cfg.oracle_cap, "node cap for the brute-force oracle")
      ->check(CLI::Range(1, oracle::kOracleMaxCap));
  app.add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"text", "json", "dot"}));

  std::string file, formula, model, corpus_file, restricted_spec, full_spec, classify_file, dir;
  std::vector<std::string> binds;
  bool trace = false, with_oracle = false, restricted = false, enumerate = false, all = false, report = false,
       annotate = false;
  int max_iter = 8, samples = 30;
  std::uint64_t seed = 1;

  auto* eval = app.add_subcommand("eval", "truth value of a formula");
  eval->add_option("file", file)->required();
  eval->add_option("--formula", formula)->required();
  eval->add_option("--bind", binds, "NODE=T|F|L|V");
  eval->add_flag("--trace", trace, "witnesses for each classification clause");
  eval->add_flag("--oracle", with_oracle, "cross-check with the brute-force oracle");

  auto* table = app.add_subcommand("table", "truth table over the free nodes");
  table->add_option("file", file)->required();
  table->add_option("--formula", formula)->required();
  table->add_flag("--restricted", restricted, "T/F evaluations only");

  auto* gates = app.add_subcommand("gates", "gate atlas or a gate's signature");
  gates->add_flag("--enumerate", enumerate, "all realizable signatures");
  gates->add_option("--classify", classify_file, "file holding the gate");
  gates->add_option("--formula", formula);

  auto* realize = app.add_subcommand("realize", "formula realizing a table");
  realize->add_option("--restricted", restricted_spec, "value string over T/F rows, e.g. TFFF");
  realize->add_option("--full", full_spec, "value string over T/F/L/V rows");

  auto* modelc = app.add_subcommand("model", "values in a model");
  modelc->add_option("file", file)->required();
  modelc->add_option("--model", model)->required();
  modelc->add_option("--formula", formula);
  modelc->add_flag("--all", all, "every closed formula of the file");
  modelc->add_flag("--report", report, "bound nodes with provenance and R_n traces");

  auto* classical = app.add_subcommand("classical", "classical correspondence for M(T)");
  classical->add_option("file", file)->required();
  classical->add_option("--model", model)->required();
  classical->add_option("--corpus", corpus_file, "extra well-grounded formulas");

  auto* liarfalse = app.add_subcommand("liarfalse", "iterate to a model where the Liar is false");
  liarfalse->add_option("file", file)->required();
  liarfalse->add_option("--model", model)->required();
  liarfalse->add_option("--corpus", corpus_file)->required();
  liarfalse->add_option("--max-iter", max_iter)->check(CLI::PositiveNumber);

  auto* rules = app.add_subcommand("rules", "external rules of inference in a simple model");
  rules->add_option("file", file)->required();
  rules->add_option("--model", model)->required();
  rules->add_option("--samples", samples)->check(CLI::PositiveNumber);
  rules->add_option("--seed", seed);

  auto* dot = app.add_subcommand("dot", "Graphviz rendering");
  dot->add_option("file", file)->required();
  dot->add_option("--formula", formula);
  dot->add_option("--model", model);
  dot->add_flag("--annotate", annotate, "value of every node, starred in turn");

  auto* corpus = app.add_subcommand("corpus", "check every catalog entry");
  corpus->add_option("--dir", dir, "corpus directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*eval) return cmd_eval(cfg, file, formula, binds, trace, with_oracle);
    if (*table) return cmd_table(cfg, file, formula, restricted);
    if (*gates) {
      if (enumerate == !classify_file.empty()) throw UsageError("give exactly one of --enumerate and --classify");
      return cmd_gates(cfg, classify_file, formula);
    }
    if (*realize) return cmd_realize(cfg, restricted_spec, full_spec);
    if (*modelc) return cmd_model(cfg, file, model, formula, all, report);
    if (*classical) return cmd_classical(cfg, file, model, corpus_file);
    if (*liarfalse) return cmd_liarfalse(cfg, file, model, corpus_file, max_iter);
    if (*rules) return cmd_rules(cfg, file, model, samples, seed);
    if (*dot) return cmd_dot(cfg, file, formula, model, annotate);
    if (*corpus) return cmd_corpus(cfg, dir);
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return usage;
  } catch (const dsl::ParseError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << d.to_string() << "\n";
    return parse_failed;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return invalid;
  }
  return usage;
}
