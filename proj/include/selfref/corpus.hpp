#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "selfref/dsl.hpp"
#include "selfref/engine.hpp"
#include "selfref/error.hpp"
#include "selfref/model.hpp"
#include "selfref/oracle.hpp"
#include "selfref/tables.hpp"

#ifndef SELFREF_CORPUS_DIR
#define SELFREF_CORPUS_DIR "corpus"
#endif

namespace selfref {

/// One expectation from the example catalog. A formula entry evaluates
/// `formula` under its file bindings overridden by `bindings`; a model entry
/// values `formula` in `model`; a table entry compares the full table.
struct CorpusEntry {
  std::string id;
  std::string file;
  std::string source;  // file text
  std::string formula;
  std::string model;
  Evaluation bindings;
  std::optional<TruthValue4> expected;
  std::optional<FullTable> expected_table;
  std::string citation;
  std::string provenance = "quoted";  // or "derived" for values worked out by hand
};

/// SELFREF_CORPUS_DIR from the environment, else the compiled-in path.
inline std::filesystem::path corpus_dir() {
  if (const char* s = std::getenv("SELFREF_CORPUS_DIR"); s && *s) return s;
  return SELFREF_CORPUS_DIR;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline TruthValue4 value_from_json(const nlohmann::json& j) {
  auto s = j.get<std::string>();
  auto v = s.size() == 1 ? TruthValue4::from_symbol(s[0]) : std::nullopt;
  if (!v) throw Error(ErrorCode::invalid_argument, "bad truth value '" + s + "'");
  return *v;
}

}  // namespace detail

/// Entries of corpus/catalog.json with their source files loaded.
inline std::vector<CorpusEntry> corpus_catalog(const std::filesystem::path& dir = corpus_dir()) {
  auto catalog = nlohmann::json::parse(read_text(dir / "catalog.json"));
  std::vector<CorpusEntry> out;
  for (const auto& j : catalog.at("entries")) {
    CorpusEntry e;
    e.id = j.at("id").get<std::string>();
    e.file = j.at("file").get<std::string>();
    e.source = read_text(dir / e.file);
    e.formula = j.at("formula").get<std::string>();
    e.model = j.value("model", "");
    if (j.contains("bind"))
      for (const auto& [k, v] : j.at("bind").items()) e.bindings[k] = detail::value_from_json(v);
    if (j.contains("expect")) e.expected = detail::value_from_json(j.at("expect"));
    if (j.contains("expect_table")) e.expected_table = FullTable::from_string(j.at("expect_table").get<std::string>());
    e.citation = j.value("citation", "");
    e.provenance = j.value("provenance", "quoted");
    out.push_back(std::move(e));
  }
  return out;
}

inline const CorpusEntry& corpus_entry(const std::vector<CorpusEntry>& catalog, const std::string& id) {
  for (const auto& e : catalog)
    if (e.id == id) return e;
  throw Error(ErrorCode::unknown_node, "no corpus entry '" + id + "'");
}

/// The proposition a formula entry evaluates.
inline Proposition corpus_proposition(const CorpusEntry& e) {
  auto doc = dsl::parse(e.source);
  const auto& nf = doc.formula(e.formula);
  Evaluation ev = nf.bindings;
  for (const auto& [k, v] : e.bindings) ev[k] = v;
  return {nf.formula, ev};
}

struct CorpusResult {
  std::string id;
  std::string expected;
  std::string computed;
  std::string oracle;  // empty when the oracle does not apply (model entries)
  bool ok = false;
  bool oracle_ok = true;
};

inline CorpusResult run(const CorpusEntry& e, EngineOptions options = {}) {
  CorpusResult r;
  r.id = e.id;
  auto doc = dsl::parse(e.source);
  if (!e.model.empty()) {
    const auto& m = doc.model(e.model);
    auto v = value_in_model(m, doc.formula(e.formula).formula, options);
    r.computed = std::string(1, v.symbol());
    r.expected = e.expected ? std::string(1, e.expected->symbol()) : "";
    r.ok = e.expected && *e.expected == v;
    return r;
  }
  const auto& f = doc.formula(e.formula).formula;
  if (e.expected_table) {
    auto t = truth_table(f, {}, options);
    r.computed = t.to_string();
    r.expected = e.expected_table->to_string();
    r.ok = t == *e.expected_table;
    if (static_cast<int>(f.node_set().size()) <= oracle::kOracleNodeCap) {
      std::string o;
      for (std::size_t row = 0; row < t.entries.size(); ++row) {
        auto args = t.args(row);
        Evaluation ev;
        for (std::size_t i = 0; i < f.free().size(); ++i) ev[f.free()[i]] = args[i];
        o += oracle::truth_value({f, ev}).symbol();
      }
      r.oracle = o;
      r.oracle_ok = o == r.computed;
    }
    return r;
  }
  auto prop = corpus_proposition(e);
  auto v = truth_value(prop, options);
  r.computed = std::string(1, v.symbol());
  r.expected = e.expected ? std::string(1, e.expected->symbol()) : "";
  r.ok = e.expected && *e.expected == v;
  if (static_cast<int>(prop.formula.node_set().size()) <= oracle::kOracleNodeCap) {
    auto o = oracle::truth_value(prop);
    r.oracle = std::string(1, o.symbol());
    r.oracle_ok = o == v;
  }
  return r;
}

inline std::vector<CorpusResult> run_corpus(const std::vector<CorpusEntry>& catalog, EngineOptions options = {}) {
  std::vector<CorpusResult> out;
  for (const auto& e : catalog) out.push_back(run(e, options));
  return out;
}

}  // namespace selfref
