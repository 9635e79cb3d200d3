#pragma once

// Random source files and a structural comparison of parsed documents,
// shared by the DSL tests and the acceptance run.

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "selfref/dsl.hpp"
#include "selfref/random.hpp"

namespace test_support {

/// A random document: one universe from random_formula, a few formulas over
/// it with free sets, roots and partial bindings, and models over its letters.
inline selfref::dsl::Document random_document(selfref::Rng& rng) {
  using namespace selfref;
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  RandomFormulaOptions o;
  o.max_nodes = 12;
  o.max_free = 3;
  auto base = random_formula(rng, o);
  dsl::Document doc;
  doc.universe = base.universe_ptr();
  std::vector<std::string> ids, letters;
  for (const auto& n : base.universe().nodes()) {
    ids.push_back(n.id);
    if (n.is_letter()) letters.push_back(n.id);
  }
  const int nf = pick(1, 4);
  for (int i = 0; i < nf; ++i) {
    std::vector<std::string> pool = ids;
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::string star = pool.front();
    std::vector<std::string> free(pool.begin() + 1, pool.begin() + 1 + pick(0, std::min<int>(3, pool.size() - 1)));
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<std::string> roots(pool.begin(), pool.begin() + pick(0, std::min<int>(2, pool.size())));
    Evaluation binds;
    for (const auto& id : free)
      if (pick(0, 2) == 0) binds[id] = kAllValues[pick(0, 3)];
    doc.formulas.push_back({Formula(doc.universe, star, free, "f" + std::to_string(i)).with_roots(roots), binds});
  }
  const int nm = pick(0, 2);
  for (int i = 0; i < nm; ++i) {
    Model m;
    m.name = "m" + std::to_string(i);
    m.universe = doc.universe;
    for (const auto& l : letters)
      if (pick(0, 1)) m.letters.push_back(l);
    for (const auto& f : doc.formulas)
      if (int k = pick(0, 5); k < 4) m.axioms(kAllValues[k]).push_back(f.formula);
    doc.models.push_back(std::move(m));
  }
  return doc;
}

inline std::string random_source(selfref::Rng& rng) { return selfref::dsl::serialize(random_document(rng)); }

/// Same nodes (id, operator name, column, children), formulas and models,
/// ignoring declaration order. Returns an empty string when equal.
inline std::string structural_difference(const selfref::dsl::Document& a, const selfref::dsl::Document& b) {
  using namespace selfref;
  auto node_key = [](const Node& n) {
    std::string k = n.id + ":";
    if (n.is_letter()) return k + "letter";
    k += n.table->name() + "/" + std::to_string(n.table->arity()) + "/" + n.table->bits() + "(";
    for (const auto& c : n.children) k += c + ",";
    return k + ")";
  };
  auto nodes = [&](const dsl::Document& d) {
    std::vector<std::string> out;
    for (const auto& n : d.universe->nodes()) out.push_back(node_key(n));
    std::sort(out.begin(), out.end());
    return out;
  };
  if (nodes(a) != nodes(b)) return "universes differ";
  auto formulas = [](const dsl::Document& d) {
    std::map<std::string, std::string> out;
    for (const auto& nf : d.formulas) {
      std::string k = "star=" + nf.formula.star() + " free=";
      for (const auto& f : nf.formula.free()) k += f + ",";
      k += " roots=";
      for (const auto& r : nf.formula.roots()) k += r + ",";
      k += " bind=";
      for (const auto& [id, v] : nf.bindings) k += id + "=" + v.symbol() + ",";
      out[nf.formula.name()] = k;
    }
    return out;
  };
  if (formulas(a) != formulas(b)) return "formulas differ";
  auto models = [](const dsl::Document& d) {
    std::map<std::string, std::string> out;
    for (const auto& m : d.models) {
      std::string k = "letters=";
      for (const auto& l : m.letters) k += l + ",";
      for (auto v : kAllValues) {
        k += std::string(" ") + v.symbol() + "=";
        for (const auto& f : m.axioms(v)) k += f.name() + ",";
      }
      out[m.name] = k;
    }
    return out;
  };
  if (models(a) != models(b)) return "models differ";
  return "";
}

/// Byte soup for the parser: pure noise, or a real source with a few
/// random edits, which reaches deeper into the grammar.
inline std::string fuzz_input(selfref::Rng& rng, const std::vector<std::string>& seeds) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::string s;
  if (seeds.empty() || pick(0, 3) == 0) {
    const int n = pick(0, 200);
    for (int i = 0; i < n; ++i) s += static_cast<char>(pick(0, 255));
    return s;
  }
  s = seeds[pick(0, static_cast<int>(seeds.size()) - 1)];
  static const std::string alphabet = "(){};=,\"#\n 01abxyz_opnodeletformulastarfreemodelaxiom\xff\x80";
  const int edits = pick(1, 6);
  for (int e = 0; e < edits && !s.empty(); ++e) {
    const int at = pick(0, static_cast<int>(s.size()) - 1);
    switch (pick(0, 3)) {
      case 0: s.erase(at, pick(1, 8)); break;
      case 1: s.insert(s.begin() + at, alphabet[pick(0, static_cast<int>(alphabet.size()) - 1)]); break;
      case 2: s[at] = static_cast<char>(pick(0, 255)); break;
      default: s = s.substr(0, at); break;
    }
  }
  return s;
}

}  // namespace test_support
