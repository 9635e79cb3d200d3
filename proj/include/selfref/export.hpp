#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "selfref/dsl.hpp"
#include "selfref/graph.hpp"
#include "selfref/model.hpp"
#include "selfref/realization.hpp"
#include "selfref/tables.hpp"

namespace selfref {

using Json = nlohmann::ordered_json;

inline std::string node_label(const Node& n) {
  if (n.is_letter()) return n.id;
  static const std::map<std::string, std::string> symbols = {
      {"NOT", "¬"}, {"AND", "∧"}, {"OR", "∨"}, {"IMPLIES", "→"}, {"IFF", "↔"}, {"ID", "="}, {"TRUE", "⊤"}, {"FALSE", "⊥"}};
  auto it = symbols.find(n.table->name());
  if (it != symbols.end() && builtin::is_builtin(*n.table)) return it->second;
  return n.table->name();
}

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline void dot_nodes(std::ostringstream& os, const NodeUniverse& u, const std::set<std::string>& ids,
                      const std::set<std::string>& stars, const std::set<std::string>& free,
                      const std::map<std::string, TruthValue4>& values) {
  for (const auto& id : ids) {
    const Node& n = u.at(id);
    std::string label = node_label(n);
    if (stars.count(id)) label += " *";
    if (auto it = values.find(id); it != values.end()) label += std::string("\n") + it->second.symbol();
    os << "  " << dot_quote(id) << " [label=" << dot_quote(label)
       << (free.count(id) ? ", shape=doublecircle" : ", shape=circle") << "];\n";
  }
  for (const auto& id : ids) {
    const Node& n = u.at(id);
    for (std::size_t j = 0; j < n.children.size(); ++j) {
      os << "  " << dot_quote(id) << " -> " << dot_quote(n.children[j]);
      if (n.children.size() > 1) os << " [taillabel=\"" << j << "\"]";
      os << ";\n";
    }
  }
}

}  // namespace detail

/// Graphviz text. The star is marked `*`, free nodes are double circles and
/// `values` adds a T/F/L/V line under a node's label. Edges carry the child
/// position when a node has several children.
inline std::string export_dot(const Formula& f, const std::map<std::string, TruthValue4>& values = {}) {
  std::ostringstream os;
  os << "digraph " << detail::dot_quote(f.name().empty() ? "formula" : f.name()) << " {\n";
  detail::dot_nodes(os, f.universe(), f.node_set(), {f.star()}, {f.free().begin(), f.free().end()}, values);
  os << "}\n";
  return os.str();
}

/// All axiom graphs of a model; axiom stars are marked and annotated with
/// their values, plus anything in `values`.
inline std::string export_dot(const Model& m, std::map<std::string, TruthValue4> values = {}) {
  std::set<std::string> ids, stars;
  for (const auto& [a, v] : m.all_axioms()) {
    auto s = a.node_set();
    ids.insert(s.begin(), s.end());
    stars.insert(a.star());
    values.emplace(a.star(), v);
  }
  std::ostringstream os;
  os << "digraph " << detail::dot_quote(m.name.empty() ? "model" : m.name) << " {\n";
  detail::dot_nodes(os, *m.universe, ids, stars, {}, values);
  os << "}\n";
  return os.str();
}

/// {"TF": "L", ...}: keys are evaluation strings in column order, rows in
/// table order.
inline Json to_json(const FullTable& t) {
  Json j = Json::object();
  for (std::size_t row = 0; row < t.entries.size(); ++row) j[to_string(t.args(row))] = std::string(1, t.entries[row].symbol());
  return j;
}

inline Json to_json(const RestrictedTable& t) {
  Json j = Json::object();
  for (std::size_t row = 0; row < t.entries.size(); ++row) j[to_string(t.args(row))] = std::string(1, t.entries[row].symbol());
  return j;
}

inline Json table_document(const Json& entries, const std::vector<std::string>& columns, bool restricted) {
  return Json{{"columns", columns}, {"restricted", restricted}, {"entries", entries}};
}

inline Json to_json(const ValueReport& r) {
  Json nodes = Json::array();
  for (const auto& n : r.nodes) {
    Json item{{"node", n.node}, {"value", std::string(1, n.value.symbol())}, {"provenance", std::string(to_string(n.provenance))}};
    if (!n.r_trace.empty()) item["r_trace"] = to_string(n.r_trace);
    nodes.push_back(std::move(item));
  }
  return Json{{"formula", r.formula},
              {"star", r.star},
              {"value", std::string(1, r.value.symbol())},
              {"provenance", std::string(to_string(r.provenance))},
              {"nodes", std::move(nodes)}};
}

/// [{"signature": "FTLV", "witness": "<DSL text>"}, ...]
inline Json to_json(const std::vector<Gate>& atlas) {
  Json j = Json::array();
  for (const auto& g : atlas)
    j.push_back(Json{{"signature", g.signature.to_string()}, {"witness", dsl::serialize(g.witness.with_name("gate"))}});
  return j;
}

}  // namespace selfref
