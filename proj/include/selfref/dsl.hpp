#pragma once

// Text format for node universes, formulas and models.
//
//   # comment
//   op ATMOST1 3 "11101000"          custom operator, char i = output of row i
//   let p                            letter node
//   node l = NOT(l)                  operator node, children by name
//   formula liar { star l }
//   formula cl { star a free p bind p=F nodes b }
//   model m { letters p; axiom true A B; axiom false C }
//
// Row i of an operator has bit (k-1-j) of i as the input at child j, so the
// first child is the most significant bit. Child order is positional.
// Names may be declared after use; cycles need that.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "selfref/engine.hpp"
#include "selfref/error.hpp"
#include "selfref/graph.hpp"
#include "selfref/model.hpp"

namespace selfref::dsl {

struct NamedFormula {
  Formula formula;
  Evaluation bindings;  // from `bind` clauses; may be partial
};

struct Document {
  UniversePtr universe = std::make_shared<const NodeUniverse>();
  std::map<std::string, TablePtr> operators;  // custom operators by name
  std::vector<NamedFormula> formulas;
  std::vector<Model> models;

  const NamedFormula* find_formula(std::string_view name) const {
    for (const auto& f : formulas)
      if (f.formula.name() == name) return &f;
    return nullptr;
  }
  const NamedFormula& formula(std::string_view name) const {
    if (auto f = find_formula(name)) return *f;
    throw Error(ErrorCode::unknown_node, "no formula named '" + std::string(name) + "'");
  }
  const Model* find_model(std::string_view name) const {
    for (const auto& m : models)
      if (m.name == name) return &m;
    return nullptr;
  }
  const Model& model(std::string_view name) const {
    if (auto m = find_model(name)) return *m;
    throw Error(ErrorCode::unknown_node, "no model named '" + std::string(name) + "'");
  }
};

struct SourceDiagnostic {
  ErrorCode code;
  int line = 0;
  int column = 0;
  std::string expected;  // empty unless a specific token was expected
  std::string message;

  std::string to_string() const {
    std::string s = std::to_string(line) + ":" + std::to_string(column) + ": " + std::string(selfref::to_string(code)) +
                    ": " + message;
    if (!expected.empty()) s += " (expected " + expected + ")";
    return s;
  }
};

class ParseError : public Error {
 public:
  explicit ParseError(std::vector<SourceDiagnostic> diags)
      : Error(diags.front().code, diags.front().to_string()), diagnostics_(std::move(diags)) {}
  const std::vector<SourceDiagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<SourceDiagnostic> diagnostics_;
};

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

inline const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {"op",   "let",     "node",  "formula", "model", "star",
                                              "free", "nodes",   "bind",  "letters", "axiom", "true",
                                              "false", "lie",   "vacuous"};
  return words;
}

namespace detail {

enum class Tok { ident, number, string, punct, end };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

struct Stop {};  // unwinds the parser after a syntax error is recorded

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run(std::vector<SourceDiagnostic>& diags) {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::end, "", line_, col_});
        return out;
      }
      const int line = line_, col = col_;
      const char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string s;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          s += advance();
        out.push_back({Tok::ident, s, line, col});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string s;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) s += advance();
        out.push_back({Tok::number, s, line, col});
      } else if (c == '"') {
        advance();
        std::string s;
        while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') s += advance();
        if (pos_ >= src_.size() || src_[pos_] != '"') {
          diags.push_back({ErrorCode::syntax_error, line, col, "'\"'", "unterminated string"});
          throw Stop{};
        }
        advance();
        out.push_back({Tok::string, s, line, col});
      } else if (std::string_view("(){},;=").find(c) != std::string_view::npos) {
        out.push_back({Tok::punct, std::string(1, advance()), line, col});
      } else {
        std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "\\x" + hex(c);
        diags.push_back({ErrorCode::syntax_error, line, col, "", "unexpected character '" + shown + "'"});
        throw Stop{};
      }
    }
  }

 private:
  static std::string hex(char c) {
    static const char* digits = "0123456789abcdef";
    auto u = static_cast<unsigned char>(c);
    return {digits[u >> 4], digits[u & 15]};
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct Located {
  std::string name;
  int line;
  int column;
};

struct NodeDecl {
  Located name;
  std::optional<Located> op;  // none for letters
  std::vector<Located> children;
};

struct FormulaDecl {
  Located name;
  std::optional<Located> star;
  std::vector<Located> free, nodes;
  std::vector<std::pair<Located, TruthValue4>> binds;
};

struct ModelDecl {
  Located name;
  std::vector<Located> letters;
  std::vector<std::pair<TruthValue4, Located>> axioms;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<SourceDiagnostic>& diags) : toks_(std::move(tokens)), diags_(diags) {}

  void run() {
    while (peek().kind != Tok::end) statement();
  }

  std::vector<std::pair<Located, TablePtr>> ops;
  std::vector<NodeDecl> nodes;
  std::vector<FormulaDecl> formulas;
  std::vector<ModelDecl> models;

 private:
  const Token& peek() const { return toks_[i_]; }
  Token next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

  [[noreturn]] void fail(const Token& t, const std::string& expected, const std::string& message = {}) {
    std::string found = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    diags_.push_back({ErrorCode::syntax_error, t.line, t.column, expected,
                      message.empty() ? "unexpected " + found : message});
    throw Stop{};
  }

  bool at_punct(char c) const { return peek().kind == Tok::punct && peek().text[0] == c; }
  bool at_word(std::string_view w) const { return peek().kind == Tok::ident && peek().text == w; }

  void expect_punct(char c) {
    if (!at_punct(c)) fail(peek(), std::string("'") + c + "'");
    next();
  }

  Located name(const std::string& what) {
    const Token& t = peek();
    if (t.kind != Tok::ident) fail(t, what);
    if (reserved_words().count(t.text)) fail(t, what, "'" + t.text + "' is a reserved word");
    next();
    return {t.text, t.line, t.column};
  }

  void statement() {
    const Token& t = peek();
    if (t.kind != Tok::ident) fail(t, "a statement keyword (op, let, node, formula, model)");
    if (t.text == "op") return op_decl();
    if (t.text == "let") return let_decl();
    if (t.text == "node") return node_decl();
    if (t.text == "formula") return formula_decl();
    if (t.text == "model") return model_decl();
    fail(t, "a statement keyword (op, let, node, formula, model)");
  }

  void op_decl() {
    next();
    Located n = name("operator name");
    const Token arity = peek();
    if (arity.kind != Tok::number) fail(arity, "arity");
    next();
    if (arity.text.size() > 2 || std::stoi(arity.text) > 24)
      fail(arity, "arity", "arity " + arity.text + " exceeds the limit of 24");
    const int k = std::stoi(arity.text);
    const Token bits = peek();
    if (bits.kind != Tok::string) fail(bits, "quoted output bits");
    next();
    if (bits.text.find_first_not_of("01") != std::string::npos) fail(bits, "'0' or '1'", "output bits must be 0 or 1");
    if (bits.text.size() != (std::size_t{1} << k)) {
      diags_.push_back({ErrorCode::bits_length_mismatch, bits.line, bits.column, "",
                        "operator '" + n.name + "' of arity " + std::to_string(k) + " needs " +
                            std::to_string(std::size_t{1} << k) + " bits, got " + std::to_string(bits.text.size())});
      return;
    }
    ops.emplace_back(n, std::make_shared<const OperatorTable>(OperatorTable::from_bits(n.name, k, bits.text)));
  }

  void let_decl() {
    next();
    nodes.push_back({name("letter name"), std::nullopt, {}});
    while (at_punct(',')) {
      next();
      nodes.push_back({name("letter name"), std::nullopt, {}});
    }
  }

  void node_decl() {
    next();
    NodeDecl d{name("node name"), std::nullopt, {}};
    expect_punct('=');
    d.op = name("operator name");
    if (at_punct('(')) {
      next();
      if (!at_punct(')')) {
        d.children.push_back(name("child name"));
        while (at_punct(',')) {
          next();
          d.children.push_back(name("child name"));
        }
      }
      expect_punct(')');
    }
    nodes.push_back(std::move(d));
  }

  std::vector<Located> name_list(const std::string& what) {
    std::vector<Located> out;
    while (peek().kind == Tok::ident && !reserved_words().count(peek().text)) {
      out.push_back(name(what));
      if (at_punct(',')) next();
    }
    return out;
  }

  TruthValue4 value() {
    const Token& t = peek();
    if (t.kind != Tok::ident || t.text.size() != 1 || !TruthValue4::from_symbol(t.text[0])) fail(t, "T, F, L or V");
    next();
    return *TruthValue4::from_symbol(t.text[0]);
  }

  void formula_decl() {
    next();
    FormulaDecl d{name("formula name"), std::nullopt, {}, {}, {}};
    expect_punct('{');
    while (!at_punct('}')) {
      const Token& t = peek();
      if (at_word("star")) {
        next();
        if (d.star) fail(t, "", "star given twice");
        d.star = name("star node");
      } else if (at_word("free")) {
        next();
        auto l = name_list("free node");
        d.free.insert(d.free.end(), l.begin(), l.end());
      } else if (at_word("nodes")) {
        next();
        auto l = name_list("node name");
        d.nodes.insert(d.nodes.end(), l.begin(), l.end());
      } else if (at_word("bind")) {
        next();
        do {
          if (at_punct(',')) next();
          Located n = name("bound node");
          expect_punct('=');
          d.binds.emplace_back(n, value());
        } while (at_punct(','));
      } else if (at_punct(';')) {
        next();
      } else {
        fail(t, "star, free, nodes, bind or '}'");
      }
    }
    next();
    if (!d.star) fail(toks_[i_ - 1], "star", "formula '" + d.name.name + "' has no star");
    formulas.push_back(std::move(d));
  }

  void model_decl() {
    next();
    ModelDecl d{name("model name"), {}, {}};
    expect_punct('{');
    while (!at_punct('}')) {
      const Token& t = peek();
      if (at_word("letters")) {
        next();
        auto l = name_list("letter name");
        d.letters.insert(d.letters.end(), l.begin(), l.end());
      } else if (at_word("axiom")) {
        next();
        static const std::map<std::string, TruthValue4> kinds = {{"true", T}, {"false", F}, {"lie", L}, {"vacuous", V}};
        const Token& k = peek();
        auto it = k.kind == Tok::ident ? kinds.find(k.text) : kinds.end();
        if (it == kinds.end()) fail(k, "true, false, lie or vacuous");
        next();
        for (auto& f : name_list("formula name")) d.axioms.emplace_back(it->second, std::move(f));
      } else if (at_punct(';')) {
        next();
      } else {
        fail(t, "letters, axiom or '}'");
      }
    }
    next();
    models.push_back(std::move(d));
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  std::vector<SourceDiagnostic>& diags_;
};

}  // namespace detail

/// Parses a source file; throws ParseError carrying every diagnostic found.
inline Document parse(std::string_view source) {
  using namespace detail;
  std::vector<SourceDiagnostic> diags;
  std::vector<Token> tokens;
  try {
    tokens = Lexer(source).run(diags);
  } catch (const Stop&) {
    throw ParseError(std::move(diags));
  }
  Parser p(std::move(tokens), diags);
  try {
    p.run();
  } catch (const Stop&) {
    throw ParseError(std::move(diags));
  }
  auto err = [&](ErrorCode code, const Located& at, std::string message) {
    diags.push_back({code, at.line, at.column, "", std::move(message)});
  };

  Document doc;
  for (auto& [n, table] : p.ops) {
    if (builtin::find(n.name) || doc.operators.count(n.name)) {
      err(ErrorCode::duplicate_name, n, "operator '" + n.name + "' is already defined");
      continue;
    }
    doc.operators.emplace(n.name, table);
  }

  auto u = std::make_shared<NodeUniverse>();
  std::set<std::string> declared;
  for (const auto& d : p.nodes) declared.insert(d.name.name);
  std::set<std::string> seen;
  for (const auto& d : p.nodes) {
    if (!seen.insert(d.name.name).second) {
      err(ErrorCode::duplicate_name, d.name, "node '" + d.name.name + "' is already declared");
      continue;
    }
    if (!d.op) {
      u->add_letter(d.name.name);
      continue;
    }
    TablePtr table = builtin::find(d.op->name);
    if (!table) {
      auto it = doc.operators.find(d.op->name);
      if (it != doc.operators.end()) table = it->second;
    }
    if (!table) {
      err(ErrorCode::unknown_operator, *d.op, "unknown operator '" + d.op->name + "'");
      continue;
    }
    if (static_cast<int>(d.children.size()) != table->arity()) {
      err(ErrorCode::arity_mismatch, *d.op,
          d.op->name + " takes " + std::to_string(table->arity()) + " children, got " + std::to_string(d.children.size()));
      continue;
    }
    bool ok = true;
    std::vector<std::string> children;
    for (const auto& c : d.children) {
      if (!declared.count(c.name)) {
        err(ErrorCode::dangling_child, c, "child '" + c.name + "' of '" + d.name.name + "' is not declared");
        ok = false;
      }
      children.push_back(c.name);
    }
    if (ok) u->add(Node{d.name.name, table, std::move(children)});
  }

  auto node_ok = [&](const Located& n) {
    if (u->contains(n.name)) return true;
    if (!declared.count(n.name)) err(ErrorCode::unknown_node, n, "no node named '" + n.name + "'");
    return false;
  };
  UniversePtr universe = u;
  doc.universe = universe;
  std::set<std::string> formula_names;
  for (const auto& d : p.formulas) {
    if (!formula_names.insert(d.name.name).second) {
      err(ErrorCode::duplicate_name, d.name, "formula '" + d.name.name + "' is already declared");
      continue;
    }
    bool ok = node_ok(*d.star);
    std::vector<std::string> free, roots;
    for (const auto& f : d.free) {
      ok = node_ok(f) && ok;
      free.push_back(f.name);
    }
    for (const auto& f : d.nodes) {
      ok = node_ok(f) && ok;
      roots.push_back(f.name);
    }
    Evaluation binds;
    for (const auto& [n, v] : d.binds) {
      ok = node_ok(n) && ok;
      if (std::find(free.begin(), free.end(), n.name) == free.end()) free.push_back(n.name);
      if (binds.count(n.name)) err(ErrorCode::duplicate_name, n, "'" + n.name + "' is bound twice");
      binds[n.name] = v;
    }
    if (!ok) continue;
    doc.formulas.push_back({Formula(universe, d.star->name, free, d.name.name).with_roots(roots), binds});
  }

  std::set<std::string> model_names;
  for (const auto& d : p.models) {
    if (!model_names.insert(d.name.name).second) {
      err(ErrorCode::duplicate_name, d.name, "model '" + d.name.name + "' is already declared");
      continue;
    }
    Model m;
    m.name = d.name.name;
    m.universe = universe;
    bool ok = true;
    for (const auto& l : d.letters) {
      ok = node_ok(l) && ok;
      m.letters.push_back(l.name);
    }
    for (const auto& [v, fname] : d.axioms) {
      auto f = doc.find_formula(fname.name);
      if (!f) {
        if (!formula_names.count(fname.name)) err(ErrorCode::unknown_node, fname, "no formula named '" + fname.name + "'");
        ok = false;
        continue;
      }
      m.axioms(v).push_back(f->formula);
    }
    if (ok) doc.models.push_back(std::move(m));
  }
  if (!diags.empty()) {
    std::stable_sort(diags.begin(), diags.end(), [](const SourceDiagnostic& a, const SourceDiagnostic& b) {
      return std::tie(a.line, a.column) < std::tie(b.line, b.column);
    });
    throw ParseError(std::move(diags));
  }
  return doc;
}

namespace detail {

inline std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

}  // namespace detail

/// Deterministic text: custom operators, letters and operator nodes sorted
/// by name, then formulas and models sorted by name.
inline std::string serialize(const NodeUniverse& u, const std::vector<NamedFormula>& formulas,
                             const std::vector<Model>& models, const std::map<std::string, TablePtr>& extra_ops = {}) {
  std::map<std::string, TablePtr> ops = extra_ops;
  for (const auto& n : u.nodes()) {
    if (n.is_letter() || builtin::is_builtin(*n.table)) continue;
    auto [it, fresh] = ops.emplace(n.table->name(), n.table);
    if (!fresh && !it->second->same_column(*n.table))
      throw Error(ErrorCode::duplicate_name, "two different operators are named '" + n.table->name() + "'");
  }
  std::ostringstream os;
  for (const auto& [name, t] : ops) os << "op " << name << ' ' << t->arity() << " \"" << t->bits() << "\"\n";
  std::vector<const Node*> nodes;
  for (const auto& n : u.nodes()) nodes.push_back(&n);
  std::sort(nodes.begin(), nodes.end(), [](const Node* a, const Node* b) { return a->id < b->id; });
  for (const Node* n : nodes)
    if (n->is_letter()) os << "let " << n->id << '\n';
  for (const Node* n : nodes)
    if (!n->is_letter()) os << "node " << n->id << " = " << n->table->name() << '(' << detail::join(n->children, ", ") << ")\n";

  std::vector<const NamedFormula*> fs;
  for (const auto& f : formulas) fs.push_back(&f);
  std::sort(fs.begin(), fs.end(), [](auto a, auto b) { return a->formula.name() < b->formula.name(); });
  for (const auto* nf : fs) {
    const Formula& f = nf->formula;
    os << "formula " << f.name() << " { star " << f.star();
    if (!f.free().empty()) os << " free " << detail::join(f.free(), " ");
    if (!f.roots().empty()) os << " nodes " << detail::join(f.roots(), " ");
    if (!nf->bindings.empty()) {
      std::vector<std::string> binds;
      for (const auto& id : f.free())
        if (auto it = nf->bindings.find(id); it != nf->bindings.end()) binds.push_back(id + "=" + it->second.symbol());
      os << " bind " << detail::join(binds, ", ");
    }
    os << " }\n";
  }
  std::vector<const Model*> ms;
  for (const auto& m : models) ms.push_back(&m);
  std::sort(ms.begin(), ms.end(), [](auto a, auto b) { return a->name < b->name; });
  static const char* kinds[] = {"true", "false", "lie", "vacuous"};
  for (const Model* m : ms) {
    os << "model " << m->name << " { letters " << detail::join(m->letters, " ");
    for (auto v : kAllValues) {
      if (m->axioms(v).empty()) continue;
      std::vector<std::string> names;
      for (const auto& a : m->axioms(v)) names.push_back(a.name());
      os << "; axiom " << kinds[v.index()] << ' ' << detail::join(names, " ");
    }
    os << " }\n";
  }
  return os.str();
}

inline std::string serialize(const Document& doc) {
  return serialize(*doc.universe, doc.formulas, doc.models, doc.operators);
}

/// A single formula with its graph, as a standalone file.
inline std::string serialize(const Formula& f, const Evaluation& bindings = {}) {
  NodeUniverse u;
  for (const auto& id : f.node_set()) u.add(f.universe().at(id));
  Formula named = f.name().empty() ? f.with_name("f") : f;
  return serialize(u, {{named, bindings}}, {});
}

}  // namespace selfref::dsl
