#include <gtest/gtest.h>

#include <regex>

#include "selfref/corpus.hpp"
#include "selfref/export.hpp"
#include "selfref/realization.hpp"
#include "support.hpp"

using namespace selfref;
using test_support::formula;

namespace {

int count(const std::string& s, const std::string& needle) {
  int n = 0;
  for (auto at = s.find(needle); at != std::string::npos; at = s.find(needle, at + 1)) ++n;
  return n;
}

const char* kAnd = "let p\nlet q\nnode a = AND(p, q)\nformula and { star a free p q }";

}  // namespace

TEST(Export, LiarDot) {
  auto dot = export_dot(formula("node l = NOT(l)\nformula liar { star l }", "liar"));
  EXPECT_EQ(dot.rfind("digraph \"liar\" {", 0), 0u) << dot;
  EXPECT_NE(dot.find("label=\"¬ *\""), std::string::npos) << dot;
  EXPECT_EQ(count(dot, "->"), 1);
  EXPECT_NE(dot.find("\"l\" -> \"l\""), std::string::npos);
  EXPECT_EQ(dot.back(), '\n');
}

TEST(Export, DotFreeNodesAndValues) {
  auto f = formula(kAnd, "and");
  auto dot = export_dot(f, {{"a", F}});
  EXPECT_EQ(count(dot, "doublecircle"), 2);
  EXPECT_NE(dot.find("label=\"∧ *\\nF\""), std::string::npos) << dot;
  // Child positions on the two edges of the binary node.
  EXPECT_NE(dot.find("\"a\" -> \"p\" [taillabel=\"0\"]"), std::string::npos) << dot;
  EXPECT_NE(dot.find("\"a\" -> \"q\" [taillabel=\"1\"]"), std::string::npos) << dot;
}

TEST(Export, ModelDot) {
  auto d = dsl::parse(read_text(corpus_dir() / "theory.pl"));
  auto dot = export_dot(d.model("tf"));
  EXPECT_NE(dot.find("digraph \"tf\""), std::string::npos);
  EXPECT_NE(dot.find("\"imp\" [label=\"→ *\\nT\""), std::string::npos) << dot;
  EXPECT_NE(dot.find("\"q\" [label=\"q *\\nF\""), std::string::npos) << dot;
}

TEST(Export, AndTableJson) {
  auto j = to_json(truth_table(formula(kAnd, "and")));
  ASSERT_EQ(j.size(), 16u);
  // The conjunction table, written out by rows p = T, F, L, V.
  const std::map<std::string, std::string> expected = {
      {"TT", "T"}, {"TF", "F"}, {"TL", "L"}, {"TV", "V"}, {"FT", "F"}, {"FF", "F"}, {"FL", "F"}, {"FV", "F"},
      {"LT", "L"}, {"LF", "F"}, {"LL", "L"}, {"LV", "F"}, {"VT", "V"}, {"VF", "F"}, {"VL", "F"}, {"VV", "V"}};
  for (const auto& [k, v] : expected) EXPECT_EQ(j.at(k).get<std::string>(), v) << k;
  EXPECT_EQ(j.begin().key(), "TT");
}

TEST(Export, RestrictedAndDocument) {
  auto f = formula(kAnd, "and");
  auto j = to_json(restricted_truth_table(f));
  EXPECT_EQ(j.size(), 4u);
  EXPECT_EQ(j.at("TT"), "T");
  EXPECT_EQ(j.at("FT"), "F");
  auto doc = table_document(j, f.free(), true);
  EXPECT_EQ(doc.at("columns"), (Json{"p", "q"}));
  EXPECT_TRUE(doc.at("restricted").get<bool>());
  auto parsed = nlohmann::json::parse(doc.dump());
  EXPECT_EQ(parsed.at("entries").size(), 4u);
}

TEST(Export, ValueReportJson) {
  auto d = dsl::parse(read_text(corpus_dir() / "theory.pl"));
  ModelEvaluator ev(d.model("tf"));
  auto j = to_json(ev.report(d.formula("theory").formula));
  EXPECT_EQ(j.at("formula"), "theory");
  EXPECT_EQ(j.at("star"), "imp");
  EXPECT_EQ(j.at("value"), "T");  // a true axiom
  ASSERT_TRUE(j.at("nodes").is_array());
  bool saw_star = false;
  for (const auto& n : j.at("nodes")) {
    EXPECT_TRUE(n.contains("provenance"));
    if (n.at("node") == "imp") saw_star = true;
  }
  EXPECT_TRUE(saw_star);
}

TEST(Export, GateAtlasJson) {
  auto atlas = enumerate_gates();
  auto j = to_json(atlas);
  ASSERT_EQ(j.size(), atlas.size());
  std::regex sig("^[TFLV]{4}$");
  for (const auto& g : j) {
    EXPECT_TRUE(std::regex_match(g.at("signature").get<std::string>(), sig));
    // The witness re-parses and reproduces its signature.
    auto w = dsl::parse(g.at("witness").get<std::string>()).formula("gate").formula;
    EXPECT_EQ(truth_table(w).to_string(), g.at("signature").get<std::string>());
  }
}
