#include <gtest/gtest.h>

#include "selfref/rules.hpp"
#include "support.hpp"

using namespace selfref;

namespace {

const char* kRuleNames[] = {"modus ponens",    "modus tollens", "contrapositive", "chain rule",
                            "disjunctive inference", "double negation", "De Morgan", "simplification",
                            "conjunction",     "disjunctive syllogism"};

// 20 random simple models with 30 samples each, checked once and shared.
const std::vector<ExternalRulesReport>& sweep() {
  static const std::vector<ExternalRulesReport> reports = [] {
    std::vector<ExternalRulesReport> out;
    Rng rng(20);
    const std::vector<std::string> letters = {"p", "q", "r"};
    for (int i = 0; i < 20; ++i) {
      auto m = random_simple_model(rng, {letters.begin(), letters.begin() + 1 + static_cast<int>(rng() % 3)});
      auto [mm, pool] = random_samples(m, rng, 30);
      out.push_back(check_external_rules(mm, pool));
    }
    return out;
  }();
  return reports;
}

}  // namespace

TEST(Simple, Recognition) {
  auto doc = test_support::doc(
      "let p, q\nnode n = NOT(p)\nformula p { star p }\nformula q { star q }\nformula n { star n }\n"
      "model s { letters p q; axiom true p; axiom false q }\nmodel partial { letters p q; axiom true p }\n"
      "model theory { letters p q; axiom true n; axiom false q }\nmodel liar_model { letters p q; axiom lie p; axiom false q }");
  EXPECT_TRUE(is_simple(doc.model("s")));
  EXPECT_FALSE(is_simple(doc.model("partial")));
  EXPECT_FALSE(is_simple(doc.model("theory")));
  EXPECT_FALSE(is_simple(doc.model("liar_model")));
  EXPECT_THROW(check_external_rules(doc.model("liar_model"), {}), Error);
}

TEST(ExternalRules, ModusPonensInSimpleModel) {
  auto doc = test_support::doc("let p, q\nformula p { star p }\nformula q { star q }\nmodel s { letters p q; axiom true p; axiom false q }");
  Rng rng(1);
  auto [m, pool] = random_samples(doc.model("s"), rng, 30);
  auto report = check_external_rules(m, pool);
  ASSERT_EQ(report.rules.size(), 10u);
  EXPECT_EQ(report.rules[0].rule, "modus ponens");
  EXPECT_TRUE(report.rules[0].holds()) << report.rules[0].counterexamples.front();
  EXPECT_GT(report.rules[0].instances, 0u);
}

class RuleSweep : public ::testing::TestWithParam<const char*> {};

TEST_P(RuleSweep, HoldsInRandomSimpleModels) {
  std::size_t instances = 0, failing_models = 0;
  std::string example;
  for (const auto& report : sweep())
    for (const auto& r : report.rules) {
      if (r.rule != GetParam()) continue;
      instances += r.instances;
      if (r.holds()) continue;
      ++failing_models;
      if (example.empty()) example = r.counterexamples.front();
    }
  EXPECT_GT(instances, 0u);
  EXPECT_EQ(failing_models, 0u) << GetParam() << " fails, e.g. " << example;
}

INSTANTIATE_TEST_SUITE_P(All, RuleSweep, ::testing::ValuesIn(kRuleNames), [](const auto& info) {
  std::string s = info.param;
  for (auto& c : s)
    if (c == ' ') c = '_';
  return s;
});

TEST(ExternalRules, SchemasHoldExactlyForStrongTautologies) {
  for (const auto& report : sweep())
    for (const auto& s : report.schemas) EXPECT_TRUE(s.agrees()) << s.schema << " " << s.counterexample;
}

TEST(ExternalRules, ChainRuleCounterexample) {
  // a = a ∧ p with p true is V, b = b → q with q false is L, x is another
  // copy of a. Then a → b and b → x are true but a → x is only V.
  auto doc = test_support::doc(
      "let p, q\nnode a = AND(a, p)\nnode b = IMPLIES(b, q)\nnode x = AND(x, p)\n"
      "node ab = IMPLIES(a, b)\nnode bx = IMPLIES(b, x)\nnode ax = IMPLIES(a, x)\n"
      "formula p { star p }\nformula q { star q }\nformula a { star a }\nformula b { star b }\nformula ab { star ab }\nformula bx { star bx }\nformula ax { star ax }\n"
      "model s { letters p q; axiom true p; axiom false q }");
  ModelEvaluator ev(doc.model("s"));
  EXPECT_EQ(ev.value(doc.formula("a").formula), V);
  EXPECT_EQ(ev.value(doc.formula("b").formula), L);
  EXPECT_EQ(ev.value(doc.formula("ab").formula), T);
  EXPECT_EQ(ev.value(doc.formula("bx").formula), T);
  EXPECT_EQ(ev.value(doc.formula("ax").formula), V);
}

TEST(ExternalRules, ExcludedMiddleNeedsClassicalLetters) {
  auto doc = test_support::doc(
      "let p, q\nnode o = OR(p, n)\nnode n = NOT(p)\nnode i = IMPLIES(q, o)\n"
      "formula p { star p }\nformula q { star q }\nformula o { star o }\nformula i { star i }\n"
      "model liar_model { letters p q; axiom lie p; axiom true q }\nmodel s { letters p q; axiom true p q }");
  ModelEvaluator lie(doc.model("liar_model"));
  EXPECT_TRUE(satisfies(lie, doc.formula("q").formula));
  EXPECT_FALSE(satisfies(lie, doc.formula("o").formula));
  EXPECT_FALSE(satisfies(lie, doc.formula("i").formula));
  ModelEvaluator s(doc.model("s"));
  EXPECT_TRUE(satisfies(s, doc.formula("o").formula));
  EXPECT_TRUE(satisfies(s, doc.formula("i").formula));
}
