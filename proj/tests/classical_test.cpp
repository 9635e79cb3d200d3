#include <gtest/gtest.h>

#include <random>

#include "selfref/classical.hpp"
#include "selfref/engine.hpp"
#include "selfref/random.hpp"

using namespace selfref;
using CF = ClassicalFormula;

namespace {

std::vector<std::map<std::string, bool>> assignments(const std::set<std::string>& letters) {
  std::vector<std::string> ls(letters.begin(), letters.end());
  std::vector<std::map<std::string, bool>> out;
  for (std::uint32_t m = 0; m < (1u << ls.size()); ++m) {
    std::map<std::string, bool> a;
    for (std::size_t i = 0; i < ls.size(); ++i) a[ls[i]] = (m >> i) & 1u;
    out.push_back(a);
  }
  return out;
}

}  // namespace

TEST(Classical, EvalAndRender) {
  auto f = CF::implies(CF::conj(CF::letter("p"), CF::letter("q")), CF::negation(CF::letter("p")));
  EXPECT_EQ(f.to_string(), "((p & q) -> ~p)");
  EXPECT_EQ(f.connective_count(), 3u);
  EXPECT_TRUE(f.eval({{"p", true}, {"q", false}}));
  EXPECT_FALSE(f.eval({{"p", true}, {"q", true}}));
  EXPECT_THROW(f.eval({{"p", true}}), Error);
}

TEST(Classical, FromClassicalIsStronglyWellGrounded) {
  auto cf = CF::disj(CF::letter("q"), CF::conj(CF::letter("p"), CF::letter("q")));
  auto f = from_classical(cf);
  EXPECT_TRUE(is_strongly_well_grounded(f));
  EXPECT_EQ(f.free(), (std::vector<std::string>{"q", "p"}));
  EXPECT_EQ(to_classical(f), cf);
}

TEST(Classical, ToClassicalRejects) {
  auto u = std::make_shared<NodeUniverse>();
  u->add_letter("p");
  u->add_operator("e", builtin::ID(), {"p"});
  u->add_operator("l", builtin::NOT(), {"l"});
  EXPECT_THROW(to_classical(Formula(u, "l")), Error);
  EXPECT_THROW(to_classical(Formula(u, "e", {"p"})), Error);
  EXPECT_THROW(to_classical(Formula(u, "e")), Error);
}

TEST(Classical, DnfIsEquivalentAndWellShaped) {
  Rng rng(11);
  const std::vector<std::string> letters = {"p", "q", "r"};
  for (int i = 0; i < 300; ++i) {
    auto cf = random_classical(rng, letters, 6);
    auto d = to_dnf(cf);
    ASSERT_TRUE(is_dnf(d)) << cf.to_string() << " -> " << d.to_string();
    for (const auto& a : assignments({"p", "q", "r"})) ASSERT_EQ(d.eval(a), cf.eval(a)) << cf.to_string();
  }
  EXPECT_FALSE(is_dnf(CF::negation(CF::conj(CF::letter("p"), CF::letter("q")))));
}

TEST(Classical, ExpandedDnfGuardsEveryNonRootNode) {
  auto cf = CF::conj(CF::letter("p"), CF::negation(CF::letter("q")));
  auto f = expand_dnf(cf);
  const auto& u = f.universe();
  EXPECT_NE(u.at(f.star()).table->name(), "ID");
  for (const auto& id : f.node_set()) {
    const Node& n = u.at(id);
    if (n.is_letter() || n.table->name() == "ID") continue;
    for (const auto& c : n.children) EXPECT_EQ(u.at(c).table->name(), "ID") << id << " -> " << c;
  }
  for (const auto& a : assignments({"p", "q"})) {
    Evaluation e{{"p", a.at("p") ? T : F}, {"q", a.at("q") ? T : F}};
    EXPECT_EQ(truth_value(f, e), cf.eval(a) ? T : F);
    EXPECT_EQ(classical_value(u, f.star(), a), cf.eval(a));
  }
}

TEST(Classical, ClassicalValueNeedsGroundedness) {
  auto u = std::make_shared<NodeUniverse>();
  u->add_operator("l", builtin::NOT(), {"l"});
  u->add_letter("p");
  EXPECT_FALSE(classical_value(*u, "l", {}).has_value());
  EXPECT_FALSE(classical_value(*u, "p", {}).has_value());
  EXPECT_EQ(classical_value(*u, "p", {{"p", true}}), true);
}
