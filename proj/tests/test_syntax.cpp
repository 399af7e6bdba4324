#include <gtest/gtest.h>

#include <random>

#include "coh/coherence.hpp"
#include "support.hpp"

using namespace coh;
using namespace coh::test;

TEST(Subst, VariableHit) { EXPECT_EQ(subst(src_s("x"), "x", src_s("1")), src_s("1")); }

TEST(Subst, DescendsHomomorphically) {
  EXPECT_EQ(subst(src_s("\\y. x y"), "x", src_s("\\z. z")), src_s("\\y. (\\z. z) y"));
}

TEST(Subst, ShadowedBinder) { EXPECT_EQ(subst(src_s("\\x. x"), "x", src_s("1")), src_s("\\x. x")); }

TEST(Subst, AvoidsCapture) {
  // The substituted y must stay free under the binder named y.
  Term r = subst(src_s("\\y. x"), "x", src_s("y"));
  EXPECT_EQ(free_names(r), std::set<std::string>{"y"});
  EXPECT_FALSE(alpha_eq(r, src_s("\\y. y")));
}

TEST(AlphaEq, Examples) {
  EXPECT_TRUE(alpha_eq(src_s("\\x. x"), src_s("\\y. y")));
  EXPECT_FALSE(alpha_eq(src_s("\\x. \\y. x"), src_s("\\a. \\b. b")));
  EXPECT_TRUE(alpha_eq(src_s("fix f x. f x"), src_s("fix g y. g y")));
  EXPECT_FALSE(alpha_eq(src_s("fix f x. f x"), src_s("fix f x. x f")));
  EXPECT_TRUE(alpha_eq(src_e("S0 k. k 1"), src_e("S0 j. j 1")));
}

TEST(IsValue, Grammar) {
  for (auto s : {"x", "\\x. x", "fix f x. x", "3", "()", "[top -> id](\\x. x)", "[lift id]1", "[(id, id, id)](\\k. k 1)",
                 "[lift id][lift id]1"})
    EXPECT_TRUE(is_value(tgt(s))) << s;
  for (auto s : {"[id]1", "[id o id]1", "[top]1", "(\\x. x) 1", "1 + 2", "[lift id]((\\x. x) 1)"})
    EXPECT_FALSE(is_value(tgt(s))) << s;
  EXPECT_FALSE(is_value(src_e("<1>")));
  EXPECT_FALSE(is_value(src_e("S0 k. 1")));
}

TEST(LocallyNameless, OpenCloseRoundTrip) {
  Term body = src_s("x (\\y. x y) z");
  EXPECT_EQ(open(close(body, "x"), free_var("x")), body);
  EXPECT_EQ(open(close(body, "x"), free_var("w")), subst(body, "x", free_var("w")));
}

TEST(LocallyNameless, FixBindsBothNames) {
  Term f = src_s("fix g n. g (n + 1)");
  EXPECT_TRUE(is_closed(f));
  EXPECT_EQ(open2(f.as<term::Fix>()->body, src_s("h"), src_s("2")), src_s("h (2 + 1)"));
}

TEST(Property, SubstitutingAnAbsentNameIsIdentity) {
  GenConfig g;
  g.samples = 200;
  g.seed = 11;
  g.calculus = Calculus::Eff;
  for (const auto& s : gen_terms(g)) {
    Term t = s.term;
    Term renamed = subst(t, "zz_missing", nat_const(0));
    EXPECT_EQ(renamed, t);
    EXPECT_TRUE(is_closed(t));
    EXPECT_EQ(term_size(t), term_size(renamed));
  }
}
