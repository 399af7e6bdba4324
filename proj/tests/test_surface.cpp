#include <gtest/gtest.h>

#include "coh/coherence.hpp"
#include "support.hpp"

using namespace coh;
using namespace coh::test;

TEST(Parse, ResetOfShift) {
  Term e = src_e("<1 + (S0 k. k 2)>");
  Term expected = reset0(prim(PrimOp::Add, nat_const(1), shift0("k", app(free_var("k"), nat_const(2)))));
  EXPECT_EQ(e, expected);
}

TEST(Parse, Coercion) {
  EXPECT_EQ(parse_coercion("lift id"), Coercion::lift(Coercion::id()));
  // Composition binds looser than the arrow.
  EXPECT_EQ(parse_coercion("top -> id o id"),
            Coercion::comp(Coercion::arrow(Coercion::top(), Coercion::id()), Coercion::id()));
  EXPECT_EQ(parse_coercion("top -> (id o id)"),
            Coercion::arrow(Coercion::top(), Coercion::comp(Coercion::id(), Coercion::id())));
  EXPECT_EQ(parse_coercion("(id, lift id, id)"),
            Coercion::cons(Coercion::id(), Coercion::lift(Coercion::id()), Coercion::id()));
}

TEST(Parse, EffectType) {
  EXPECT_EQ(ty_e("[nat, nat, nat]"), Type::eff(Type::nat(), Type::nat(), Type::nat()));
  EXPECT_EQ(ty_e("nat -> [nat,nat,nat] "), Type::arrow(Type::nat(), Type::eff(Type::nat(), Type::nat(), Type::nat())));
  EXPECT_EQ(ty_s("nat -> top -> nat"), Type::arrow(Type::nat(), Type::arrow(Type::top(), Type::nat())));
}

TEST(Parse, FragmentsAreEnforced) {
  EXPECT_THROW(parse_term("S0 k. k 1", Fragment::SourceStlc), ParseError);
  EXPECT_THROW(parse_term("[id]1", Fragment::SourceEff), ParseError);
  EXPECT_THROW(parse_term("()", Fragment::SourceEff), ParseError);
  EXPECT_THROW(parse_type("top", TypeSyntax::SourceEff), ParseError);
  EXPECT_THROW(parse_type("unit", TypeSyntax::SourceStlc), ParseError);
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    parse_term("\\x.\n  (x", Fragment::SourceStlc);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.found(), "end of input");
  }
}

TEST(Parse, EnvironmentFile) {
  Env g = parse_env(data_file("reset.env"), TypeSyntax::SourceEff);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g.at("y"), ty_e("nat -> [nat, nat, nat]"));
}

TEST(Parse, Skeleton) {
  Skeleton sk = parse_skeleton(data_file("loop_d2.drv"));
  EXPECT_EQ(sk.rule, Rule::TApp);
  EXPECT_EQ(print(sk) + "\n", data_file("loop_d2.drv"));
  EXPECT_THROW(parse_skeleton("(T-Sub (T-Const))"), ParseError);
}

TEST(Print, Coercions) {
  EXPECT_EQ(print(Coercion::lift(Coercion::id())), "lift id");
  EXPECT_EQ(print(parse_coercion("(top -> id) -> id")), "(top -> id) -> id");
}

TEST(Print, CpsOutput) {
  Term t = tgt("\\k. [lift id](fix f x. f x) (\\g. [lift id]1 (\\y. g y k))");
  EXPECT_EQ(print(t), "\\k. [lift id](fix f x. f x) (\\g. [lift id]1 (\\y. g y k))");
}

// Printing then parsing gives back an alpha-equal term, for generated source
// terms and for their translations.
TEST(Property, PrintParseRoundTrip) {
  std::size_t n = 0;
  for (auto calc : {Calculus::Stlc, Calculus::Eff}) {
    GenConfig g;
    g.calculus = calc;
    g.samples = 500;
    g.seed = 3;
    Fragment src = calc == Calculus::Eff ? Fragment::SourceEff : Fragment::SourceStlc;
    for (const auto& s : gen_terms(g)) {
      EXPECT_EQ(parse_term(print(s.term), src), s.term) << print(s.term);
      Term t = translate_term(calc, s.derivation);
      EXPECT_EQ(parse_term(print(t), Fragment::Target), t) << print(t);
      TypeSyntax ts = calc == Calculus::Eff ? TypeSyntax::SourceEff : TypeSyntax::SourceStlc;
      EXPECT_EQ(parse_type(print(s.goal), ts), s.goal);
      EXPECT_EQ(parse_skeleton(print(to_skeleton(s.derivation))), to_skeleton(s.derivation));
      n += 2;
    }
  }
  EXPECT_GE(n, 1000u);
}
