#include <gtest/gtest.h>

#include <random>

#include "coh/coherence.hpp"
#include "coh/eval.hpp"
#include "coh/stlc.hpp"
#include "support.hpp"

using namespace coh;
using namespace coh::test;

namespace {

std::string sk(const TypeDerivation& d) { return print(to_skeleton(d)); }
std::string sk(const SubDerivation& d) { return print(to_skeleton(d)); }

// Textbook subtyping for arrows over nat and top.
bool oracle_sub(const Type& a, const Type& b) {
  if (b.kind() == TypeKind::Top) return true;
  if (a.kind() == TypeKind::Nat) return b.kind() == TypeKind::Nat;
  if (a.kind() == TypeKind::Top) return false;
  return b.kind() == TypeKind::Arrow && oracle_sub(b.domain(), a.domain()) && oracle_sub(a.codomain(), b.codomain());
}

Type random_type(std::mt19937_64& rng, int depth) {
  int r = static_cast<int>(rng() % 3);
  if (depth == 0 || r == 0) return Type::nat();
  if (r == 1) return Type::top();
  return Type::arrow(random_type(rng, depth - 1), random_type(rng, depth - 1));
}

}  // namespace

TEST(SubtypeS, Examples) {
  auto refl = subtype_s(ty_s("nat -> top"), ty_s("nat -> top"));
  ASSERT_TRUE(refl);
  EXPECT_EQ(sk(*refl), "(S-Refl)");
  auto arr = subtype_s(ty_s("top -> top"), ty_s("nat -> top"));
  ASSERT_TRUE(arr);
  EXPECT_EQ(sk(*arr), "(S-Arrow (S-Top) (S-Refl))");
  EXPECT_FALSE(subtype_s(ty_s("nat"), ty_s("nat -> nat")));
}

TEST(SubtypeS, AgreesWithOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    Type a = random_type(rng, 3), b = random_type(rng, 3);
    auto d = subtype_s(a, b);
    ASSERT_EQ(d.has_value(), oracle_sub(a, b)) << print(a) << " <: " << print(b);
    if (!d) continue;
    EXPECT_TRUE(validate(Calculus::Stlc, *d));
    EXPECT_TRUE(coercion_check(translate_sub_s(*d), translate_type_s(a), translate_type_s(b), Flavor::Stlc));
  }
}

TEST(CheckS, Examples) {
  auto c = check_s({}, src_s("1"), ty_s("nat"));
  ASSERT_TRUE(c);
  EXPECT_EQ(sk(*c), "(T-Const)");
  auto t = check_s({}, src_s("1"), ty_s("top"));
  ASSERT_TRUE(t);
  EXPECT_EQ(sk(*t), "(T-Sub (T-Const) (S-Top))");
  EXPECT_FALSE(check_s({}, src_s("1 2"), ty_s("nat")));
  EXPECT_FALSE(check_s({}, src_s("y"), ty_s("nat")));
}

TEST(CheckS, ApplyTopIsWellTyped) {
  auto d = check_s({}, src_s("(\\f. f 1) (\\x. x)"), ty_s("top"));
  ASSERT_TRUE(d);
  EXPECT_TRUE(validate(Calculus::Stlc, *d));
}

TEST(TranslateS, Types) {
  EXPECT_EQ(translate_type_s(ty_s("top")), Type::unit());
  EXPECT_EQ(translate_type_s(ty_s("nat")), Type::nat());
  EXPECT_EQ(translate_type_s(ty_s("(nat -> top) -> nat")), ty_t("(nat -> unit) -> nat"));
}

TEST(TranslateS, Coercions) {
  EXPECT_EQ(translate_sub_s(make_refl(Type::nat())), Coercion::id());
  auto arr = subtype_s(ty_s("top -> top"), ty_s("nat -> top"));
  EXPECT_EQ(print(translate_sub_s(*arr)), "top -> id");
  auto top = *subtype_s(ty_s("nat -> top"), ty_s("top"));
  auto trans = make_trans(top, make_refl(ty_s("nat -> top")));
  EXPECT_EQ(print(translate_sub_s(trans)), "top o id");
}

TEST(TranslateS, ApplyTopDerivation) {
  auto d = replay_derivation(Calculus::Stlc, {}, src_s("(\\f. f 1) (\\x. x)"), ty_s("top"),
                             parse_skeleton(data_file("apply_top.drv")));
  ASSERT_TRUE(d) << d.error().message;
  EXPECT_EQ(translate_term_s(*d), tgt("(\\f. f 1) ([top -> id](\\x. x))"));
  EXPECT_EQ(translate_term_s(*check_s({}, src_s("7"), ty_s("nat"))), tgt("7"));
}

TEST(TranslateS, FixpointDerivations) {
  Term e = src_s(data_file("fixpoint.stlc"));
  Type t = ty_s("((nat -> top) -> nat -> nat) -> nat -> nat");
  auto d1 = replay_derivation(Calculus::Stlc, {}, e, t, parse_skeleton(data_file("fixpoint_d1.drv")));
  auto d2 = replay_derivation(Calculus::Stlc, {}, e, t, parse_skeleton(data_file("fixpoint_d2.drv")));
  ASSERT_TRUE(d1) << d1.error().message;
  ASSERT_TRUE(d2) << d2.error().message;
  EXPECT_EQ(translate_term_s(*d1), tgt("fix y f. \\x. f ([id -> top](y f)) x"));
  EXPECT_EQ(translate_term_s(*d2), tgt("[((id -> top) -> id) -> id](fix y f. \\x. f (y f) x)"));
}

// Every generated judgment has a canonical derivation, and translations of
// both typecheck at the translated type.
TEST(Property, CanonicalDerivationsTranslateWellTyped) {
  GenConfig g;
  g.samples = 300;
  g.seed = 21;
  for (const auto& s : gen_terms(g)) {
    auto d = check_s(s.env, s.term, s.goal);
    ASSERT_TRUE(d) << print(s.term) << " : " << print(s.goal);
    ASSERT_TRUE(validate(Calculus::Stlc, *d));
    TargetCheckOptions o;
    o.expected = translate_type_s(s.goal);
    EXPECT_TRUE(target_check(translate_env_s(s.env), translate_term_s(*d), Flavor::Stlc, o)) << print(s.term);
  }
}
