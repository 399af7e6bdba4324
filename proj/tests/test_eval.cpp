#include <gtest/gtest.h>

#include "coh/coherence.hpp"
#include "coh/eval.hpp"
#include "support.hpp"

using namespace coh;
using namespace coh::test;

namespace {

Result<Type> check_at(const std::string& term, const std::string& type, Flavor f) {
  TargetCheckOptions o;
  o.expected = ty_t(type);
  return target_check({}, tgt(term), f, o);
}

// Closed target programs: generated translations in their canonical
// closing context, plus the first few reducts of each.
std::vector<Term> target_corpus(std::size_t per_calculus, std::uint64_t seed) {
  std::vector<Term> out;
  for (auto calc : {Calculus::Stlc, Calculus::Eff}) {
    GenConfig g;
    g.calculus = calc;
    g.samples = per_calculus;
    g.seed = seed;
    for (const auto& s : gen_terms(g)) {
      Type t = translate_type(calc, s.goal);
      auto ctxs = gen_contexts(flavor_of(calc), t, Type::nat(), GenConfig{.seed = seed, .contexts = 1});
      if (ctxs.empty()) continue;
      Term cur = plug_hole(ctxs.front(), translate_term(calc, s.derivation));
      for (int i = 0; i < 4; ++i) {
        out.push_back(cur);
        auto r = step(cur);
        if (r.kind != StepResult::Kind::Stepped) break;
        cur = r.term;
      }
    }
  }
  return out;
}

}  // namespace

TEST(TargetCheck, Examples) {
  auto id = check_at("\\x. x", "nat -> nat", Flavor::Stlc);
  ASSERT_TRUE(id);
  EXPECT_EQ(*id, ty_t("nat -> nat"));
  EXPECT_TRUE(check_at("[top -> id](\\x. x)", "nat -> unit", Flavor::Stlc));
  EXPECT_TRUE(check_at("\\k1. \\k2. k1 (k2 42)", "[nat, nat, [nat, nat, nat]]", Flavor::Effect));
  EXPECT_TRUE(check_at("\\k. [lift id](fix f x. f x) (\\g. [lift id]1 (\\y. g y k))", "[nat, nat, nat]",
                       Flavor::Effect));
}

TEST(TargetCheck, Rejections) {
  EXPECT_FALSE(check_at("[top]1", "nat", Flavor::Stlc));
  EXPECT_FALSE(check_at("()", "unit", Flavor::Effect));
  EXPECT_FALSE(check_at("[lift id]1", "nat", Flavor::Stlc));
  EXPECT_FALSE(target_check({}, tgt("1 2"), Flavor::Stlc));
  // A continuation argument must be a value.
  auto r = check_at("([lift id]1) ((\\k. k) (\\x. x))", "nat", Flavor::Effect);
  ASSERT_FALSE(r);
  EXPECT_NE(r.error().message.find("T-KApp"), std::string::npos);
}

TEST(CoercionCheck, Examples) {
  EXPECT_TRUE(coercion_check(Coercion::top(), Type::nat(), Type::unit(), Flavor::Stlc));
  EXPECT_TRUE(coercion_check(parse_coercion("lift id"), Type::nat(), ty_t("[nat,nat,nat]"), Flavor::Effect));
  EXPECT_FALSE(coercion_check(Coercion::id(), Type::nat(), Type::unit(), Flavor::Stlc));
  EXPECT_TRUE(coercion_check(parse_coercion("(id, lift id, id)"), ty_t("[nat, [nat, nat, nat], nat]"),
                             ty_t("[nat, nat, nat]"), Flavor::Effect));
  EXPECT_FALSE(coercion_check(parse_coercion("lift id"), Type::nat(), ty_t("[nat,nat,nat]"), Flavor::Stlc));
}

TEST(Step, Examples) {
  auto a = step(tgt("[top]5"));
  EXPECT_EQ(a.kind, StepResult::Kind::Stepped);
  EXPECT_EQ(a.step, StepKind::Iota);
  EXPECT_EQ(a.term, unit_value());

  auto b = step(tgt("([top -> id](\\x. x)) 1"));
  EXPECT_EQ(b.step, StepKind::Iota);
  EXPECT_EQ(b.term, tgt("[id]((\\x. x) ([top]1))"));

  auto c = step(tgt("([lift id]7) (\\x. x)"));
  EXPECT_EQ(c.step, StepKind::Beta);
  EXPECT_EQ(c.term, tgt("[id]((\\x. x) 7)"));

  EXPECT_EQ(step(tgt("\\x. x")).kind, StepResult::Kind::Value);
  EXPECT_EQ(step(tgt("1 2")).kind, StepResult::Kind::Stuck);
}

TEST(Step, ConsRule) {
  auto r = step(tgt("([(id, lift id, id)](\\k. k 1)) (\\x. x)"));
  EXPECT_EQ(r.step, StepKind::Iota);
  EXPECT_EQ(r.rule, "cons");
  EXPECT_EQ(r.term, tgt("[id]((\\k. k 1) ([id -> lift id](\\x. x)))"));
}

TEST(Evaluate, Examples) {
  std::vector<std::string> trace;
  auto o = evaluate(tgt("(\\f. f 1) ([top -> id](\\x. x))"), {}, &trace);
  EXPECT_EQ(o.kind, Outcome::Kind::Converged);
  EXPECT_EQ(o.term, unit_value());
  EXPECT_EQ(o.beta, 2u);
  EXPECT_EQ(o.iota, 3u);
  ASSERT_EQ(trace.size(), 5u);
  EXPECT_EQ(trace[0].substr(0, 9), "beta lam ");

  auto n = evaluate(tgt("42"));
  EXPECT_EQ(n.term, nat_const(42));
  EXPECT_EQ(n.beta + n.iota, 0u);

  auto c = evaluate(tgt("[id o id]1"));
  EXPECT_EQ(c.term, nat_const(1));
  EXPECT_EQ(c.beta, 0u);
  EXPECT_EQ(c.iota, 3u);
  EXPECT_EQ(outcome_string(c), "1 (beta=0, iota=3)");
}

TEST(Evaluate, Limits) {
  auto loop = evaluate(tgt("(fix f x. f x) 1"), EvalLimits{100});
  EXPECT_EQ(loop.kind, Outcome::Kind::FuelExhausted);
  EXPECT_EQ(loop.beta, 100u);
  EXPECT_EQ(evaluate(tgt("1 + (\\x. x)")).kind, Outcome::Kind::Stuck);
}

TEST(Erase, Examples) {
  EXPECT_EQ(erase(tgt("[id]1")), tgt("(\\a. a) 1"));
  EXPECT_EQ(erase(tgt("7")), tgt("7"));
  EXPECT_EQ(erase(tgt("[lift id]1")), tgt("(\\a. \\k. (\\b. b) (k a)) 1"));
}

// The image of lift takes the same steps as the lift rule, up to the
// administrative redexes of the image.
TEST(Erase, SimulatesLift) {
  Term k = tgt("\\x. x + 1");
  auto direct = evaluate(app(tgt("[lift id]5"), k));
  auto erased = evaluate(app(erase(tgt("[lift id]5")), k));
  EXPECT_EQ(direct.term, nat_const(6));
  EXPECT_EQ(erased.term, nat_const(6));
  EXPECT_EQ(erased.iota, 0u);
}

TEST(Property, EvaluateMatchesIteratedStep) {
  for (const Term& e : target_corpus(150, 31)) {
    auto o = evaluate(e, EvalLimits{300});
    Term cur = e;
    std::uint64_t beta = 0, iota = 0;
    StepResult r{StepResult::Kind::Value, StepKind::Beta, "", e};
    while (beta < 300) {
      r = step(cur);
      if (r.kind != StepResult::Kind::Stepped) break;
      (r.step == StepKind::Beta ? beta : iota)++;
      cur = r.term;
    }
    if (o.kind == Outcome::Kind::FuelExhausted) {
      EXPECT_EQ(beta, 300u);
      continue;
    }
    EXPECT_EQ(o.term, cur) << print(e);
    EXPECT_EQ(o.beta, beta);
    EXPECT_EQ(o.iota, iota);
  }
}

TEST(Property, UniqueDecompositionAndIotaTermination) {
  auto corpus = target_corpus(150, 47);
  EXPECT_GT(corpus.size(), 500u);
  for (const Term& e : corpus) {
    auto ds = all_decompositions(e);
    ASSERT_LE(ds.size(), 1u) << print(e);
    auto r = step(e);
    if (r.kind == StepResult::Kind::Stepped) {
      ASSERT_EQ(ds.size(), 1u);
      EXPECT_EQ(plug(ds[0].first, ds[0].second), e);
    }
    EXPECT_TRUE(iota_closure(e, 100000).has_value());
  }
}

TEST(Property, ErasureRemovesCoercions) {
  for (const Term& e : target_corpus(100, 5)) EXPECT_FALSE(contains_coercion(erase(e)));
}
