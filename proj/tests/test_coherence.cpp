#include <gtest/gtest.h>

#include <json.hpp>

#include "coh/coherence.hpp"
#include "support.hpp"

using namespace coh;
using namespace coh::test;

namespace {

std::vector<std::string> skeletons(const std::vector<TypeDerivation>& ds) {
  std::vector<std::string> out;
  for (const auto& d : ds) out.push_back(print(to_skeleton(d)));
  return out;
}

bool contains(const std::vector<Term>& ts, const Term& t) { return std::find(ts.begin(), ts.end(), t) != ts.end(); }

}  // namespace

TEST(Replay, Examples) {
  Env g = parse_env(data_file("reset.env"), TypeSyntax::SourceEff);
  EXPECT_TRUE(replay_derivation(Calculus::Eff, g, src_e("y"), ty_e("[nat -> [nat,nat,nat], nat, nat]"),
                                parse_skeleton("(T-Sub (T-Var) (S-Lift (S-Refl)))")));
  EXPECT_TRUE(replay_derivation(Calculus::Stlc, {}, src_s("1"), ty_s("nat"), parse_skeleton("(T-Const)")));
  auto bad = replay_derivation(Calculus::Stlc, {}, src_s("1"), ty_s("top"), parse_skeleton("(T-Const)"));
  ASSERT_FALSE(bad);
  EXPECT_NE(bad.error().message.find("T-Const"), std::string::npos);
}

TEST(Replay, ReportsFailingNode) {
  auto bad = replay_derivation(Calculus::Stlc, {}, src_s("(\\x. x) 1"), ty_s("nat"),
                               parse_skeleton("(T-App (T-Abs (T-Var)) (T-Sub (T-Const) (S-Top)))"));
  ASSERT_FALSE(bad);
  // The argument is checked first and fixes x : top, so the body fails.
  EXPECT_EQ(bad.error().path, "0/0");
}

TEST(Enumerate, LiftedConstant) {
  auto ds = enumerate_derivations(Calculus::Eff, {}, src_e("1"), ty_e("[nat,nat,nat]"), EnumBudget{2, 8, 400});
  ASSERT_GE(ds.size(), 2u);
  auto names = skeletons(ds);
  EXPECT_EQ(names[0], "(T-Sub (T-Const) (S-Lift (S-Refl)))");
  bool trans = std::any_of(names.begin(), names.end(), [](const std::string& s) {
    return s.find("S-Trans") != std::string::npos && s.find("S-Refl") != std::string::npos;
  });
  EXPECT_TRUE(trans);
}

TEST(Enumerate, NoBudgetMeansCanonicalOnly) {
  auto ds = enumerate_derivations(Calculus::Stlc, {}, src_s("1"), ty_s("nat"), EnumBudget{0, 8, 400});
  EXPECT_EQ(skeletons(ds), std::vector<std::string>{"(T-Const)"});
}

TEST(Enumerate, LoopHasBothApplicationRules) {
  auto ds = enumerate_derivations(Calculus::Eff, {}, src_e(data_file("loop.eff")), ty_e("[nat,nat,nat]"),
                                  EnumBudget{2, 8, 400});
  std::vector<Term> translations;
  for (const auto& d : ds) {
    EXPECT_TRUE(validate(Calculus::Eff, d));
    translations.push_back(translate_term(Calculus::Eff, d));
  }
  EXPECT_TRUE(contains(translations, tgt("(fix f x. f x) 1")));
  EXPECT_TRUE(contains(translations, tgt("\\k. [lift id](fix f x. f x) (\\g. [lift id]1 (\\y. g y k))")));
}

TEST(Enumerate, DistinctAndDeterministic) {
  auto a = enumerate_derivations(Calculus::Stlc, {}, src_s("(\\f. f 1) (\\x. x)"), ty_s("top"));
  auto b = enumerate_derivations(Calculus::Stlc, {}, src_s("(\\f. f 1) (\\x. x)"), ty_s("top"));
  EXPECT_EQ(skeletons(a), skeletons(b));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) EXPECT_FALSE(same_shape(to_skeleton(a[i]), to_skeleton(a[j])));
}

TEST(GenContexts, CanonicalContexts) {
  GenConfig cfg;
  EXPECT_TRUE(contains(gen_contexts(Flavor::Stlc, Type::nat(), Type::nat(), cfg), free_var(kHole)));
  Term hole = free_var(kHole), id = tgt("\\x. x");
  EXPECT_TRUE(contains(gen_contexts(Flavor::Effect, ty_t("[nat, nat, nat]"), Type::nat(), cfg), app(hole, id)));
  EXPECT_TRUE(contains(gen_contexts(Flavor::Effect, ty_t("[nat, nat, [nat, nat, nat]]"), Type::nat(), cfg),
                       app(app(hole, id), id)));
}

TEST(GenContexts, EveryContextIsWellTyped) {
  GenConfig cfg;
  cfg.contexts = 8;
  for (auto [flavor, hole] : {std::pair{Flavor::Stlc, "(nat -> unit) -> nat"}, std::pair{Flavor::Stlc, "unit"},
                              std::pair{Flavor::Effect, "nat -> [nat, nat, nat]"},
                              std::pair{Flavor::Effect, "[nat -> nat, [nat, nat, nat], nat]"}}) {
    for (const auto& c : gen_contexts(flavor, ty_t(hole), Type::nat(), cfg)) {
      TargetCheckOptions o;
      o.expected = Type::nat();
      o.allow_impure_env = true;
      EXPECT_TRUE(target_check({{kHole, ty_t(hole)}}, c, flavor, o)) << print(c);
    }
  }
}

TEST(GenTerms, ControlCanBeExcluded) {
  GenConfig g;
  g.calculus = Calculus::Eff;
  g.control = false;
  g.samples = 200;
  for (const auto& s : gen_terms(g)) EXPECT_TRUE(in_fragment(s.term, Fragment::SourceStlc)) << print(s.term);
}

TEST(GenTerms, SameSeedSameCorpus) {
  GenConfig g;
  g.calculus = Calculus::Eff;
  g.samples = 100;
  g.seed = 99;
  auto a = gen_terms(g), b = gen_terms(g);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].term, b[i].term);
    EXPECT_EQ(a[i].goal, b[i].goal);
  }
  g.seed = 100;
  auto c = gen_terms(g);
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i].term == c[i].term;
  EXPECT_LT(same, a.size());
}

TEST(ApproxAt, Examples) {
  EXPECT_EQ(approx_at(1, 10000, tgt("(\\x. x) 1"), tgt("1")), Approx::Holds);
  for (std::uint64_t k : {1, 10, 100, 1000})
    EXPECT_EQ(approx_at(k, 10000, tgt("(fix f x. f x) 1"), tgt("1 2")), Approx::Holds);
  EXPECT_EQ(approx_at(1, 10000, tgt("1"), tgt("(fix f x. f x) 1")), Approx::Unknown);
  EXPECT_EQ(approx_at(1, 10000, tgt("1"), tgt("1 2")), Approx::Fails);
}

TEST(Coherence, LoopDerivations) {
  CoherenceConfig cfg;
  cfg.supplied = {parse_skeleton(data_file("loop_d1.drv")), parse_skeleton(data_file("loop_d2.drv"))};
  auto r = coherence_check(Calculus::Eff, {}, src_e(data_file("loop.eff")), ty_e("[nat,nat,nat]"), cfg);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->derivations.size(), 2u);
  EXPECT_FALSE(r->contexts.empty());
  for (const auto& v : r->verdicts) {
    EXPECT_EQ(v.kind, PairVerdict::Kind::Agree);
    EXPECT_TRUE(v.low_confidence);
  }
  EXPECT_EQ(r->summary, CoherenceReport::Summary::Coherent);
}

TEST(Coherence, SingleDerivationIsTriviallyCoherent) {
  CoherenceConfig cfg;
  cfg.derivations.extra_subsumptions = 0;
  auto r = coherence_check(Calculus::Stlc, {}, src_s("1"), ty_s("nat"), cfg);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->derivations.size(), 1u);
  EXPECT_TRUE(r->verdicts.empty());
  EXPECT_EQ(r->summary, CoherenceReport::Summary::Coherent);
}

TEST(Coherence, FixpointDerivationsAgree) {
  CoherenceConfig cfg;
  cfg.supplied = {parse_skeleton(data_file("fixpoint_d1.drv")), parse_skeleton(data_file("fixpoint_d2.drv"))};
  auto r = coherence_check(Calculus::Stlc, {}, src_s(data_file("fixpoint.stlc")),
                           ty_s("((nat -> top) -> nat -> nat) -> nat -> nat"), cfg);
  ASSERT_TRUE(r);
  ASSERT_FALSE(r->verdicts.empty());
  // The canonical context applies both to the same function and argument.
  for (const auto& v : r->verdicts) {
    if (v.context == 0) {
      EXPECT_EQ(v.kind, PairVerdict::Kind::Agree);
      EXPECT_FALSE(v.low_confidence);
    }
  }
  EXPECT_EQ(r->summary, CoherenceReport::Summary::Coherent);
}

TEST(Coherence, SeedStartsEnumeration) {
  Term e = src_e(data_file("loop.eff"));
  Type goal = ty_e("[nat,nat,nat]");
  auto d2 = replay_derivation(Calculus::Eff, {}, e, goal, parse_skeleton(data_file("loop_d2.drv")));
  ASSERT_TRUE(d2);
  CoherenceConfig cfg;
  cfg.seeds = {*d2};
  auto r = coherence_check(Calculus::Eff, {}, e, goal, cfg);
  ASSERT_TRUE(r);
  ASSERT_FALSE(r->derivations.empty());
  EXPECT_EQ(r->derivations[0], to_skeleton(*d2));
  EXPECT_NE(r->summary, CoherenceReport::Summary::Incoherent);
}

TEST(Coherence, IllTypedSkeletonIsAnError) {
  CoherenceConfig cfg;
  cfg.supplied = {parse_skeleton("(T-Sub (T-Const) (S-Top))")};
  EXPECT_FALSE(coherence_check(Calculus::Stlc, {}, src_s("1"), ty_s("nat"), cfg));
}

TEST(Coherence, ReportsAreReproducible) {
  CoherenceConfig cfg;
  cfg.seed = 12;
  Term e = src_s("(\\f. f 1) (\\x. x)");
  auto a = coherence_check(Calculus::Stlc, {}, e, ty_s("top"), cfg);
  cfg.threads = 4;
  auto b = coherence_check(Calculus::Stlc, {}, e, ty_s("top"), cfg);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(report_json(*a), report_json(*b));
  EXPECT_EQ(report_text(*a), report_text(*b));
}

TEST(Coherence, JsonShape) {
  CoherenceConfig cfg;
  auto r = coherence_check(Calculus::Eff, {}, src_e("1"), ty_e("[nat,nat,nat]"), cfg);
  ASSERT_TRUE(r);
  auto j = nlohmann::json::parse(report_json(*r));
  for (auto key : {"judgment", "derivations", "contexts", "verdicts", "summary", "seed", "fuel"})
    EXPECT_TRUE(j.contains(key)) << key;
  std::size_t n = r->derivations.size();
  EXPECT_EQ(j["verdicts"].size(), n * (n - 1) / 2);
  EXPECT_EQ(j["summary"], "Coherent");
}

TEST(Observe, ConstantsAreCompared) {
  auto a = observe(tgt("(\\x. x + 1) 2"), 100);
  EXPECT_EQ(a.kind, Outcome::Kind::Converged);
  EXPECT_EQ(a.constant, 3u);
  auto b = observe(tgt("(fix f x. f x) 0"), 100);
  EXPECT_EQ(b.kind, Outcome::Kind::FuelExhausted);
}
