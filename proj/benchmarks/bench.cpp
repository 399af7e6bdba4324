#include <benchmark/benchmark.h>

#include "coh/coherence.hpp"
#include "coh/effects.hpp"
#include "coh/eval.hpp"
#include "coh/stlc.hpp"
#include "coh/surface.hpp"

using namespace coh;

namespace {

// n nested coercions around a function, applied once.
Term coerced_chain(int n) {
  Term f = parse_term("\\x. x", Fragment::Target);
  for (int i = 0; i < n; ++i) f = capp(Coercion::arrow(Coercion::id(), Coercion::id()), f);
  return app(f, nat_const(1));
}

// Counts down from n with a recursive function.
Term countdown(int n) {
  return parse_term("(fix f x. f x) " + std::to_string(n), Fragment::Target);
}

}  // namespace

static void BM_EvaluateCoercionChain(benchmark::State& state) {
  Term e = coerced_chain(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(e));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvaluateCoercionChain)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

static void BM_EvaluateUntilFuelRunsOut(benchmark::State& state) {
  Term e = countdown(1);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(e, EvalLimits{static_cast<std::uint64_t>(state.range(0))}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvaluateUntilFuelRunsOut)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

static void BM_SourceEval(benchmark::State& state) {
  Term e = parse_term("1 + <10 + (S0 k. 100 + k (k 0))>", Fragment::SourceEff);
  for (auto _ : state) benchmark::DoNotOptimize(source_eval(e, 1000));
}
BENCHMARK(BM_SourceEval);

static void BM_CheckAndTranslate(benchmark::State& state) {
  Calculus calc = state.range(0) ? Calculus::Eff : Calculus::Stlc;
  GenConfig g;
  g.calculus = calc;
  g.samples = 100;
  auto samples = gen_terms(g);
  for (auto _ : state) {
    for (const auto& s : samples) {
      auto d = calc == Calculus::Eff ? check_e(s.env, s.term, s.goal) : check_s(s.env, s.term, s.goal);
      if (d) benchmark::DoNotOptimize(translate_term(calc, *d));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples.size()));
}
BENCHMARK(BM_CheckAndTranslate)->Arg(0)->Arg(1);

static void BM_TargetCheck(benchmark::State& state) {
  GenConfig g;
  g.calculus = Calculus::Eff;
  g.samples = 100;
  std::vector<Term> ts;
  for (const auto& s : gen_terms(g)) ts.push_back(translate_term(Calculus::Eff, s.derivation));
  for (auto _ : state)
    for (const auto& t : ts) benchmark::DoNotOptimize(target_check({}, t, Flavor::Effect));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ts.size()));
}
BENCHMARK(BM_TargetCheck);

static void BM_GenTerms(benchmark::State& state) {
  GenConfig g;
  g.calculus = state.range(0) ? Calculus::Eff : Calculus::Stlc;
  g.samples = 100;
  for (auto _ : state) benchmark::DoNotOptimize(gen_terms(g));
}
BENCHMARK(BM_GenTerms)->Arg(0)->Arg(1);

static void BM_CoherenceCheck(benchmark::State& state) {
  Term e = parse_term("(fix f x. f x) 1", Fragment::SourceEff);
  Type t = parse_type("[nat, nat, nat]", TypeSyntax::SourceEff);
  CoherenceConfig cfg;
  cfg.fuel = 1000;
  cfg.threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(coherence_check(Calculus::Eff, {}, e, t, cfg));
}
BENCHMARK(BM_CoherenceCheck)->Arg(1)->Arg(4)->UseRealTime();
BENCHMARK_MAIN();
