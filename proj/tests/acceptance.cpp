// Prints one PASS/FAIL line per acceptance criterion. Exit status is the
// number of failures.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "cli.hpp"
#include "coh/coherence.hpp"
#include "coh/effects.hpp"
#include "coh/stlc.hpp"
#include "support.hpp"

using namespace coh;
using namespace coh::test;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << what << "; ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void criterion(int n, const std::string& name, double limit, const std::function<void(Verdict&)>& body) {
  Verdict v;
  auto t0 = Clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.require(false, std::string("exception: ") + e.what());
  }
  double t = seconds_since(t0);
  v.require(t < limit, "took " + std::to_string(t) + "s");
  if (!v.pass) ++failures;
  std::cout << (v.pass ? "PASS" : "FAIL") << " " << n << " " << name << " (" << std::fixed;
  std::cout.precision(2);
  std::cout << t << "s) " << v.detail.str() << std::endl;
}

std::string run_cli(std::vector<std::string> args, int& code) {
  std::ostringstream out, err;
  code = cli::run_command(args, out, err);
  return out.str();
}

std::vector<Sample> corpus(Calculus calc, std::size_t n, std::uint64_t seed, std::optional<Type> goal = {},
                           std::size_t size = 10) {
  GenConfig g;
  g.term_size = size;
  g.calculus = calc;
  g.samples = n;
  g.seed = seed;
  g.goal = goal;
  return gen_terms(g);
}

}  // namespace

int main() {
  criterion(1, "top-coerced application", 1.0, [](Verdict& v) {
    Term e = src_s(data_file("apply_top.stlc"));
    auto d = replay_derivation(Calculus::Stlc, {}, e, ty_s("top"), parse_skeleton(data_file("apply_top.drv")));
    v.require(d.ok(), "replay failed");
    if (!d) return;
    Term t = translate_term_s(*d);
    v.require(t == tgt("(\\f. f 1) ([top -> id](\\x. x))"), "translation is " + print(t));
    auto o = evaluate(t);
    v.require(o.kind == Outcome::Kind::Converged && o.term == unit_value(), "did not converge to ()");
    v.require(o.beta == 2 && o.iota == 3, "counts " + outcome_string(o));
    v.detail << outcome_string(o);
  });

  criterion(2, "direct semantics of shift0/reset0", 1.0, [](Verdict& v) {
    int c1 = 0, c2 = 0;
    std::string a = run_cli({"run", "--fuel", "1000", data_path("twice.eff")}, c1);
    std::string b = run_cli({"run", "--fuel", "1000", data_path("nested.eff")}, c2);
    v.require(c1 == 0 && a == "121\n", "first program printed " + a);
    v.require(c2 == 0 && b == "10\n", "second program printed " + b);
    v.detail << "121, 10";
  });

  criterion(3, "CPS translation of the reset example", 1.0, [](Verdict& v) {
    Env g = parse_env(data_file("reset.env"), TypeSyntax::SourceEff);
    auto d = replay_derivation(Calculus::Eff, g, src_e(data_file("reset.eff")), ty_e("nat"),
                               parse_skeleton(data_file("reset.drv")));
    v.require(d.ok(), "replay failed");
    if (!d) return;
    Term t = translate_term_e(*d);
    v.require(t == tgt("x ((\\l. [lift id]y (\\f. (\\k. z (k 42)) (\\u. f u l))) (\\v. v))"),
              "translation is " + print(t));
  });

  criterion(4, "two derivations of a diverging loop", 10.0, [](Verdict& v) {
    Term e = src_e(data_file("loop.eff"));
    Type goal = ty_e("[nat, nat, nat]");
    auto d1 = replay_derivation(Calculus::Eff, {}, e, goal, parse_skeleton(data_file("loop_d1.drv")));
    auto d2 = replay_derivation(Calculus::Eff, {}, e, goal, parse_skeleton(data_file("loop_d2.drv")));
    v.require(d1 && d2, "replay failed");
    if (!d1 || !d2) return;
    v.require(translate_term_e(*d1) == tgt("(fix f x. f x) 1"), "D1 translation");
    v.require(translate_term_e(*d2) == tgt("\\k. [lift id](fix f x. f x) (\\g. [lift id]1 (\\y. g y k))"),
              "D2 translation");
    CoherenceConfig cfg;
    cfg.fuel = 10000;
    cfg.supplied = {to_skeleton(*d1), to_skeleton(*d2)};
    auto r = coherence_check(Calculus::Eff, {}, e, goal, cfg);
    v.require(r.ok(), "coherence check failed");
    if (!r) return;
    std::size_t disagree = 0;
    for (const auto& p : r->verdicts) disagree += p.kind == PairVerdict::Kind::Disagree;
    v.require(disagree == 0, std::to_string(disagree) + " disagreements");
    v.detail << r->contexts.size() << " contexts, " << r->verdicts.size() << " verdicts, 0 disagree";
  });

  criterion(5, "translations preserve types", 60.0, [](Verdict& v) {
    for (auto calc : {Calculus::Stlc, Calculus::Eff}) {
      auto samples = corpus(calc, 500, 2024, {}, 25);
      v.require(samples.size() >= 500, "too few samples");
      std::size_t ok = 0;
      for (const auto& s : samples) {
        TargetCheckOptions o;
        o.expected = translate_type(calc, s.goal);
        Env env = calc == Calculus::Stlc ? translate_env_s(s.env) : translate_env_e(s.env);
        bool valid = validate(calc, s.derivation).ok();
        bool typed = target_check(env, translate_term(calc, s.derivation), flavor_of(calc), o).ok();
        if (valid && typed) ++ok;
        else v.require(false, "ill-typed: " + print(s.term));
      }
      v.require(ok == samples.size(), std::to_string(samples.size() - ok) + " failures");
      v.detail << (calc == Calculus::Stlc ? "stlc " : "eff ") << ok << "/" << samples.size() << " ";
    }
  });

  criterion(6, "deterministic reduction, terminating iota", 60.0, [](Verdict& v) {
    std::size_t n = 0;
    for (auto calc : {Calculus::Stlc, Calculus::Eff}) {
      for (const auto& s : corpus(calc, 300, 606)) {
        Type t = translate_type(calc, s.goal);
        GenConfig cg;
        cg.seed = 606;
        cg.contexts = 2;
        for (const Term& c : gen_contexts(flavor_of(calc), t, Type::nat(), cg)) {
          Term cur = plug_hole(c, translate_term(calc, s.derivation));
          for (int i = 0; i < 3; ++i) {
            ++n;
            auto ds = all_decompositions(cur);
            auto r = step(cur);
            bool expect_one = r.kind == StepResult::Kind::Stepped;
            if (ds.size() != (expect_one ? 1u : 0u)) v.require(false, "decompositions of " + print(cur));
            if (!iota_closure(cur, 1000000)) v.require(false, "iota cap hit on " + print(cur));
            if (!expect_one) break;
            cur = r.term;
          }
        }
      }
    }
    v.require(n >= 1000, "only " + std::to_string(n) + " terms");
    v.detail << n << " terms";
  });

  criterion(7, "erasure agrees with coercion semantics", 60.0, [](Verdict& v) {
    std::size_t n = 0, unknown = 0;
    for (auto calc : {Calculus::Stlc, Calculus::Eff}) {
      for (const auto& s : corpus(calc, 200, 707, Type::nat())) {
        Term t = translate_term(calc, s.derivation);
        auto a = observe(t, 10000);
        auto b = observe(erase(t), 10000);
        ++n;
        if (a.kind == Outcome::Kind::FuelExhausted || b.kind == Outcome::Kind::FuelExhausted) {
          ++unknown;
          continue;
        }
        if (a.kind != b.kind || a.constant != b.constant)
          v.require(false, "disagree on " + print(t) + ": " + a.value + " vs " + b.value);
      }
    }
    v.require(n >= 300, "only " + std::to_string(n) + " programs");
    double rate = n ? static_cast<double>(unknown) / static_cast<double>(n) : 1.0;
    v.require(rate < 0.10, "unknown rate " + std::to_string(rate));
    v.detail << n << " programs, " << unknown << " unknown";
  });

  criterion(8, "coherence fuzzing", 300.0, [](Verdict& v) {
    for (auto calc : {Calculus::Stlc, Calculus::Eff}) {
      std::size_t judged = 0, incoherent = 0, inconclusive = 0;
      std::uint64_t seed = 808;
      while (judged < 200 && seed < 808 + 20) {
        for (const auto& s : corpus(calc, 100, seed, {}, 25)) {
          if (judged >= 200) break;
          CoherenceConfig cfg;
          cfg.seed = seed * 1000 + judged;
          cfg.seeds = {s.derivation};
          auto r = coherence_check(calc, s.env, s.term, s.goal, cfg);
          if (!r) {
            v.require(false, "error on " + print(s.term) + ": " + r.error().message);
            continue;
          }
          if (r->derivations.size() < 2) continue;
          ++judged;
          if (r->summary == CoherenceReport::Summary::Inconclusive) ++inconclusive;
          if (r->summary == CoherenceReport::Summary::Incoherent) {
            ++incoherent;
            v.require(false, "incoherent: " + print(s.term) + " : " + print(s.goal) + " seed " +
                                 std::to_string(r->seed) + " (" + r->reason + ")");
          }
        }
        ++seed;
      }
      v.require(judged >= 200, "only " + std::to_string(judged) + " judgments with two derivations");
      v.detail << (calc == Calculus::Stlc ? "stlc " : "eff ") << judged << " judged, " << incoherent
               << " incoherent, " << inconclusive << " inconclusive; ";
    }
  });

  criterion(9, "step-indexed approximation", 60.0, [](Verdict& v) {
    v.require(approx_at(1, 10000, tgt("(\\x. x) 1"), tgt("1")) == Approx::Holds, "identity case");
    for (std::uint64_t k : {1, 10, 100})
      v.require(approx_at(k, 10000, tgt("(fix f x. f x) 1"), tgt("1")) == Approx::Holds, "vacuous case");
    v.require(approx_at(1, 10000, tgt("1"), tgt("(fix f x. f x) 1")) == Approx::Unknown, "diverging right side");

    std::vector<Term> programs;
    for (auto calc : {Calculus::Stlc, Calculus::Eff})
      for (const auto& s : corpus(calc, 100, 909, Type::nat())) programs.push_back(translate_term(calc, s.derivation));
    std::size_t pairs = 0;
    for (std::size_t i = 0; i + 1 < programs.size() && pairs < 100; i += 2, ++pairs) {
      const Term& a = programs[i];
      const Term& b = programs[i + 1];
      Approx prev = Approx::Holds;
      for (std::uint64_t k : {100, 10, 1}) {
        Approx now = approx_at(k, 10000, a, b);
        if (prev == Approx::Holds && now != Approx::Holds)
          v.require(false, "not monotone at k=" + std::to_string(k) + " for " + print(a));
        prev = now;
      }
    }
    v.require(pairs >= 100, "only " + std::to_string(pairs) + " pairs");
    v.detail << pairs << " pairs";
  });

  return failures;
}
