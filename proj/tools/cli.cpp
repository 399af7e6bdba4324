#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "coh/coherence.hpp"
#include "coh/effects.hpp"
#include "coh/eval.hpp"
#include "coh/stlc.hpp"
#include "coh/surface.hpp"

namespace coh::cli {

namespace {

// Bad input files are reported like parse errors.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Input {
  std::string file;
  std::string expr;

  void add(CLI::App* cmd) {
    cmd->add_option("file", file, "Input file, or - for stdin");
    cmd->add_option("-e,--expr", expr, "Inline program text instead of a file");
  }

  std::string text() const {
    if (!expr.empty()) return expr;
    if (file.empty()) throw InputError("no input: give a file or --expr");
    return slurp(file);
  }
};

struct Judgment {
  std::string calculus = "stlc";
  std::string type;
  std::string env_file;
  Input input;

  void add(CLI::App* cmd) {
    cmd->add_option("-c,--calculus", calculus, "Source calculus")->check(CLI::IsMember({"stlc", "eff"}));
    cmd->add_option("-t,--type", type, "Goal type")->required();
    cmd->add_option("--env", env_file, "File of `name : type` lines");
    input.add(cmd);
  }

  Calculus calc() const { return calculus == "eff" ? Calculus::Eff : Calculus::Stlc; }
  TypeSyntax syntax() const { return calc() == Calculus::Eff ? TypeSyntax::SourceEff : TypeSyntax::SourceStlc; }
  Fragment fragment() const { return calc() == Calculus::Eff ? Fragment::SourceEff : Fragment::SourceStlc; }

  Env env() const { return env_file.empty() ? Env{} : parse_env(slurp(env_file), syntax()); }
  Type goal() const { return parse_type(type, syntax()); }
  Term term() const { return parse_term(input.text(), fragment()); }
};

Result<TypeDerivation> canonical(Calculus calc, const Env& env, const Term& e, const Type& goal) {
  return calc == Calculus::Eff ? check_e(env, e, goal) : check_s(env, e, goal);
}

void report_error(std::ostream& err, const Diagnostic& d) {
  err << "error: " << d.message;
  if (!d.path.empty()) err << " (at " << d.path << ")";
  err << "\n";
}

int outcome_code(Outcome::Kind k) {
  switch (k) {
    case Outcome::Kind::Converged:
      return kOk;
    case Outcome::Kind::Stuck:
      return kTypeError;
    default:
      return kInconclusive;
  }
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coercion and CPS translations for two subtyping calculi", "coh"};
  app.require_subcommand(1);

  Judgment check_j;
  auto* check = app.add_subcommand("check", "Print the canonical derivation");
  check_j.add(check);

  Judgment derive_j;
  std::size_t derive_budget = 2, derive_max = 6;
  auto* derive = app.add_subcommand("derive", "Enumerate derivations");
  derive_j.add(derive);
  derive->add_option("--budget", derive_budget, "Extra subsumptions per derivation");
  derive->add_option("--max", derive_max, "Derivations to list")->check(CLI::PositiveNumber);

  Judgment translate_j;
  std::string translate_drv;
  auto* translate = app.add_subcommand("translate", "Translate a derivation to the target");
  translate_j.add(translate);
  translate->add_option("--derivation", translate_drv, "Skeleton file; the canonical derivation if absent");

  Input eval_in;
  std::uint64_t eval_fuel = 10000;
  bool eval_trace = false;
  auto* eval = app.add_subcommand("eval", "Evaluate a target term");
  eval_in.add(eval);
  eval->add_option("--fuel", eval_fuel, "Beta-step budget");
  eval->add_flag("--trace", eval_trace, "Print every step");

  Input run_in;
  std::size_t run_fuel = 10000;
  auto* run = app.add_subcommand("run", "Evaluate a source term with shift0/reset0 directly");
  run_in.add(run);
  run->add_option("--fuel", run_fuel, "Step budget");

  Input erase_in;
  auto* erase_cmd = app.add_subcommand("erase", "Replace coercions by lambda terms");
  erase_in.add(erase_cmd);

  Judgment cohere_j;
  CoherenceConfig cohere_cfg;
  std::vector<std::string> cohere_drvs;
  bool cohere_json = false;
  auto* cohere = app.add_subcommand("cohere", "Compare the translations of several derivations");
  cohere_j.add(cohere);
  cohere->add_option("--budget", cohere_cfg.derivations.extra_subsumptions, "Extra subsumptions per derivation");
  cohere->add_option("--max-derivations", cohere_cfg.derivations.max_derivations)->check(CLI::PositiveNumber);
  cohere->add_option("--contexts", cohere_cfg.contexts, "Closing contexts")->check(CLI::PositiveNumber);
  cohere->add_option("--fuel", cohere_cfg.fuel, "Beta-step budget per run")->check(CLI::PositiveNumber);
  cohere->add_option("--seed", cohere_cfg.seed);
  cohere->add_option("--threads", cohere_cfg.threads)->check(CLI::PositiveNumber);
  cohere->add_option("--derivation", cohere_drvs, "Skeleton file to use instead of enumeration; repeatable")
      ->allow_extra_args(false);
  cohere->add_flag("--json", cohere_json, "Print the report as JSON");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream sink;
    app.exit(e, sink, err);
    return kParseError;
  }

  try {
    if (*check) {
      auto d = canonical(check_j.calc(), check_j.env(), check_j.term(), check_j.goal());
      if (!d) {
        report_error(err, d.error());
        return kTypeError;
      }
      out << print(to_skeleton(*d)) << "\n";
      return kOk;
    }
    if (*derive) {
      EnumBudget b;
      b.extra_subsumptions = derive_budget;
      b.max_derivations = derive_max;
      auto ds = enumerate_derivations(derive_j.calc(), derive_j.env(), derive_j.term(), derive_j.goal(), b);
      if (ds.empty()) {
        err << "error: no derivation found within budget\n";
        return kTypeError;
      }
      for (const auto& d : ds) out << print(to_skeleton(d)) << "\n";
      return kOk;
    }
    if (*translate) {
      Calculus calc = translate_j.calc();
      Env env = translate_j.env();
      Term e = translate_j.term();
      Type goal = translate_j.goal();
      auto d = translate_drv.empty() ? canonical(calc, env, e, goal)
                                     : replay_derivation(calc, env, e, goal, parse_skeleton(slurp(translate_drv)));
      if (!d) {
        report_error(err, d.error());
        return kTypeError;
      }
      out << print(translate_term(calc, *d)) << "\n";
      return kOk;
    }
    if (*eval) {
      Term e = parse_term(eval_in.text(), Fragment::Target);
      std::vector<std::string> trace;
      auto o = evaluate(e, EvalLimits{eval_fuel, EvalLimits{}.iota_cap}, eval_trace ? &trace : nullptr);
      for (const auto& line : trace) out << "  " << line << "\n";
      out << outcome_string(o) << "\n";
      return outcome_code(o.kind);
    }
    if (*run) {
      Term e = parse_term(run_in.text(), Fragment::SourceEff);
      auto o = source_eval(e, run_fuel);
      switch (o.kind) {
        case SourceOutcome::Kind::Converged:
          out << print(o.term) << "\n";
          return kOk;
        case SourceOutcome::Kind::Stuck:
          out << "stuck: " << print(o.term) << "\n";
          return kTypeError;
        case SourceOutcome::Kind::FuelExhausted:
          out << "fuel exhausted after " << o.steps << " steps\n";
          return kInconclusive;
      }
    }
    if (*erase_cmd) {
      out << print(erase(parse_term(erase_in.text(), Fragment::Target))) << "\n";
      return kOk;
    }
    if (*cohere) {
      for (const auto& f : cohere_drvs) cohere_cfg.supplied.push_back(parse_skeleton(slurp(f)));
      auto r = coherence_check(cohere_j.calc(), cohere_j.env(), cohere_j.term(), cohere_j.goal(), cohere_cfg);
      if (!r) {
        report_error(err, r.error());
        return kTypeError;
      }
      out << (cohere_json ? report_json(*r) + "\n" : report_text(*r));
      switch (r->summary) {
        case CoherenceReport::Summary::Coherent:
          return kOk;
        case CoherenceReport::Summary::Incoherent:
          return kIncoherent;
        case CoherenceReport::Summary::Inconclusive:
          return kInconclusive;
      }
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }
  return kParseError;
}

}  // namespace coh::cli
