#pragma once

// The two target calculi: typing, deterministic beta/iota reduction and
// coercion erasure. Both flavors share one term type; the flavor decides
// which typing rules apply.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coh/result.hpp"
#include "coh/syntax.hpp"

namespace coh {

enum class Flavor { Stlc, Effect };

struct TargetCheckOptions {
  std::optional<Type> expected;
  // Lets environment entries have effect types, for typing a context by
  // plugging a variable of the hole type.
  bool allow_impure_env = false;
};

/// Type of e in env, or a diagnostic naming the rule that failed. Lambdas
/// and applications carry no annotations, so the type is inferred; parts
/// the term leaves open default to nat.
Result<Type> target_check(const Env& env, const Term& e, Flavor flavor, const TargetCheckOptions& opts = {});

bool coercion_check(const Coercion& c, const Type& from, const Type& to, Flavor flavor);

// ---------------------------------------------------------------------------
// Reduction

enum class StepKind { Beta, Iota };

struct EvalFrame {
  enum class Kind { AppL, AppR, Crc, PrimL, PrimR } kind;
  Term term;  // AppL: argument; AppR: function value; PrimL: right operand; PrimR: left value
  Coercion coercion;  // Crc
  PrimOp op = PrimOp::Add;
};

/// Frames outermost first.
using EvalCtx = std::vector<EvalFrame>;

Term plug(const EvalCtx& ctx, Term t);

struct StepResult {
  enum class Kind { Value, Stepped, Stuck } kind;
  StepKind step = StepKind::Beta;
  // lam, fix, lift, prim (beta); id, comp, top, arrow, cons (iota)
  std::string rule;
  Term term;  // the contractum in place, or the stuck redex
};

StepResult step(const Term& e);

/// Every split of e into an evaluation context and a redex the grammar
/// allows. Reduction is deterministic iff this has at most one entry.
std::vector<std::pair<EvalCtx, Term>> all_decompositions(const Term& e);

struct Outcome {
  enum class Kind { Converged, FuelExhausted, Stuck, InternalLimit } kind;
  Term term;  // the value, or where evaluation stopped
  std::uint64_t beta = 0;
  std::uint64_t iota = 0;
};

struct EvalLimits {
  std::uint64_t beta_fuel = 10000;
  std::uint64_t iota_cap = 1000000;
};

/// Fuel bounds beta steps only. Each step appends `<kind> <rule> <term>` to
/// trace when given.
Outcome evaluate(const Term& e, EvalLimits limits = {}, std::vector<std::string>* trace = nullptr);

/// Runs iota steps until the next step is not one. Returns the step count,
/// or nothing if the cap is hit.
std::optional<std::uint64_t> iota_closure(const Term& e, std::uint64_t cap = 1000000);

/// Replaces every coercion by a lambda term that behaves like it.
Term erase(const Term& e);
Term erase(const Coercion& c);

std::string outcome_string(const Outcome& o);

}  // namespace coh
