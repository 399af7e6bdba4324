#pragma once

// The calculus of shift0/reset0 with effect subtyping: subtyping, typing,
// the selective CPS translation, and a direct-style evaluator.

#include <optional>
#include <vector>

#include "coh/derivation.hpp"
#include "coh/result.hpp"
#include "coh/stlc.hpp"
#include "coh/syntax.hpp"

namespace coh {

std::optional<SubDerivation> subtype_e(const Type& sub, const Type& super);

Result<TypeDerivation> check_e(const Env& env, const Term& e, const Type& goal, CheckLimits limits = {});

/// Source effect types and target types share one representation, so this
/// only validates its input.
Type translate_type_e(const Type& t);
Env translate_env_e(const Env& env);
Coercion translate_sub_e(const SubDerivation& d);
Term translate_term_e(const TypeDerivation& d);

// ---------------------------------------------------------------------------
// Direct-style reduction of source terms

struct Frame {
  enum class Kind { AppL, AppR, PrimL, PrimR } kind;
  PrimOp op = PrimOp::Add;
  Term term;  // AppL: pending argument; AppR: function value; PrimL: right operand; PrimR: left value
};

/// Frames of one delimited context, outermost first.
using PureContext = std::vector<Frame>;

/// Stack of pure contexts. The first entry is the undelimited top level;
/// each later entry sits inside one reset0.
using MetaContext = std::vector<PureContext>;

struct Decomposition {
  MetaContext meta;
  // A redex, or the whole program when it is already a value.
  Term focus;
};

Decomposition decompose(const Term& e);
Term recompose(const MetaContext& meta, const Term& focus);

struct SourceOutcome {
  enum class Kind { Converged, FuelExhausted, Stuck } kind;
  Term term;  // the value, or the program when evaluation stopped
  std::size_t steps = 0;
};

SourceOutcome source_eval(const Term& e, std::size_t fuel);

}  // namespace coh
