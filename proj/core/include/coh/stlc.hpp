#pragma once

// Simply-typed lambda calculus with Top: subtyping, typing and the coercion
// translation into the target calculus with explicit coercions.

#include <optional>

#include "coh/derivation.hpp"
#include "coh/result.hpp"
#include "coh/syntax.hpp"

namespace coh {

struct CheckLimits {
  std::size_t work_limit = 2000000;
};

std::optional<SubDerivation> subtype_s(const Type& sub, const Type& super);

/// Canonical derivation of env |- e : goal. Subsumption appears only where
/// a synthesized type meets the type required by its position.
Result<TypeDerivation> check_s(const Env& env, const Term& e, const Type& goal, CheckLimits limits = {});

/// top becomes unit; everything else is kept.
Type translate_type_s(const Type& t);
Env translate_env_s(const Env& env);
Coercion translate_sub_s(const SubDerivation& d);
Term translate_term_s(const TypeDerivation& d);

}  // namespace coh
