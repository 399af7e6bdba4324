#pragma once

// Bounded bidirectional search for typing derivations, shared by both
// calculi. Terms are Curry-style, so wherever a rule needs a type the
// syntax does not provide, candidates come from a finite pool built from
// the goal and the environment.

#include <optional>
#include <vector>

#include "coh/derivation.hpp"
#include "coh/stlc.hpp"

namespace coh::detail {

struct SearchLimits {
  std::size_t work_limit = 200000;
  std::size_t pool_cap = 24;
};

class Search {
 public:
  Search(Calculus calc, const Env& env, const Type& goal, SearchLimits limits = {});

  std::optional<TypeDerivation> check(const Env& env, const Term& e, const Type& goal);
  /// For terms whose type is fixed by their syntax and the environment.
  std::optional<TypeDerivation> synth(const Env& env, const Term& e);

  bool exhausted() const { return exhausted_; }
  const std::vector<Type>& pure_pool() const { return pure_pool_; }
  const std::vector<Type>& pool() const { return pool_; }

 private:
  Calculus calc_;
  SearchLimits limits_;
  std::size_t work_ = 0;
  bool exhausted_ = false;
  std::vector<Type> pool_;       // every candidate
  std::vector<Type> pure_pool_;  // candidates allowed where a pure type is required

  bool tick();
  std::optional<TypeDerivation> coerce(TypeDerivation d, const Type& goal);
  std::optional<TypeDerivation> lift_fallback(const Env& env, const Term& e, const Type& goal);
  std::optional<TypeDerivation> abstraction(const Env& env, const Term& e, const Type& goal);
  std::optional<TypeDerivation> application(const Env& env, const Term& e, const Type& goal);
  std::optional<TypeDerivation> effectful_application(const Env& env, const Term& e, const Type& goal);
  std::optional<TypeDerivation> reset(const Env& env, const Term& e, const Type& goal);
};

Result<TypeDerivation> run_check(Calculus calc, const Env& env, const Term& e, const Type& goal,
                                 CheckLimits limits);

}  // namespace coh::detail
