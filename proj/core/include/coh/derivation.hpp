#pragma once

// Typing and subtyping derivations for both source calculi, their skeleton
// form (rule names only, with optional type annotations) and replay of a
// skeleton against a judgment.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coh/result.hpp"
#include "coh/syntax.hpp"

namespace coh {

enum class Calculus { Stlc, Eff };

enum class Rule : std::uint8_t {
  TVar,
  TAbs,
  TApp,
  TPApp,
  TFix,
  TConst,
  TPrim,  // n1 + n2 and n1 * n2 at nat; not part of the original rule set
  TSub,
  TSft,
  TRst,
  SRefl,
  STrans,
  SArrow,
  STop,
  SCons,
  SLift,
};

std::string_view rule_name(Rule r);
std::optional<Rule> rule_from_name(std::string_view name);
std::size_t rule_arity(Rule r);
bool is_subtyping_rule(Rule r);

struct Skeleton {
  Rule rule = Rule::TConst;
  std::vector<Skeleton> children;
  std::optional<Type> annotation;

  /// Rule-tree equality; annotations are ignored.
  friend bool same_shape(const Skeleton& a, const Skeleton& b);
  friend bool operator==(const Skeleton& a, const Skeleton& b) = default;
};

struct SubDerivation {
  Rule rule = Rule::SRefl;
  Type sub;
  Type super;
  std::vector<SubDerivation> premises;
};

struct TypeDerivation {
  Rule rule = Rule::TConst;
  Env env;
  Term term;
  Type type;
  std::vector<TypeDerivation> premises;
  // Set on T-Sub nodes only.
  std::optional<SubDerivation> subsumption;
  // Names the binders were opened with: [x] for T-Abs, [f, x] for T-Fix, [k] for T-Sft.
  std::vector<std::string> binders;
};

enum class Annotate {
  // Only where replay cannot recover the type from the judgment or the children.
  Needed,
  Everywhere,
};

Skeleton to_skeleton(const SubDerivation& d, Annotate mode = Annotate::Needed);
Skeleton to_skeleton(const TypeDerivation& d, Annotate mode = Annotate::Needed);

/// Rebuilds and validates a derivation of env |- e : goal rule by rule.
/// Errors carry the path to the first failing node.
Result<TypeDerivation> replay(Calculus calc, const Env& env, const Term& e, const Type& goal,
                              const Skeleton& sk);
Result<SubDerivation> replay_sub(Calculus calc, const Type& sub, const Type& super, const Skeleton& sk);

/// Re-checks every node of an existing derivation.
Result<bool> validate(Calculus calc, const TypeDerivation& d);
Result<bool> validate(Calculus calc, const SubDerivation& d);

bool is_source_type(Calculus calc, const Type& t);

/// The structural subtyping derivation of sub <: super, if one exists.
/// Never uses S-Trans except for a pure type below an effect type with a
/// different carrier, where lifting and then widening is the only route.
std::optional<SubDerivation> canonical_subtype(Calculus calc, const Type& sub, const Type& super);

/// Opens a binder body with a name that does not clash with the body's free names.
std::string binder_name(const std::string& hint, const std::set<std::string>& avoid);

// Node constructors used by the search, the generator and the mutators.
TypeDerivation make_var(const Env& env, const std::string& x);
TypeDerivation make_const(const Env& env, std::uint64_t n);
TypeDerivation make_sub(TypeDerivation inner, SubDerivation s);
SubDerivation make_refl(const Type& t);
SubDerivation make_trans(SubDerivation upper, SubDerivation lower);

std::size_t derivation_size(const TypeDerivation& d);

}  // namespace coh
