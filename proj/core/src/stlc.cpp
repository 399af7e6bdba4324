#include "coh/stlc.hpp"

#include "coh/surface.hpp"
#include "search.hpp"

namespace coh {

std::optional<SubDerivation> subtype_s(const Type& sub, const Type& super) {
  if (!is_stlc_source_type(sub) || !is_stlc_source_type(super)) return std::nullopt;
  return canonical_subtype(Calculus::Stlc, sub, super);
}

namespace detail {

Result<TypeDerivation> run_check(Calculus calc, const Env& env, const Term& e, const Type& goal,
                                 CheckLimits limits) {
  auto fragment = calc == Calculus::Stlc ? Fragment::SourceStlc : Fragment::SourceEff;
  if (!in_fragment(e, fragment)) return make_error(ErrorKind::IllFormed, "term is outside the source language");
  for (const auto& x : free_names(e)) {
    if (!env.contains(x)) return make_error(ErrorKind::UnboundVariable, "unbound variable " + x);
  }
  for (const auto& [x, t] : env) {
    if (!is_source_type(calc, t) || !t.is_pure())
      return make_error(ErrorKind::IllFormed, "environment entry " + x + " : " + print(t) + " is not a pure type");
  }
  if (!is_source_type(calc, goal)) return make_error(ErrorKind::IllFormed, "ill-formed type " + print(goal));
  Search search(calc, env, goal, SearchLimits{limits.work_limit});
  auto d = search.check(env, e, goal);
  if (d) return std::move(*d);
  if (search.exhausted()) {
    return make_error(ErrorKind::BudgetExhausted, "search budget exhausted before a derivation of " + print(e) +
                                                      " : " + print(goal) + " was found");
  }
  return make_error(ErrorKind::NoDerivation, "no derivation of " + print(e) + " : " + print(goal));
}

}  // namespace detail

Result<TypeDerivation> check_s(const Env& env, const Term& e, const Type& goal, CheckLimits limits) {
  return detail::run_check(Calculus::Stlc, env, e, goal, limits);
}

Type translate_type_s(const Type& t) {
  switch (t.kind()) {
    case TypeKind::Top:
      return Type::unit();
    case TypeKind::Arrow:
      return Type::arrow(translate_type_s(t.domain()), translate_type_s(t.codomain()));
    default:
      return t;
  }
}

Env translate_env_s(const Env& env) {
  Env out;
  for (const auto& [x, t] : env) out[x] = translate_type_s(t);
  return out;
}

Coercion translate_sub_s(const SubDerivation& d) {
  switch (d.rule) {
    case Rule::STop:
      return Coercion::top();
    case Rule::STrans:
      return Coercion::comp(translate_sub_s(d.premises[0]), translate_sub_s(d.premises[1]));
    case Rule::SArrow:
      return Coercion::arrow(translate_sub_s(d.premises[0]), translate_sub_s(d.premises[1]));
    default:
      return Coercion::id();
  }
}

Term translate_term_s(const TypeDerivation& d) {
  switch (d.rule) {
    case Rule::TAbs:
      return lam(d.binders[0], translate_term_s(d.premises[0]));
    case Rule::TFix:
      return fix(d.binders[0], d.binders[1], translate_term_s(d.premises[0]));
    case Rule::TApp:
      return app(translate_term_s(d.premises[0]), translate_term_s(d.premises[1]));
    case Rule::TPrim:
      return prim(d.term.as<term::Prim>()->op, translate_term_s(d.premises[0]), translate_term_s(d.premises[1]));
    case Rule::TSub:
      return capp(translate_sub_s(*d.subsumption), translate_term_s(d.premises[0]));
    default:  // T-Var, T-Const
      return d.term;
  }
}

}  // namespace coh
