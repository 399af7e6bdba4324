#include "search.hpp"

#include <algorithm>
#include <set>

namespace coh {

std::optional<SubDerivation> canonical_subtype(Calculus calc, const Type& sub, const Type& super) {
  if (sub == super) return make_refl(sub);
  if (calc == Calculus::Stlc) {
    if (super.kind() == TypeKind::Top) return SubDerivation{Rule::STop, sub, super, {}};
  }
  if (sub.kind() == TypeKind::Arrow && super.kind() == TypeKind::Arrow) {
    auto d1 = canonical_subtype(calc, super.domain(), sub.domain());
    if (!d1) return std::nullopt;
    auto d2 = canonical_subtype(calc, sub.codomain(), super.codomain());
    if (!d2) return std::nullopt;
    return SubDerivation{Rule::SArrow, sub, super, {std::move(*d1), std::move(*d2)}};
  }
  if (calc != Calculus::Eff || super.kind() != TypeKind::Eff) return std::nullopt;
  if (sub.kind() == TypeKind::Eff) {
    auto d = canonical_subtype(calc, sub.carrier(), super.carrier());
    if (!d) return std::nullopt;
    auto d1 = canonical_subtype(calc, super.answer(), sub.answer());
    if (!d1) return std::nullopt;
    auto d2 = canonical_subtype(calc, sub.rest(), super.rest());
    if (!d2) return std::nullopt;
    return SubDerivation{Rule::SCons, sub, super, {std::move(*d), std::move(*d1), std::move(*d2)}};
  }
  // Pure below effectful: lift, widening the carrier afterwards if needed.
  auto inner = canonical_subtype(calc, super.answer(), super.rest());
  if (!inner) return std::nullopt;
  if (sub == super.carrier()) return SubDerivation{Rule::SLift, sub, super, {std::move(*inner)}};
  auto carrier = canonical_subtype(calc, sub, super.carrier());
  if (!carrier) return std::nullopt;
  Type middle = Type::eff(sub, super.answer(), super.rest());
  SubDerivation lift{Rule::SLift, sub, middle, {std::move(*inner)}};
  SubDerivation widen{Rule::SCons, middle, super,
                      {std::move(*carrier), make_refl(super.answer()), make_refl(super.rest())}};
  return make_trans(std::move(widen), std::move(lift));
}

namespace detail {

namespace {

TypeDerivation node(Rule r, const Env& env, const Term& e, const Type& t) {
  return TypeDerivation{r, env, e, t, {}, std::nullopt, {}};
}

template <class T>
void push_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

}  // namespace

Search::Search(Calculus calc, const Env& env, const Type& goal, SearchLimits limits)
    : calc_(calc), limits_(limits) {
  std::set<Type> base{Type::nat()};
  if (calc == Calculus::Stlc) base.insert(Type::top());
  collect_subtypes(goal, base);
  for (const auto& [x, t] : env) collect_subtypes(t, base);
  std::set<Type> all = base;
  if (calc == Calculus::Stlc) {
    for (const auto& a : {Type::nat(), Type::top()})
      for (const auto& b : {Type::nat(), Type::top()}) all.insert(Type::arrow(a, b));
  } else {
    all.insert(Type::arrow(Type::nat(), Type::nat()));
    for (const auto& t : base) {
      if (t.is_pure()) all.insert(Type::eff(t, t, t));
    }
  }
  for (const auto& t : all) {
    if (pool_.size() < limits_.pool_cap) pool_.push_back(t);
    if (t.is_pure() && pure_pool_.size() < limits_.pool_cap) pure_pool_.push_back(t);
  }
}

bool Search::tick() {
  if (++work_ > limits_.work_limit) exhausted_ = true;
  return !exhausted_;
}

std::optional<TypeDerivation> Search::coerce(TypeDerivation d, const Type& goal) {
  if (d.type == goal) return d;
  auto s = canonical_subtype(calc_, d.type, goal);
  if (!s) return std::nullopt;
  return make_sub(std::move(d), std::move(*s));
}

std::optional<TypeDerivation> Search::synth(const Env& env, const Term& e) {
  if (!tick()) return std::nullopt;
  if (const auto* v = e.as<term::Free>()) {
    auto it = env.find(v->name);
    if (it == env.end()) return std::nullopt;
    return make_var(env, v->name);
  }
  if (const auto* c = e.as<term::Const>()) return make_const(env, c->value);
  if (const auto* p = e.as<term::Prim>()) {
    auto l = check(env, p->lhs, Type::nat());
    if (!l) return std::nullopt;
    auto r = check(env, p->rhs, Type::nat());
    if (!r) return std::nullopt;
    auto d = node(Rule::TPrim, env, e, Type::nat());
    d.premises = {std::move(*l), std::move(*r)};
    return d;
  }
  if (const auto* a = e.as<term::App>()) {
    auto f = synth(env, a->fun);
    if (!f || f->type.kind() != TypeKind::Arrow) return std::nullopt;
    Type dom = f->type.domain(), cod = f->type.codomain();
    auto x = check(env, a->arg, dom);
    if (!x) return std::nullopt;
    auto d = node(calc_ == Calculus::Stlc ? Rule::TApp : Rule::TPApp, env, e, cod);
    d.premises = {std::move(*f), std::move(*x)};
    return d;
  }
  if (const auto* r = e.as<term::Reset0>(); r && calc_ == Calculus::Eff) {
    auto b = synth(env, r->body);
    if (!b || !b->type.is_pure()) return std::nullopt;
    Type t = b->type;
    auto lifted = coerce(std::move(*b), Type::eff(t, t, t));
    if (!lifted) return std::nullopt;
    auto d = node(Rule::TRst, env, e, t);
    d.premises.push_back(std::move(*lifted));
    return d;
  }
  return std::nullopt;
}

std::optional<TypeDerivation> Search::check(const Env& env, const Term& e, const Type& goal) {
  if (!tick()) return std::nullopt;
  if (e.is<term::Free>() || e.is<term::Const>() || e.is<term::Prim>()) {
    auto s = synth(env, e);
    if (!s) return std::nullopt;
    return coerce(std::move(*s), goal);
  }
  if (e.is<term::App>()) {
    if (auto s = synth(env, e)) {
      if (auto r = coerce(std::move(*s), goal)) return r;
    }
    if (auto r = application(env, e, goal)) return r;
    return lift_fallback(env, e, goal);
  }
  if (e.is<term::Lam>() || e.is<term::Fix>()) {
    if (auto r = abstraction(env, e, goal)) return r;
    if (calc_ == Calculus::Stlc && goal.kind() == TypeKind::Top) {
      for (const auto& s : pool_) {
        if (s.kind() != TypeKind::Arrow) continue;
        if (auto r = abstraction(env, e, s)) return coerce(std::move(*r), goal);
        if (exhausted_) break;
      }
      return std::nullopt;
    }
    return lift_fallback(env, e, goal);
  }
  if (const auto* s = e.as<term::Shift0>()) {
    if (calc_ != Calculus::Eff || goal.kind() != TypeKind::Eff) return std::nullopt;
    auto k = binder_name(s->hint, free_names(s->body));
    Env inner = env;
    inner[k] = Type::arrow(goal.carrier(), goal.answer());
    auto b = check(inner, open(s->body, free_var(k)), goal.rest());
    if (!b) return std::nullopt;
    auto d = node(Rule::TSft, env, e, goal);
    d.premises.push_back(std::move(*b));
    d.binders = {k};
    return d;
  }
  if (e.is<term::Reset0>()) {
    if (calc_ != Calculus::Eff) return std::nullopt;
    if (auto r = reset(env, e, goal)) return r;
    return lift_fallback(env, e, goal);
  }
  return std::nullopt;
}

std::optional<TypeDerivation> Search::lift_fallback(const Env& env, const Term& e, const Type& goal) {
  if (calc_ != Calculus::Eff || goal.kind() != TypeKind::Eff || exhausted_) return std::nullopt;
  auto inner = canonical_subtype(calc_, goal.answer(), goal.rest());
  if (!inner) return std::nullopt;
  auto d = check(env, e, goal.carrier());
  if (!d) return std::nullopt;
  Type carrier = d->type;
  return make_sub(std::move(*d), SubDerivation{Rule::SLift, carrier, goal, {std::move(*inner)}});
}

std::optional<TypeDerivation> Search::abstraction(const Env& env, const Term& e, const Type& goal) {
  if (goal.kind() != TypeKind::Arrow) return std::nullopt;
  if (const auto* l = e.as<term::Lam>()) {
    auto x = binder_name(l->hint, free_names(l->body));
    Env inner = env;
    inner[x] = goal.domain();
    auto b = check(inner, open(l->body, free_var(x)), goal.codomain());
    if (!b) return std::nullopt;
    auto d = node(Rule::TAbs, env, e, goal);
    d.premises.push_back(std::move(*b));
    d.binders = {x};
    return d;
  }
  const auto* fx = e.as<term::Fix>();
  auto avoid = free_names(fx->body);
  auto f = binder_name(fx->fun_hint, avoid);
  avoid.insert(f);
  auto x = binder_name(fx->arg_hint, avoid);
  Env inner = env;
  inner[f] = goal;
  inner[x] = goal.domain();
  auto b = check(inner, open2(fx->body, free_var(f), free_var(x)), goal.codomain());
  if (!b) return std::nullopt;
  auto d = node(Rule::TFix, env, e, goal);
  d.premises.push_back(std::move(*b));
  d.binders = {f, x};
  return d;
}

std::optional<TypeDerivation> Search::application(const Env& env, const Term& e, const Type& goal) {
  const auto* a = e.as<term::App>();
  std::vector<Type> candidates;
  std::optional<Type> fun_domain;
  if (auto f = synth(env, a->fun); f && f->type.kind() == TypeKind::Arrow) fun_domain = f->type.domain();
  if (auto x = synth(env, a->arg); x && x->type.is_pure()) candidates.push_back(x->type);
  if (fun_domain) push_unique(candidates, *fun_domain);
  for (const auto& t : pure_pool_) push_unique(candidates, t);

  for (const auto& t2 : candidates) {
    if (exhausted_) return std::nullopt;
    // A function of known type A -> B only accepts arguments at subtypes of A.
    if (fun_domain && !canonical_subtype(calc_, t2, *fun_domain)) continue;
    auto d1 = check(env, a->fun, Type::arrow(t2, goal));
    if (!d1) continue;
    auto d2 = check(env, a->arg, t2);
    if (!d2) continue;
    auto d = node(calc_ == Calculus::Stlc ? Rule::TApp : Rule::TPApp, env, e, goal);
    d.premises = {std::move(*d1), std::move(*d2)};
    return d;
  }
  if (calc_ == Calculus::Eff && goal.kind() == TypeKind::Eff) return effectful_application(env, e, goal);
  return std::nullopt;
}

std::optional<TypeDerivation> Search::effectful_application(const Env& env, const Term& e, const Type& goal) {
  // e1 : [t2 -> [t1, U4, U3], U2, U1]   e2 : [t2, U3, U2]   e1 e2 : [t1, U4, U1]
  const auto* a = e.as<term::App>();
  const Type& t1 = goal.carrier();
  const Type& u4 = goal.answer();
  const Type& u1 = goal.rest();
  std::vector<Type> t2s, u3s, u2s;
  auto f = synth(env, a->fun);
  auto x = synth(env, a->arg);
  if (x) push_unique(t2s, x->type.is_pure() ? x->type : x->type.carrier());
  if (f && f->type.kind() == TypeKind::Arrow) {
    push_unique(t2s, f->type.domain());
    if (f->type.codomain().kind() == TypeKind::Eff) push_unique(u3s, f->type.codomain().rest());
  }
  for (const auto& t : pure_pool_) push_unique(t2s, t);
  if (x && !x->type.is_pure()) {
    push_unique(u3s, x->type.answer());
    push_unique(u2s, x->type.rest());
  }
  push_unique(u3s, u1);
  push_unique(u3s, u4);
  push_unique(u2s, u1);
  for (const auto& t : pool_) {
    push_unique(u3s, t);
    push_unique(u2s, t);
  }
  for (const auto& t2 : t2s) {
    for (const auto& u3 : u3s) {
      Type fn = Type::arrow(t2, Type::eff(t1, u4, u3));
      for (const auto& u2 : u2s) {
        if (exhausted_) return std::nullopt;
        auto d2 = check(env, a->arg, Type::eff(t2, u3, u2));
        if (!d2) continue;
        auto d1 = check(env, a->fun, Type::eff(fn, u2, u1));
        if (!d1) continue;
        auto d = node(Rule::TApp, env, e, goal);
        d.premises = {std::move(*d1), std::move(*d2)};
        return d;
      }
    }
  }
  return std::nullopt;
}

std::optional<TypeDerivation> Search::reset(const Env& env, const Term& e, const Type& goal) {
  const auto* r = e.as<term::Reset0>();
  std::vector<Type> candidates;
  if (auto b = synth(env, r->body); b && b->type.is_pure()) candidates.push_back(b->type);
  for (const auto& t : pure_pool_) push_unique(candidates, t);
  for (const auto& t : candidates) {
    if (exhausted_) return std::nullopt;
    auto b = check(env, r->body, Type::eff(t, t, goal));
    if (!b) continue;
    auto d = node(Rule::TRst, env, e, goal);
    d.premises.push_back(std::move(*b));
    return d;
  }
  return std::nullopt;
}

}  // namespace detail
}  // namespace coh
