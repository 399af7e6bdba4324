#include "coh/derivation.hpp"

#include <array>

#include "coh/surface.hpp"

namespace coh {

namespace {

struct RuleInfo {
  Rule rule;
  std::string_view name;
  std::size_t arity;
};

constexpr std::array<RuleInfo, 16> kRules{{
    {Rule::TVar, "T-Var", 0},
    {Rule::TAbs, "T-Abs", 1},
    {Rule::TApp, "T-App", 2},
    {Rule::TPApp, "T-PApp", 2},
    {Rule::TFix, "T-Fix", 1},
    {Rule::TConst, "T-Const", 0},
    {Rule::TPrim, "T-Prim", 2},
    {Rule::TSub, "T-Sub", 2},
    {Rule::TSft, "T-Sft", 1},
    {Rule::TRst, "T-Rst", 1},
    {Rule::SRefl, "S-Refl", 0},
    {Rule::STrans, "S-Trans", 2},
    {Rule::SArrow, "S-Arrow", 2},
    {Rule::STop, "S-Top", 0},
    {Rule::SCons, "S-Cons", 3},
    {Rule::SLift, "S-Lift", 1},
}};

}  // namespace

std::string_view rule_name(Rule r) { return kRules[static_cast<std::size_t>(r)].name; }

std::optional<Rule> rule_from_name(std::string_view name) {
  for (const auto& info : kRules) {
    if (info.name == name) return info.rule;
  }
  return std::nullopt;
}

std::size_t rule_arity(Rule r) { return kRules[static_cast<std::size_t>(r)].arity; }

bool is_subtyping_rule(Rule r) { return r >= Rule::SRefl; }

bool same_shape(const Skeleton& a, const Skeleton& b) {
  if (a.rule != b.rule || a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same_shape(a.children[i], b.children[i])) return false;
  }
  return true;
}

bool is_source_type(Calculus calc, const Type& t) {
  return calc == Calculus::Stlc ? is_stlc_source_type(t) : is_effect_type(t);
}

std::string binder_name(const std::string& hint, const std::set<std::string>& avoid) {
  return fresh_name(hint.empty() ? "x" : hint, avoid);
}

TypeDerivation make_var(const Env& env, const std::string& x) {
  return TypeDerivation{Rule::TVar, env, free_var(x), env.at(x), {}, std::nullopt, {}};
}

TypeDerivation make_const(const Env& env, std::uint64_t n) {
  return TypeDerivation{Rule::TConst, env, nat_const(n), Type::nat(), {}, std::nullopt, {}};
}

TypeDerivation make_sub(TypeDerivation inner, SubDerivation s) {
  TypeDerivation d;
  d.rule = Rule::TSub;
  d.env = inner.env;
  d.term = inner.term;
  d.type = s.super;
  d.premises.push_back(std::move(inner));
  d.subsumption = std::move(s);
  return d;
}

SubDerivation make_refl(const Type& t) { return SubDerivation{Rule::SRefl, t, t, {}}; }

SubDerivation make_trans(SubDerivation upper, SubDerivation lower) {
  SubDerivation d{Rule::STrans, lower.sub, upper.super, {}};
  d.premises.push_back(std::move(upper));
  d.premises.push_back(std::move(lower));
  return d;
}

std::size_t derivation_size(const TypeDerivation& d) {
  std::size_t n = 1;
  for (const auto& p : d.premises) n += derivation_size(p);
  return n;
}

// ---------------------------------------------------------------------------
// Skeletons

Skeleton to_skeleton(const SubDerivation& d, Annotate mode) {
  Skeleton s;
  s.rule = d.rule;
  for (const auto& p : d.premises) s.children.push_back(to_skeleton(p, mode));
  if (d.rule == Rule::STrans) {
    s.annotation = d.premises[1].super;  // the middle type
  } else if (mode == Annotate::Everywhere) {
    s.annotation = d.super;
  }
  return s;
}

namespace {

// `known` tells whether replay reaches this node with its type already fixed.
Skeleton to_skeleton_at(const TypeDerivation& d, Annotate mode, bool known) {
  Skeleton s;
  s.rule = d.rule;
  auto child = [&](std::size_t i, bool child_known) {
    s.children.push_back(to_skeleton_at(d.premises[i], mode, child_known));
  };
  switch (d.rule) {
    case Rule::TAbs:
    case Rule::TFix:
    case Rule::TSft:
      child(0, true);
      break;
    case Rule::TApp:
    case Rule::TPApp:
      child(0, false);
      child(1, true);
      break;
    case Rule::TPrim:
      child(0, true);
      child(1, true);
      break;
    case Rule::TRst:
      child(0, false);
      break;
    case Rule::TSub:
      child(0, false);
      s.children.push_back(to_skeleton(*d.subsumption, mode));
      break;
    default:
      break;
  }
  bool needs = !known && (d.rule == Rule::TAbs || d.rule == Rule::TFix || d.rule == Rule::TSft ||
                          d.rule == Rule::TSub);
  if (needs || mode == Annotate::Everywhere) s.annotation = d.type;
  return s;
}

}  // namespace

Skeleton to_skeleton(const TypeDerivation& d, Annotate mode) { return to_skeleton_at(d, mode, true); }

// ---------------------------------------------------------------------------
// Replay

namespace {

std::string child_path(const std::string& path, std::size_t i) {
  return path.empty() ? std::to_string(i) : path + "/" + std::to_string(i);
}

Diagnostic mismatch(const std::string& path, Rule r, const std::string& what) {
  return make_error(ErrorKind::InvalidDerivation, std::string(rule_name(r)) + ": " + what, path);
}

std::string judgment(const Type& sub, const Type& super) { return print(sub) + " <: " + print(super); }

// Best-effort reconstruction of one side of a subtyping conclusion from the
// other side and the skeleton.
std::optional<Type> infer_upper(Calculus calc, const Skeleton& sk, const Type& sub);

std::optional<Type> infer_lower(Calculus calc, const Skeleton& sk, const Type& super) {
  switch (sk.rule) {
    case Rule::SRefl:
      return super;
    case Rule::SArrow: {
      if (super.kind() != TypeKind::Arrow) return std::nullopt;
      auto a = infer_upper(calc, sk.children[0], super.domain());
      auto b = infer_lower(calc, sk.children[1], super.codomain());
      if (!a || !b) return std::nullopt;
      return Type::arrow(*a, *b);
    }
    case Rule::SCons: {
      if (super.kind() != TypeKind::Eff) return std::nullopt;
      auto t = infer_lower(calc, sk.children[0], super.carrier());
      auto a = infer_upper(calc, sk.children[1], super.answer());
      auto u = infer_lower(calc, sk.children[2], super.rest());
      if (!t || !a || !u) return std::nullopt;
      return Type::eff(*t, *a, *u);
    }
    case Rule::SLift:
      if (super.kind() != TypeKind::Eff) return std::nullopt;
      return super.carrier();
    case Rule::STrans: {
      auto mid = sk.annotation ? sk.annotation : infer_lower(calc, sk.children[0], super);
      if (!mid) return std::nullopt;
      return infer_lower(calc, sk.children[1], *mid);
    }
    default:
      return std::nullopt;
  }
}

std::optional<Type> infer_upper(Calculus calc, const Skeleton& sk, const Type& sub) {
  switch (sk.rule) {
    case Rule::SRefl:
      return sub;
    case Rule::STop:
      return Type::top();
    case Rule::SArrow: {
      if (sub.kind() != TypeKind::Arrow) return std::nullopt;
      auto a = infer_lower(calc, sk.children[0], sub.domain());
      auto b = infer_upper(calc, sk.children[1], sub.codomain());
      if (!a || !b) return std::nullopt;
      return Type::arrow(*a, *b);
    }
    case Rule::SCons: {
      if (sub.kind() != TypeKind::Eff) return std::nullopt;
      auto t = infer_upper(calc, sk.children[0], sub.carrier());
      auto a = infer_lower(calc, sk.children[1], sub.answer());
      auto u = infer_upper(calc, sk.children[2], sub.rest());
      if (!t || !a || !u) return std::nullopt;
      return Type::eff(*t, *a, *u);
    }
    case Rule::STrans: {
      auto mid = sk.annotation ? sk.annotation : infer_upper(calc, sk.children[1], sub);
      if (!mid) return std::nullopt;
      return infer_upper(calc, sk.children[0], *mid);
    }
    default:
      return std::nullopt;
  }
}

Result<SubDerivation> replay_sub_at(Calculus calc, const Type& sub, const Type& super, const Skeleton& sk,
                                    const std::string& path) {
  if (!is_subtyping_rule(sk.rule)) {
    return make_error(ErrorKind::InvalidDerivation,
                      "expected a subtyping rule, found " + std::string(rule_name(sk.rule)), path);
  }
  if (sk.children.size() != rule_arity(sk.rule)) return mismatch(path, sk.rule, "wrong number of premises");
  if (sk.annotation && sk.rule != Rule::STrans && !(*sk.annotation == super)) {
    return mismatch(path, sk.rule, "annotation " + print(*sk.annotation) + " does not match " + print(super));
  }
  SubDerivation d{sk.rule, sub, super, {}};
  auto sub_premise = [&](std::size_t i, const Type& a, const Type& b) -> std::optional<Diagnostic> {
    auto r = replay_sub_at(calc, a, b, sk.children[i], child_path(path, i));
    if (!r) return r.error();
    d.premises.push_back(std::move(r).value());
    return std::nullopt;
  };
  switch (sk.rule) {
    case Rule::SRefl:
      if (!(sub == super)) return mismatch(path, sk.rule, "cannot conclude " + judgment(sub, super));
      return d;
    case Rule::STop:
      if (calc != Calculus::Stlc) return mismatch(path, sk.rule, "not a rule of the effect calculus");
      if (super.kind() != TypeKind::Top) return mismatch(path, sk.rule, "cannot conclude " + judgment(sub, super));
      return d;
    case Rule::SArrow:
      if (sub.kind() != TypeKind::Arrow || super.kind() != TypeKind::Arrow)
        return mismatch(path, sk.rule, "cannot conclude " + judgment(sub, super));
      if (auto e = sub_premise(0, super.domain(), sub.domain())) return *e;
      if (auto e = sub_premise(1, sub.codomain(), super.codomain())) return *e;
      return d;
    case Rule::SCons:
      if (calc != Calculus::Eff) return mismatch(path, sk.rule, "not a rule of the STLC");
      if (sub.kind() != TypeKind::Eff || super.kind() != TypeKind::Eff)
        return mismatch(path, sk.rule, "cannot conclude " + judgment(sub, super));
      if (auto e = sub_premise(0, sub.carrier(), super.carrier())) return *e;
      if (auto e = sub_premise(1, super.answer(), sub.answer())) return *e;
      if (auto e = sub_premise(2, sub.rest(), super.rest())) return *e;
      return d;
    case Rule::SLift:
      if (calc != Calculus::Eff) return mismatch(path, sk.rule, "not a rule of the STLC");
      if (!sub.is_pure() || super.kind() != TypeKind::Eff || !(super.carrier() == sub))
        return mismatch(path, sk.rule, "cannot conclude " + judgment(sub, super));
      if (auto e = sub_premise(0, super.answer(), super.rest())) return *e;
      return d;
    case Rule::STrans: {
      std::optional<Type> mid = sk.annotation;
      if (!mid) mid = infer_upper(calc, sk.children[1], sub);
      if (!mid) mid = infer_lower(calc, sk.children[0], super);
      if (!mid) {
        return make_error(ErrorKind::Underdetermined, "S-Trans: middle type needs an annotation", path);
      }
      if (!is_source_type(calc, *mid)) return mismatch(path, sk.rule, "ill-formed middle type " + print(*mid));
      if (auto e = sub_premise(0, *mid, super)) return *e;
      if (auto e = sub_premise(1, sub, *mid)) return *e;
      return d;
    }
    default:
      return mismatch(path, sk.rule, "unexpected rule");
  }
}

class Replayer {
 public:
  explicit Replayer(Calculus calc) : calc_(calc) {}

  // Replays a node; `expected` is the conclusion type when already known.
  Result<TypeDerivation> node(const Env& env, const Term& e, std::optional<Type> expected, const Skeleton& sk,
                              const std::string& path) {
    if (is_subtyping_rule(sk.rule)) {
      return make_error(ErrorKind::InvalidDerivation,
                        "expected a typing rule, found " + std::string(rule_name(sk.rule)), path);
    }
    if (sk.children.size() != rule_arity(sk.rule)) return mismatch(path, sk.rule, "wrong number of premises");
    if (sk.annotation) {
      if (!is_source_type(calc_, *sk.annotation))
        return mismatch(path, sk.rule, "ill-formed annotation " + print(*sk.annotation));
      if (expected && !(*expected == *sk.annotation)) {
        return mismatch(path, sk.rule,
                        "annotation " + print(*sk.annotation) + " does not match expected " + print(*expected));
      }
      expected = sk.annotation;
    }
    auto r = dispatch(env, e, expected, sk, path);
    if (r && expected && !(r->type == *expected)) {
      return mismatch(path, sk.rule, "concludes " + print(r->type) + " but " + print(*expected) + " is required");
    }
    return r;
  }

 private:
  Calculus calc_;

  TypeDerivation base(Rule r, const Env& env, const Term& e, const Type& t) {
    return TypeDerivation{r, env, e, t, {}, std::nullopt, {}};
  }

  Diagnostic wrong_term(const std::string& path, Rule r, const Term& e) {
    return mismatch(path, r, "does not apply to " + print(e));
  }

  Diagnostic underdetermined(const std::string& path, Rule r) {
    return make_error(ErrorKind::Underdetermined,
                      std::string(rule_name(r)) + ": type not determined; add an @ annotation", path);
  }

  Result<TypeDerivation> dispatch(const Env& env, const Term& e, const std::optional<Type>& expected,
                                  const Skeleton& sk, const std::string& path) {
    switch (sk.rule) {
      case Rule::TVar: {
        const auto* v = e.as<term::Free>();
        if (!v) return wrong_term(path, sk.rule, e);
        auto it = env.find(v->name);
        if (it == env.end())
          return make_error(ErrorKind::UnboundVariable, "unbound variable " + v->name, path);
        return base(sk.rule, env, e, it->second);
      }
      case Rule::TConst:
        if (!e.is<term::Const>()) return wrong_term(path, sk.rule, e);
        return base(sk.rule, env, e, Type::nat());
      case Rule::TPrim: {
        const auto* p = e.as<term::Prim>();
        if (!p) return wrong_term(path, sk.rule, e);
        auto d = base(sk.rule, env, e, Type::nat());
        auto l = node(env, p->lhs, Type::nat(), sk.children[0], child_path(path, 0));
        if (!l) return l.error();
        auto r = node(env, p->rhs, Type::nat(), sk.children[1], child_path(path, 1));
        if (!r) return r.error();
        d.premises = {std::move(l).value(), std::move(r).value()};
        return d;
      }
      case Rule::TAbs: {
        const auto* l = e.as<term::Lam>();
        if (!l) return wrong_term(path, sk.rule, e);
        if (!expected) return underdetermined(path, sk.rule);
        if (expected->kind() != TypeKind::Arrow) return mismatch(path, sk.rule, "cannot conclude " + print(*expected));
        auto x = binder_name(l->hint, free_names(l->body));
        Env inner = env;
        inner[x] = expected->domain();
        auto b = node(inner, open(l->body, free_var(x)), expected->codomain(), sk.children[0], child_path(path, 0));
        if (!b) return b.error();
        auto d = base(sk.rule, env, e, *expected);
        d.premises.push_back(std::move(b).value());
        d.binders = {x};
        return d;
      }
      case Rule::TFix: {
        const auto* fx = e.as<term::Fix>();
        if (!fx) return wrong_term(path, sk.rule, e);
        if (!expected) return underdetermined(path, sk.rule);
        if (expected->kind() != TypeKind::Arrow) return mismatch(path, sk.rule, "cannot conclude " + print(*expected));
        auto avoid = free_names(fx->body);
        auto f = binder_name(fx->fun_hint, avoid);
        avoid.insert(f);
        auto x = binder_name(fx->arg_hint, avoid);
        Env inner = env;
        inner[f] = *expected;
        inner[x] = expected->domain();
        auto b = node(inner, open2(fx->body, free_var(f), free_var(x)), expected->codomain(), sk.children[0],
                      child_path(path, 0));
        if (!b) return b.error();
        auto d = base(sk.rule, env, e, *expected);
        d.premises.push_back(std::move(b).value());
        d.binders = {f, x};
        return d;
      }
      case Rule::TSft: {
        if (calc_ != Calculus::Eff) return mismatch(path, sk.rule, "not a rule of the STLC");
        const auto* s = e.as<term::Shift0>();
        if (!s) return wrong_term(path, sk.rule, e);
        if (!expected) return underdetermined(path, sk.rule);
        if (expected->kind() != TypeKind::Eff) return mismatch(path, sk.rule, "cannot conclude " + print(*expected));
        auto k = binder_name(s->hint, free_names(s->body));
        Env inner = env;
        inner[k] = Type::arrow(expected->carrier(), expected->answer());
        auto b = node(inner, open(s->body, free_var(k)), expected->rest(), sk.children[0], child_path(path, 0));
        if (!b) return b.error();
        auto d = base(sk.rule, env, e, *expected);
        d.premises.push_back(std::move(b).value());
        d.binders = {k};
        return d;
      }
      case Rule::TRst: {
        if (calc_ != Calculus::Eff) return mismatch(path, sk.rule, "not a rule of the STLC");
        const auto* r = e.as<term::Reset0>();
        if (!r) return wrong_term(path, sk.rule, e);
        auto b = node(env, r->body, std::nullopt, sk.children[0], child_path(path, 0));
        if (!b) return b.error();
        const Type& bt = b->type;
        if (bt.kind() != TypeKind::Eff || !(bt.answer() == bt.carrier())) {
          return mismatch(path, sk.rule, "body has type " + print(bt) + ", expected one of the form [t, t, T]");
        }
        auto d = base(sk.rule, env, e, bt.rest());
        d.premises.push_back(std::move(b).value());
        return d;
      }
      case Rule::TPApp:
      case Rule::TApp:
        return application(env, e, expected, sk, path);
      case Rule::TSub: {
        std::optional<Type> lower;
        auto inner = node(env, e, std::nullopt, sk.children[0], child_path(path, 0));
        if (!inner && inner.error().kind == ErrorKind::Underdetermined && expected) {
          lower = infer_lower(calc_, sk.children[1], *expected);
          if (lower) inner = node(env, e, lower, sk.children[0], child_path(path, 0));
        }
        if (!inner) return inner.error();
        std::optional<Type> upper = expected;
        if (!upper) upper = infer_upper(calc_, sk.children[1], inner->type);
        if (!upper) return underdetermined(path, sk.rule);
        auto s = replay_sub_at(calc_, inner->type, *upper, sk.children[1], child_path(path, 1));
        if (!s) return s.error();
        return make_sub(std::move(inner).value(), std::move(s).value());
      }
      default:
        return mismatch(path, sk.rule, "unexpected rule");
    }
  }

  Result<TypeDerivation> application(const Env& env, const Term& e, const std::optional<Type>& expected,
                                     const Skeleton& sk, const std::string& path) {
    const auto* a = e.as<term::App>();
    if (!a) return wrong_term(path, sk.rule, e);
    bool effectful = sk.rule == Rule::TApp && calc_ == Calculus::Eff;
    if (calc_ == Calculus::Stlc && sk.rule == Rule::TPApp) return mismatch(path, sk.rule, "not a rule of the STLC");
    auto p0 = child_path(path, 0), p1 = child_path(path, 1);

    auto f = node(env, a->fun, std::nullopt, sk.children[0], p0);
    if (!f && f.error().kind == ErrorKind::Underdetermined && expected) {
      // The function's type follows from the argument and the goal.
      auto x = node(env, a->arg, std::nullopt, sk.children[1], p1);
      if (!x) return f.error();
      std::optional<Type> ft;
      if (!effectful) {
        ft = Type::arrow(x->type, *expected);
      } else if (x->type.kind() == TypeKind::Eff && expected->kind() == TypeKind::Eff) {
        // e2 : [t2, U3, U2], goal [t1, U4, U1]  =>  e1 : [t2 -> [t1, U4, U3], U2, U1]
        const Type& xt = x->type;
        ft = Type::eff(Type::arrow(xt.carrier(), Type::eff(expected->carrier(), expected->answer(), xt.answer())),
                       xt.rest(), expected->rest());
      }
      if (!ft) return f.error();
      f = node(env, a->fun, ft, sk.children[0], p0);
      if (!f) return f.error();
      auto d = base(sk.rule, env, e, *expected);
      d.premises = {std::move(f).value(), std::move(x).value()};
      return d;
    }
    if (!f) return f.error();
    const Type& ft = f->type;
    Type arg_type, result;
    if (!effectful) {
      if (ft.kind() != TypeKind::Arrow) return mismatch(path, sk.rule, "function has type " + print(ft));
      arg_type = ft.domain();
      result = ft.codomain();
    } else {
      // e1 : [t2 -> [t1, U4, U3], U2, U1]
      if (ft.kind() != TypeKind::Eff || ft.carrier().kind() != TypeKind::Arrow ||
          ft.carrier().codomain().kind() != TypeKind::Eff) {
        return mismatch(path, sk.rule, "function has type " + print(ft) + ", expected [t2 -> [t1, U4, U3], U2, U1]");
      }
      const Type& fn = ft.carrier();
      const Type& body = fn.codomain();
      arg_type = Type::eff(fn.domain(), body.rest(), ft.answer());
      result = Type::eff(body.carrier(), body.answer(), ft.rest());
    }
    auto x = node(env, a->arg, arg_type, sk.children[1], p1);
    if (!x) return x.error();
    auto d = base(sk.rule, env, e, result);
    d.premises = {std::move(f).value(), std::move(x).value()};
    return d;
  }
};

}  // namespace

Result<SubDerivation> replay_sub(Calculus calc, const Type& sub, const Type& super, const Skeleton& sk) {
  return replay_sub_at(calc, sub, super, sk, "");
}

Result<TypeDerivation> replay(Calculus calc, const Env& env, const Term& e, const Type& goal, const Skeleton& sk) {
  for (const auto& [x, t] : env) {
    if (!is_source_type(calc, t) || !t.is_pure())
      return make_error(ErrorKind::IllFormed, "environment entry " + x + " : " + print(t) + " is not a pure type");
  }
  if (!is_source_type(calc, goal)) return make_error(ErrorKind::IllFormed, "ill-formed type " + print(goal));
  return Replayer(calc).node(env, e, goal, sk, "");
}

namespace {

bool same_derivation(const TypeDerivation& a, const TypeDerivation& b);

bool same_sub(const SubDerivation& a, const SubDerivation& b) {
  if (a.rule != b.rule || !(a.sub == b.sub) || !(a.super == b.super) || a.premises.size() != b.premises.size())
    return false;
  for (std::size_t i = 0; i < a.premises.size(); ++i) {
    if (!same_sub(a.premises[i], b.premises[i])) return false;
  }
  return true;
}

bool same_derivation(const TypeDerivation& a, const TypeDerivation& b) {
  if (a.rule != b.rule || !(a.type == b.type) || !(a.term == b.term) || a.env != b.env ||
      a.premises.size() != b.premises.size() || a.subsumption.has_value() != b.subsumption.has_value())
    return false;
  if (a.subsumption && !same_sub(*a.subsumption, *b.subsumption)) return false;
  for (std::size_t i = 0; i < a.premises.size(); ++i) {
    if (!same_derivation(a.premises[i], b.premises[i])) return false;
  }
  return true;
}

}  // namespace

Result<bool> validate(Calculus calc, const TypeDerivation& d) {
  auto r = replay(calc, d.env, d.term, d.type, to_skeleton(d, Annotate::Everywhere));
  if (!r) return r.error();
  if (!same_derivation(*r, d)) {
    return make_error(ErrorKind::InvalidDerivation, "derivation differs from its replay");
  }
  return true;
}

Result<bool> validate(Calculus calc, const SubDerivation& d) {
  auto r = replay_sub(calc, d.sub, d.super, to_skeleton(d, Annotate::Everywhere));
  if (!r) return r.error();
  if (!same_sub(*r, d)) return make_error(ErrorKind::InvalidDerivation, "derivation differs from its replay");
  return true;
}

}  // namespace coh
