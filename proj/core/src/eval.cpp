#include "coh/eval.hpp"

#include <functional>
#include <sstream>

#include "coh/surface.hpp"

namespace coh {

namespace {

// ---------------------------------------------------------------------------
// Type inference by unification. Lambdas and applications in the effect
// flavor have two rules each; the choice waits until the type of the
// lambda (or of the applied function) is known, and falls back to the pure
// rule when nothing forces it.

class Infer {
 public:
  explicit Infer(Flavor flavor) : flavor_(flavor) {}

  using Id = std::size_t;

  struct Failure {
    std::string message;
  };

  Id fresh() {
    nodes_.push_back({Tag::Var, {}, nodes_.size()});
    return nodes_.size() - 1;
  }

  Id from_type(const Type& t) {
    switch (t.kind()) {
      case TypeKind::Nat:
        return make(Tag::Nat, {});
      case TypeKind::Top:
        throw Failure{"top is not a target type"};
      case TypeKind::Unit:
        if (flavor_ != Flavor::Stlc) throw Failure{"unit is not a type of the effect target"};
        return make(Tag::Unit, {});
      case TypeKind::Arrow:
        return make(Tag::Arrow, {from_type(t.domain()), from_type(t.codomain())});
      case TypeKind::Eff:
        if (flavor_ != Flavor::Effect) throw Failure{"effect types are not types of the stlc target"};
        return make(Tag::Eff, {from_type(t.carrier()), from_type(t.answer()), from_type(t.rest())});
    }
    return fresh();
  }

  Id term(const Env& env, std::vector<Id>& locals, const Term& e) {
    if (const auto* f = e.as<term::Free>()) {
      auto it = env.find(f->name);
      if (it == env.end()) throw Failure{"T-Var: unbound variable " + f->name};
      return from_type(it->second);
    }
    if (const auto* b = e.as<term::Bound>()) {
      if (b->index >= locals.size()) throw Failure{"T-Var: dangling bound variable"};
      return locals[locals.size() - 1 - b->index];
    }
    if (e.is<term::Const>()) return make(Tag::Nat, {});
    if (e.is<term::Unit>()) {
      if (flavor_ != Flavor::Stlc) throw Failure{"T-Top: () is not a term of the effect target"};
      return make(Tag::Unit, {});
    }
    if (const auto* p = e.as<term::Prim>()) {
      unify(term(env, locals, p->lhs), make(Tag::Nat, {}), "T-Prim");
      unify(term(env, locals, p->rhs), make(Tag::Nat, {}), "T-Prim");
      return make(Tag::Nat, {});
    }
    if (const auto* l = e.as<term::Lam>()) {
      Id x = fresh();
      pure_.push_back(x);
      locals.push_back(x);
      Id body = term(env, locals, l->body);
      locals.pop_back();
      Id self = fresh();
      if (flavor_ == Flavor::Stlc) {
        unify(self, make(Tag::Arrow, {x, body}), "T-Abs");
      } else {
        lams_.push_back({self, x, body});
      }
      return self;
    }
    if (const auto* f = e.as<term::Fix>()) {
      Id x = fresh();
      Id res = fresh();
      Id self = make(Tag::Arrow, {x, res});
      pure_.push_back(x);
      locals.push_back(self);
      locals.push_back(x);
      Id body = term(env, locals, f->body);
      locals.pop_back();
      locals.pop_back();
      unify(body, res, "T-Fix");
      return self;
    }
    if (const auto* a = e.as<term::App>()) {
      Id fun = term(env, locals, a->fun);
      Id arg = term(env, locals, a->arg);
      Id res = fresh();
      if (flavor_ == Flavor::Stlc) {
        unify(fun, make(Tag::Arrow, {arg, res}), "T-App");
      } else {
        apps_.push_back({fun, arg, res, is_value(a->arg)});
      }
      return res;
    }
    if (const auto* c = e.as<term::CApp>()) {
      Id from = term(env, locals, c->body);
      Id to = fresh();
      coercion(c->coercion, from, to);
      return to;
    }
    throw Failure{"shift0 and reset0 are not target terms"};
  }

  void coercion(const Coercion& c, Id from, Id to) {
    switch (c.kind()) {
      case CoercionKind::Id:
        unify(from, to, "S-Refl");
        break;
      case CoercionKind::Comp: {
        Id mid = fresh();
        coercion(c.child(1), from, mid);
        coercion(c.child(0), mid, to);
        break;
      }
      case CoercionKind::Top:
        if (flavor_ != Flavor::Stlc) throw Failure{"S-Top: top is not a coercion of the effect target"};
        unify(to, make(Tag::Unit, {}), "S-Top");
        break;
      case CoercionKind::Arrow: {
        Id a1 = fresh(), r1 = fresh(), a2 = fresh(), r2 = fresh();
        unify(from, make(Tag::Arrow, {a1, r1}), "S-Arrow");
        unify(to, make(Tag::Arrow, {a2, r2}), "S-Arrow");
        coercion(c.child(0), a2, a1);
        coercion(c.child(1), r1, r2);
        break;
      }
      case CoercionKind::Lift: {
        if (flavor_ != Flavor::Effect) throw Failure{"S-Lift: lift is not a coercion of the stlc target"};
        Id t1 = fresh(), t2 = fresh();
        pure_.push_back(from);
        unify(to, make(Tag::Eff, {from, t1, t2}), "S-Lift");
        coercion(c.child(0), t1, t2);
        break;
      }
      case CoercionKind::Cons: {
        if (flavor_ != Flavor::Effect) throw Failure{"S-Cons: cons is not a coercion of the stlc target"};
        Id c1 = fresh(), a1 = fresh(), u1 = fresh(), c2 = fresh(), a2 = fresh(), u2 = fresh();
        unify(from, make(Tag::Eff, {c1, a1, u1}), "S-Cons");
        unify(to, make(Tag::Eff, {c2, a2, u2}), "S-Cons");
        coercion(c.child(0), c1, c2);
        coercion(c.child(1), a2, a1);
        coercion(c.child(2), u1, u2);
        break;
      }
    }
  }

  void unify(Id a, Id b, const char* rule) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    Node& na = nodes_[a];
    Node& nb = nodes_[b];
    if (na.tag == Tag::Var) {
      if (occurs(a, b)) throw Failure{std::string(rule) + ": cyclic type"};
      na.parent = b;
      return;
    }
    if (nb.tag == Tag::Var) {
      unify(b, a, rule);
      return;
    }
    if (na.tag != nb.tag) throw Failure{std::string(rule) + ": " + show(a) + " does not match " + show(b)};
    auto ka = na.kids;
    auto kb = nb.kids;
    // Merge before descending so cycles through this pair terminate.
    nodes_[a].parent = b;
    for (std::size_t i = 0; i < ka.size(); ++i) unify(ka[i], kb[i], rule);
  }

  /// Resolves the deferred rule choices. Choices no type forces are tried
  /// pure rule first, backtracking on failure.
  void solve() {
    std::size_t budget = 4096;
    solve_from(budget);
  }

  Type read(Id i) {
    const Node& n = nodes_[find(i)];
    switch (n.tag) {
      case Tag::Var:
      case Tag::Nat:
        return Type::nat();
      case Tag::Unit:
        return Type::unit();
      case Tag::Arrow:
        return Type::arrow(read(n.kids[0]), read(n.kids[1]));
      case Tag::Eff:
        return Type::eff(read(n.kids[0]), read(n.kids[1]), read(n.kids[2]));
    }
    return Type::nat();
  }

 private:
  enum class Tag { Var, Nat, Unit, Arrow, Eff };
  struct Node {
    Tag tag;
    std::vector<Id> kids;
    Id parent;
  };
  struct PendingLam {
    Id self, binder, body;
  };
  struct PendingApp {
    Id fun, arg, res;
    bool arg_is_value;
  };

  Flavor flavor_;
  std::vector<Node> nodes_;
  std::vector<Id> pure_;
  std::vector<PendingLam> lams_;
  std::vector<PendingApp> apps_;

  Id make(Tag tag, std::vector<Id> kids) {
    nodes_.push_back({tag, std::move(kids), nodes_.size()});
    return nodes_.size() - 1;
  }

  Id find(Id i) {
    while (nodes_[i].parent != i) {
      nodes_[i].parent = nodes_[nodes_[i].parent].parent;
      i = nodes_[i].parent;
    }
    return i;
  }

  bool occurs(Id var, Id t) {
    t = find(t);
    if (t == var) return true;
    for (Id k : nodes_[t].kids) {
      if (occurs(var, k)) return true;
    }
    return false;
  }

  std::string show(Id i) {
    const Node& n = nodes_[find(i)];
    switch (n.tag) {
      case Tag::Var:
        return "?";
      case Tag::Nat:
        return "nat";
      case Tag::Unit:
        return "unit";
      case Tag::Arrow:
        return "(" + show(n.kids[0]) + " -> " + show(n.kids[1]) + ")";
      case Tag::Eff:
        return "[" + show(n.kids[0]) + ", " + show(n.kids[1]) + ", " + show(n.kids[2]) + "]";
    }
    return "?";
  }

  struct State {
    std::vector<Node> nodes;
    std::vector<Id> pure;
    std::vector<PendingLam> lams;
    std::vector<PendingApp> apps;
  };

  State save() const { return {nodes_, pure_, lams_, apps_}; }
  void restore(State st) {
    nodes_ = std::move(st.nodes);
    pure_ = std::move(st.pure);
    lams_ = std::move(st.lams);
    apps_ = std::move(st.apps);
  }

  void solve_from(std::size_t& budget) {
    while (settle()) {
    }
    if (lams_.empty() && apps_.empty()) {
      check_purity();
      return;
    }
    if (budget == 0) throw Failure{"typing search gave up"};
    --budget;
    State st = save();
    try {
      if (!lams_.empty()) {
        auto l = lams_.back();
        lams_.pop_back();
        unify(l.self, make(Tag::Arrow, {l.binder, l.body}), "T-Abs");
      } else {
        auto a = apps_.back();
        apps_.pop_back();
        unify(a.fun, make(Tag::Arrow, {a.arg, a.res}), "T-App");
      }
      solve_from(budget);
      return;
    } catch (const Failure& first) {
      restore(std::move(st));
      try {
        if (!lams_.empty()) {
          auto l = lams_.back();
          lams_.pop_back();
          unify(l.self, make(Tag::Eff, {fresh(), fresh(), fresh()}), "T-KAbs");
        } else {
          auto a = apps_.back();
          apps_.pop_back();
          unify(a.fun, make(Tag::Eff, {fresh(), fresh(), fresh()}), "T-KApp");
        }
        solve_from(budget);
      } catch (const Failure& second) {
        if (second.message == "typing search gave up") throw;
        throw first;
      }
    }
  }

  void check_purity() {
    for (Id p : pure_) {
      if (nodes_[find(p)].tag == Tag::Eff) throw Failure{"expected a pure type, found " + show(p)};
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[find(i)];
      if (n.tag == Tag::Arrow && nodes_[find(n.kids[0])].tag == Tag::Eff)
        throw Failure{"argument types must be pure: " + show(i)};
      if (n.tag == Tag::Eff && nodes_[find(n.kids[0])].tag == Tag::Eff)
        throw Failure{"effect carriers must be pure: " + show(i)};
    }
  }

  // One pass over the pending choices whose deciding type is now known.
  bool settle() {
    bool progress = false;
    for (std::size_t i = 0; i < lams_.size();) {
      auto l = lams_[i];
      Tag t = nodes_[find(l.self)].tag;
      Tag bt = nodes_[find(l.binder)].tag;
      if (t == Tag::Arrow || bt == Tag::Nat || bt == Tag::Unit) {
        lams_.erase(lams_.begin() + static_cast<std::ptrdiff_t>(i));
        unify(l.self, make(Tag::Arrow, {l.binder, l.body}), "T-Abs");
        progress = true;
      } else if (t == Tag::Eff) {
        lams_.erase(lams_.begin() + static_cast<std::ptrdiff_t>(i));
        const auto kids = nodes_[find(l.self)].kids;
        unify(l.binder, make(Tag::Arrow, {kids[0], kids[1]}), "T-KAbs");
        unify(l.body, kids[2], "T-KAbs");
        progress = true;
      } else if (t != Tag::Var) {
        throw Failure{"T-Abs: a lambda cannot have type " + show(l.self)};
      } else {
        ++i;
      }
    }
    for (std::size_t i = 0; i < apps_.size();) {
      auto a = apps_[i];
      Tag t = nodes_[find(a.fun)].tag;
      if (t == Tag::Arrow) {
        apps_.erase(apps_.begin() + static_cast<std::ptrdiff_t>(i));
        unify(a.fun, make(Tag::Arrow, {a.arg, a.res}), "T-App");
        progress = true;
      } else if (t == Tag::Eff) {
        apps_.erase(apps_.begin() + static_cast<std::ptrdiff_t>(i));
        if (!a.arg_is_value) throw Failure{"T-KApp: the continuation argument must be a value"};
        const auto kids = nodes_[find(a.fun)].kids;
        unify(a.arg, make(Tag::Arrow, {kids[0], kids[1]}), "T-KApp");
        unify(a.res, kids[2], "T-KApp");
        progress = true;
      } else if (t != Tag::Var) {
        throw Failure{"T-App: cannot apply a term of type " + show(a.fun)};
      } else {
        ++i;
      }
    }
    return progress;
  }
};

bool flavor_type(const Type& t, Flavor flavor) {
  return flavor == Flavor::Stlc ? is_stlc_target_type(t) : is_effect_type(t);
}

}  // namespace

Result<Type> target_check(const Env& env, const Term& e, Flavor flavor, const TargetCheckOptions& opts) {
  if (!in_fragment(e, Fragment::Target)) return make_error(ErrorKind::IllFormed, "not a target term");
  for (const auto& [x, t] : env) {
    if (!flavor_type(t, flavor)) return make_error(ErrorKind::IllFormed, "environment entry " + x + " has a foreign type");
    if (!opts.allow_impure_env && !t.is_pure())
      return make_error(ErrorKind::IllFormed, "environment entry " + x + " is not pure");
  }
  if (opts.expected && !flavor_type(*opts.expected, flavor))
    return make_error(ErrorKind::IllFormed, "expected type " + print(*opts.expected) + " is not a type of this target");
  try {
    Infer inf(flavor);
    std::vector<Infer::Id> locals;
    auto root = inf.term(env, locals, e);
    if (opts.expected) inf.unify(root, inf.from_type(*opts.expected), "expected type");
    inf.solve();
    return inf.read(root);
  } catch (const Infer::Failure& f) {
    return make_error(ErrorKind::IllTyped, f.message);
  }
}

bool coercion_check(const Coercion& c, const Type& from, const Type& to, Flavor flavor) {
  if (!flavor_type(from, flavor) || !flavor_type(to, flavor)) return false;
  try {
    Infer inf(flavor);
    inf.coercion(c, inf.from_type(from), inf.from_type(to));
    inf.solve();
    return true;
  } catch (const Infer::Failure&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Reduction

Term plug(const EvalCtx& ctx, Term t) {
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it) {
    switch (it->kind) {
      case EvalFrame::Kind::AppL:
        t = app(t, it->term);
        break;
      case EvalFrame::Kind::AppR:
        t = app(it->term, t);
        break;
      case EvalFrame::Kind::Crc:
        t = capp(it->coercion, t);
        break;
      case EvalFrame::Kind::PrimL:
        t = prim(it->op, t, it->term);
        break;
      case EvalFrame::Kind::PrimR:
        t = prim(it->op, it->term, t);
        break;
    }
  }
  return t;
}

namespace {

struct Contraction {
  StepKind kind;
  const char* rule;
  Term result;
};

// The contractum of e if e is a redex.
std::optional<Contraction> contract(const Term& e) {
  if (const auto* a = e.as<term::App>()) {
    if (!is_value(a->fun) || !is_value(a->arg)) return std::nullopt;
    const Term& v = a->arg;
    if (const auto* l = a->fun.as<term::Lam>()) return Contraction{StepKind::Beta, "lam", open(l->body, v)};
    if (const auto* f = a->fun.as<term::Fix>()) return Contraction{StepKind::Beta, "fix", open2(f->body, a->fun, v)};
    if (const auto* c = a->fun.as<term::CApp>()) {
      const Coercion& k = c->coercion;
      switch (k.kind()) {
        case CoercionKind::Lift:
          return Contraction{StepKind::Beta, "lift", capp(k.child(0), app(v, c->body))};
        case CoercionKind::Arrow:
          return Contraction{StepKind::Iota, "arrow", capp(k.child(1), app(c->body, capp(k.child(0), v)))};
        case CoercionKind::Cons:
          return Contraction{StepKind::Iota, "cons",
                             capp(k.child(2), app(c->body, capp(Coercion::arrow(k.child(0), k.child(1)), v)))};
        default:
          return std::nullopt;
      }
    }
    return std::nullopt;
  }
  if (const auto* p = e.as<term::Prim>()) {
    const auto* l = p->lhs.as<term::Const>();
    const auto* r = p->rhs.as<term::Const>();
    if (!l || !r) return std::nullopt;
    std::uint64_t n = p->op == PrimOp::Add ? l->value + r->value : l->value * r->value;
    return Contraction{StepKind::Beta, "prim", nat_const(n)};
  }
  if (const auto* c = e.as<term::CApp>()) {
    if (!is_value(c->body) || is_value(e)) return std::nullopt;
    switch (c->coercion.kind()) {
      case CoercionKind::Id:
        return Contraction{StepKind::Iota, "id", c->body};
      case CoercionKind::Comp:
        return Contraction{StepKind::Iota, "comp",
                           capp(c->coercion.child(0), capp(c->coercion.child(1), c->body))};
      case CoercionKind::Top:
        return Contraction{StepKind::Iota, "top", unit_value()};
      default:
        return std::nullopt;
    }
  }
  return std::nullopt;
}

// Leftmost-innermost search following the context grammar; `ctx` receives
// the frames on the way down.
Term focus(const Term& e, EvalCtx& ctx) {
  Term cur = e;
  while (true) {
    if (const auto* a = cur.as<term::App>()) {
      if (!is_value(a->fun)) {
        ctx.push_back({EvalFrame::Kind::AppL, a->arg, {}, PrimOp::Add});
        cur = a->fun;
        continue;
      }
      if (!is_value(a->arg)) {
        ctx.push_back({EvalFrame::Kind::AppR, a->fun, {}, PrimOp::Add});
        cur = a->arg;
        continue;
      }
    } else if (const auto* p = cur.as<term::Prim>()) {
      if (!is_value(p->lhs)) {
        ctx.push_back({EvalFrame::Kind::PrimL, p->rhs, {}, p->op});
        cur = p->lhs;
        continue;
      }
      if (!is_value(p->rhs)) {
        ctx.push_back({EvalFrame::Kind::PrimR, p->lhs, {}, p->op});
        cur = p->rhs;
        continue;
      }
    } else if (const auto* c = cur.as<term::CApp>()) {
      if (!is_value(c->body)) {
        ctx.push_back({EvalFrame::Kind::Crc, {}, c->coercion, PrimOp::Add});
        cur = c->body;
        continue;
      }
    }
    return cur;
  }
}

const char* kind_name(StepKind k) { return k == StepKind::Beta ? "beta" : "iota"; }

}  // namespace

StepResult step(const Term& e) {
  if (is_value(e)) return {StepResult::Kind::Value, StepKind::Beta, "", e};
  EvalCtx ctx;
  Term redex = focus(e, ctx);
  auto c = contract(redex);
  if (!c) return {StepResult::Kind::Stuck, StepKind::Beta, "", redex};
  return {StepResult::Kind::Stepped, c->kind, c->rule, plug(ctx, c->result)};
}

std::vector<std::pair<EvalCtx, Term>> all_decompositions(const Term& e) {
  std::vector<std::pair<EvalCtx, Term>> out;
  std::function<void(const Term&, EvalCtx&)> go = [&](const Term& t, EvalCtx& ctx) {
    if (contract(t)) out.emplace_back(ctx, t);
    if (const auto* a = t.as<term::App>()) {
      ctx.push_back({EvalFrame::Kind::AppL, a->arg, {}, PrimOp::Add});
      go(a->fun, ctx);
      ctx.pop_back();
      if (is_value(a->fun)) {
        ctx.push_back({EvalFrame::Kind::AppR, a->fun, {}, PrimOp::Add});
        go(a->arg, ctx);
        ctx.pop_back();
      }
    } else if (const auto* p = t.as<term::Prim>()) {
      ctx.push_back({EvalFrame::Kind::PrimL, p->rhs, {}, p->op});
      go(p->lhs, ctx);
      ctx.pop_back();
      if (is_value(p->lhs)) {
        ctx.push_back({EvalFrame::Kind::PrimR, p->lhs, {}, p->op});
        go(p->rhs, ctx);
        ctx.pop_back();
      }
    } else if (const auto* c = t.as<term::CApp>()) {
      ctx.push_back({EvalFrame::Kind::Crc, {}, c->coercion, PrimOp::Add});
      go(c->body, ctx);
      ctx.pop_back();
    }
  };
  EvalCtx ctx;
  go(e, ctx);
  return out;
}

namespace {

// Moves a value up through the innermost frames until it meets the next
// redex (or stuck term), descending into any unevaluated operand on the way.
// Returns a value only when the context is used up.
Term refocus_up(Term v, EvalCtx& ctx) {
  while (!ctx.empty()) {
    EvalFrame f = std::move(ctx.back());
    ctx.pop_back();
    Term t;
    switch (f.kind) {
      case EvalFrame::Kind::AppL:
        t = app(std::move(v), f.term);
        break;
      case EvalFrame::Kind::AppR:
        t = app(f.term, std::move(v));
        break;
      case EvalFrame::Kind::Crc:
        t = capp(f.coercion, std::move(v));
        break;
      case EvalFrame::Kind::PrimL:
        t = prim(f.op, std::move(v), f.term);
        break;
      case EvalFrame::Kind::PrimR:
        t = prim(f.op, f.term, std::move(v));
        break;
    }
    if (!is_value(t)) return focus(t, ctx);
    v = std::move(t);
  }
  return v;
}

}  // namespace

// Same strategy as repeated step(), but keeps the context between steps
// so long-running programs stay linear.
Outcome evaluate(const Term& e, EvalLimits limits, std::vector<std::string>* trace) {
  Outcome o{Outcome::Kind::Converged, e, 0, 0};
  if (is_value(e)) return o;
  EvalCtx ctx;
  Term cur = focus(e, ctx);
  while (true) {
    auto c = contract(cur);
    if (!c) {
      o.kind = Outcome::Kind::Stuck;
      o.term = plug(ctx, cur);
      return o;
    }
    if (c->kind == StepKind::Beta) {
      if (o.beta >= limits.beta_fuel) {
        o.kind = Outcome::Kind::FuelExhausted;
        o.term = plug(ctx, cur);
        return o;
      }
      ++o.beta;
    } else {
      if (o.iota >= limits.iota_cap) {
        o.kind = Outcome::Kind::InternalLimit;
        o.term = plug(ctx, cur);
        return o;
      }
      ++o.iota;
    }
    if (trace) trace->push_back(std::string(kind_name(c->kind)) + " " + c->rule + " " + print(plug(ctx, c->result)));
    if (is_value(c->result)) {
      cur = refocus_up(std::move(c->result), ctx);
      if (is_value(cur)) {
        o.term = std::move(cur);
        return o;
      }
    } else {
      cur = focus(c->result, ctx);
    }
  }
}

std::optional<std::uint64_t> iota_closure(const Term& e, std::uint64_t cap) {
  Term cur = e;
  for (std::uint64_t n = 0;; ++n) {
    auto s = step(cur);
    if (s.kind != StepResult::Kind::Stepped || s.step != StepKind::Iota) return n;
    if (n >= cap) return std::nullopt;
    cur = s.term;
  }
}

// ---------------------------------------------------------------------------
// Erasure. Each image is closed, so the named constructors cannot capture.

Term erase(const Coercion& c) {
  const Term a = free_var("a"), f = free_var("f"), k = free_var("k");
  switch (c.kind()) {
    case CoercionKind::Id:
      return lam("a", a);
    case CoercionKind::Top:
      return lam("a", unit_value());
    case CoercionKind::Comp:
      return lam("a", app(erase(c.child(0)), app(erase(c.child(1)), a)));
    case CoercionKind::Arrow:
      return lam("f", lam("a", app(erase(c.child(1)), app(f, app(erase(c.child(0)), a)))));
    case CoercionKind::Lift:
      return lam("a", lam("k", app(erase(c.child(0)), app(k, a))));
    case CoercionKind::Cons:
      return lam("f", lam("k", app(erase(c.child(2)),
                                   app(f, lam("a", app(erase(c.child(1)), app(k, app(erase(c.child(0)), a))))))));
  }
  return lam("a", a);
}

Term erase(const Term& e) {
  return std::visit(
      [&](const auto& n) -> Term {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, term::Lam>) {
          return lam_raw(n.hint, erase(n.body));
        } else if constexpr (std::is_same_v<N, term::Fix>) {
          return fix_raw(n.fun_hint, n.arg_hint, erase(n.body));
        } else if constexpr (std::is_same_v<N, term::Shift0>) {
          return shift0_raw(n.hint, erase(n.body));
        } else if constexpr (std::is_same_v<N, term::App>) {
          return app(erase(n.fun), erase(n.arg));
        } else if constexpr (std::is_same_v<N, term::Prim>) {
          return prim(n.op, erase(n.lhs), erase(n.rhs));
        } else if constexpr (std::is_same_v<N, term::Reset0>) {
          return reset0(erase(n.body));
        } else if constexpr (std::is_same_v<N, term::CApp>) {
          return app(erase(n.coercion), erase(n.body));
        } else {
          return e;
        }
      },
      e.node().v);
}

std::string outcome_string(const Outcome& o) {
  std::ostringstream out;
  switch (o.kind) {
    case Outcome::Kind::Converged:
      out << print(o.term) << " (beta=" << o.beta << ", iota=" << o.iota << ")";
      break;
    case Outcome::Kind::FuelExhausted:
      out << "fuel exhausted after " << o.beta << " beta steps (iota=" << o.iota << ")";
      break;
    case Outcome::Kind::Stuck:
      out << "stuck: " << print(o.term) << " (beta=" << o.beta << ", iota=" << o.iota << ")";
      break;
    case Outcome::Kind::InternalLimit:
      out << "iota safety cap reached after " << o.iota << " steps";
      break;
  }
  return out.str();
}

}  // namespace coh
