#include "coh/effects.hpp"

#include <array>
#include <cassert>
#include <stdexcept>

#include "coh/surface.hpp"
#include "search.hpp"

namespace coh {

std::optional<SubDerivation> subtype_e(const Type& sub, const Type& super) {
  if (!is_effect_type(sub) || !is_effect_type(super)) return std::nullopt;
  return canonical_subtype(Calculus::Eff, sub, super);
}

Result<TypeDerivation> check_e(const Env& env, const Term& e, const Type& goal, CheckLimits limits) {
  return detail::run_check(Calculus::Eff, env, e, goal, limits);
}

Type translate_type_e(const Type& t) {
  if (!is_effect_type(t)) throw std::invalid_argument("not a type of the effect calculus: " + print(t));
  return t;
}

Env translate_env_e(const Env& env) {
  for (const auto& [x, t] : env) translate_type_e(t);
  return env;
}

Coercion translate_sub_e(const SubDerivation& d) {
  switch (d.rule) {
    case Rule::STrans:
      return Coercion::comp(translate_sub_e(d.premises[0]), translate_sub_e(d.premises[1]));
    case Rule::SArrow:
      return Coercion::arrow(translate_sub_e(d.premises[0]), translate_sub_e(d.premises[1]));
    case Rule::SLift:
      return Coercion::lift(translate_sub_e(d.premises[0]));
    case Rule::SCons:
      return Coercion::cons(translate_sub_e(d.premises[0]), translate_sub_e(d.premises[1]),
                            translate_sub_e(d.premises[2]));
    default:
      return Coercion::id();
  }
}

namespace {

// Chooses display names for the binders the translation introduces. Names
// already used in the source program or its environment are skipped, and so
// is every name handed out before.
class NameSupply {
 public:
  explicit NameSupply(std::set<std::string> taken) : taken_(std::move(taken)) {}

  std::string next(const std::vector<std::string>& preferred) {
    for (const auto& n : preferred) {
      if (taken_.insert(n).second) return n;
    }
    for (std::size_t i = 1;; ++i) {
      auto n = preferred.front() + std::to_string(i);
      if (taken_.insert(n).second) return n;
    }
  }

 private:
  std::set<std::string> taken_;
};

const std::vector<std::string> kContNames{"k", "l", "m", "n", "o", "p", "q"};
const std::vector<std::string> kFunNames{"f", "g", "h"};
const std::vector<std::string> kArgNames{"x", "y", "z", "u", "v", "w"};

void collect_binders(const TypeDerivation& d, std::set<std::string>& out) {
  out.insert(d.binders.begin(), d.binders.end());
  for (const auto& p : d.premises) collect_binders(p, out);
}

class CpsTranslator {
 public:
  explicit CpsTranslator(const TypeDerivation& root) : names_(initial(root)) {}

  Term run(const TypeDerivation& d) {
    switch (d.rule) {
      case Rule::TAbs:
      case Rule::TSft:
        return lam(d.binders[0], run(d.premises[0]));
      case Rule::TFix:
        return fix(d.binders[0], d.binders[1], run(d.premises[0]));
      case Rule::TPApp:
        return app(run(d.premises[0]), run(d.premises[1]));
      case Rule::TPrim:
        return prim(d.term.as<term::Prim>()->op, run(d.premises[0]), run(d.premises[1]));
      case Rule::TSub:
        return capp(translate_sub_e(*d.subsumption), run(d.premises[0]));
      case Rule::TApp: {
        // \k. e1 (\f. e2 (\x. f x k))
        Term e1 = run(d.premises[0]);
        Term e2 = run(d.premises[1]);
        auto k = names_.next(kContNames);
        auto f = names_.next(kFunNames);
        auto x = names_.next(kArgNames);
        auto [ik, iK] = internal();
        auto [i_f, iF] = internal();
        auto [ix, iX] = internal();
        Term inner = lam_raw(x, close(app(iF, iX, iK), ix));
        Term mid = lam_raw(f, close(app(e2, inner), i_f));
        return lam_raw(k, close(app(e1, mid), ik));
      }
      case Rule::TRst: {
        Term body = run(d.premises[0]);
        auto x = names_.next(kArgNames);
        return app(body, lam_raw(x, bound_var(0)));
      }
      default:  // T-Var, T-Const
        return d.term;
    }
  }

 private:
  NameSupply names_;
  std::size_t counter_ = 0;

  static std::set<std::string> initial(const TypeDerivation& root) {
    auto taken = all_names(root.term);
    for (const auto& [x, t] : root.env) taken.insert(x);
    collect_binders(root, taken);
    return taken;
  }

  // Names no parser can produce, so closing over them never captures.
  std::pair<std::string, Term> internal() {
    auto n = "%" + std::to_string(counter_++);
    return {n, free_var(n)};
  }
};

}  // namespace

Term translate_term_e(const TypeDerivation& d) { return CpsTranslator(d).run(d); }

// ---------------------------------------------------------------------------
// Direct-style evaluation

namespace {

bool source_value(const Term& e) {
  return e.is<term::Lam>() || e.is<term::Fix>() || e.is<term::Const>() || e.is<term::Free>();
}

Term plug(const PureContext& ctx, Term t) {
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it) {
    switch (it->kind) {
      case Frame::Kind::AppL:
        t = app(t, it->term);
        break;
      case Frame::Kind::AppR:
        t = app(it->term, t);
        break;
      case Frame::Kind::PrimL:
        t = prim(it->op, t, it->term);
        break;
      case Frame::Kind::PrimR:
        t = prim(it->op, it->term, t);
        break;
    }
  }
  return t;
}

std::uint64_t apply_prim(PrimOp op, std::uint64_t a, std::uint64_t b) { return op == PrimOp::Add ? a + b : a * b; }

}  // namespace

Decomposition decompose(const Term& e) {
  Decomposition d{{PureContext{}}, e};
  Term cur = e;
  while (true) {
    if (const auto* a = cur.as<term::App>()) {
      if (!source_value(a->fun)) {
        d.meta.back().push_back({Frame::Kind::AppL, PrimOp::Add, a->arg});
        cur = a->fun;
        continue;
      }
      if (!source_value(a->arg)) {
        d.meta.back().push_back({Frame::Kind::AppR, PrimOp::Add, a->fun});
        cur = a->arg;
        continue;
      }
    } else if (const auto* p = cur.as<term::Prim>()) {
      if (!source_value(p->lhs)) {
        d.meta.back().push_back({Frame::Kind::PrimL, p->op, p->rhs});
        cur = p->lhs;
        continue;
      }
      if (!source_value(p->rhs)) {
        d.meta.back().push_back({Frame::Kind::PrimR, p->op, p->lhs});
        cur = p->rhs;
        continue;
      }
    } else if (const auto* r = cur.as<term::Reset0>()) {
      if (!source_value(r->body)) {
        d.meta.push_back({});
        cur = r->body;
        continue;
      }
    }
    d.focus = cur;
    return d;
  }
}

Term recompose(const MetaContext& meta, const Term& focus) {
  Term t = focus;
  for (std::size_t i = meta.size(); i-- > 0;) {
    t = plug(meta[i], t);
    if (i > 0) t = reset0(t);
  }
  return t;
}

SourceOutcome source_eval(const Term& e, std::size_t fuel) {
  MetaContext meta{PureContext{}};
  Term cur = e;
  bool eval = true;
  std::size_t steps = 0;
  auto done = [&](SourceOutcome::Kind k, const Term& focus) { return SourceOutcome{k, recompose(meta, focus), steps}; };

  while (true) {
    if (eval) {
      if (source_value(cur)) {
        eval = false;
        continue;
      }
      if (const auto* a = cur.as<term::App>()) {
        meta.back().push_back({Frame::Kind::AppL, PrimOp::Add, a->arg});
        cur = a->fun;
      } else if (const auto* p = cur.as<term::Prim>()) {
        meta.back().push_back({Frame::Kind::PrimL, p->op, p->rhs});
        cur = p->lhs;
      } else if (const auto* r = cur.as<term::Reset0>()) {
        meta.push_back({});
        cur = r->body;
      } else if (const auto* s = cur.as<term::Shift0>()) {
        if (meta.size() == 1) return done(SourceOutcome::Kind::Stuck, cur);
        if (steps >= fuel) return done(SourceOutcome::Kind::FuelExhausted, cur);
        ++steps;
        // The captured context, reset included, becomes \y. <E[y]>.
        Term k = lam_raw("y", reset0(plug(meta.back(), bound_var(0))));
        meta.pop_back();
        cur = open(s->body, k);
      } else {
        return done(SourceOutcome::Kind::Stuck, cur);
      }
      continue;
    }

    auto& ctx = meta.back();
    if (ctx.empty()) {
      if (meta.size() == 1) return SourceOutcome{SourceOutcome::Kind::Converged, cur, steps};
      if (steps >= fuel) return done(SourceOutcome::Kind::FuelExhausted, cur);
      ++steps;  // <v> -> v
      meta.pop_back();
      continue;
    }
    Frame frame = ctx.back();
    ctx.pop_back();
    switch (frame.kind) {
      case Frame::Kind::AppL:
        ctx.push_back({Frame::Kind::AppR, PrimOp::Add, cur});
        cur = frame.term;
        eval = true;
        break;
      case Frame::Kind::PrimL:
        ctx.push_back({Frame::Kind::PrimR, frame.op, cur});
        cur = frame.term;
        eval = true;
        break;
      case Frame::Kind::AppR: {
        const Term& f = frame.term;
        if (!f.is<term::Lam>() && !f.is<term::Fix>()) return done(SourceOutcome::Kind::Stuck, app(f, cur));
        if (steps >= fuel) return done(SourceOutcome::Kind::FuelExhausted, app(f, cur));
        ++steps;
        if (const auto* l = f.as<term::Lam>()) {
          cur = open(l->body, cur);
        } else {
          cur = open2(f.as<term::Fix>()->body, f, cur);
        }
        eval = true;
        break;
      }
      case Frame::Kind::PrimR: {
        const auto* l = frame.term.as<term::Const>();
        const auto* r = cur.as<term::Const>();
        Term stuck = prim(frame.op, frame.term, cur);
        if (!l || !r) return done(SourceOutcome::Kind::Stuck, stuck);
        if (steps >= fuel) return done(SourceOutcome::Kind::FuelExhausted, stuck);
        ++steps;
        cur = nat_const(apply_prim(frame.op, l->value, r->value));
        break;
      }
    }
  }
}

}  // namespace coh
