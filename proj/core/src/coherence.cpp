#include "coh/coherence.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "coh/effects.hpp"
#include "coh/stlc.hpp"
#include "coh/surface.hpp"
#include "search.hpp"

namespace coh {

Flavor flavor_of(Calculus calc) { return calc == Calculus::Stlc ? Flavor::Stlc : Flavor::Effect; }

Type translate_type(Calculus calc, const Type& t) {
  return calc == Calculus::Stlc ? translate_type_s(t) : translate_type_e(t);
}

Term translate_term(Calculus calc, const TypeDerivation& d) {
  return calc == Calculus::Stlc ? translate_term_s(d) : translate_term_e(d);
}

Result<TypeDerivation> replay_derivation(Calculus calc, const Env& env, const Term& e, const Type& goal,
                                         const Skeleton& sk) {
  auto d = replay(calc, env, e, goal, sk);
  if (!d) return d;
  auto v = validate(calc, *d);
  if (!v) return v.error();
  return d;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 split_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix(seed ^ splitmix(index + 1)));
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
bool chance(std::mt19937_64& rng, unsigned percent) { return rng() % 100 < percent; }

// ---------------------------------------------------------------------------
// Derivation rewrites

using Path = std::vector<std::size_t>;

void collect_paths(const TypeDerivation& d, Path& p, std::vector<Path>& out) {
  out.push_back(p);
  for (std::size_t i = 0; i < d.premises.size(); ++i) {
    p.push_back(i);
    collect_paths(d.premises[i], p, out);
    p.pop_back();
  }
}

void collect_paths(const SubDerivation& d, Path& p, std::vector<Path>& out) {
  out.push_back(p);
  for (std::size_t i = 0; i < d.premises.size(); ++i) {
    p.push_back(i);
    collect_paths(d.premises[i], p, out);
    p.pop_back();
  }
}

template <class D>
const D& node_at(const D& d, const Path& p) {
  const D* cur = &d;
  for (auto i : p) cur = &cur->premises[i];
  return *cur;
}

template <class D>
D replace_at(const D& d, const Path& p, std::size_t depth, D repl) {
  if (depth == p.size()) return repl;
  D copy = d;
  copy.premises[p[depth]] = replace_at(d.premises[p[depth]], p, depth + 1, std::move(repl));
  return copy;
}

struct Candidate {
  TypeDerivation d;
  std::size_t cost;
};

class Mutator {
 public:
  Mutator(Calculus calc, const TypeDerivation& root) : calc_(calc), root_(root) {
    Path p;
    collect_paths(root, p, paths_);
  }

  // Candidates of every kind, interleaved so that no single kind crowds out
  // the others when the budget is small.
  std::vector<Candidate> all() {
    std::vector<std::vector<Candidate>> kinds{mixed_applications(), proper_subsumptions(), argument_types(),
                                              refl_expansions(), trans_insertions(), refl_wraps()};
    std::vector<Candidate> out;
    for (std::size_t i = 0;; ++i) {
      bool any = false;
      for (auto& k : kinds) {
        if (i < k.size()) {
          out.push_back(std::move(k[i]));
          any = true;
        }
      }
      if (!any) break;
    }
    return out;
  }

 private:
  Calculus calc_;
  const TypeDerivation& root_;
  std::vector<Path> paths_;

  TypeDerivation with(const Path& p, TypeDerivation repl) { return replace_at(root_, p, 0, std::move(repl)); }

  std::vector<Candidate> refl_wraps() {
    std::vector<Candidate> out;
    for (const auto& p : paths_) {
      const auto& n = node_at(root_, p);
      if (n.rule == Rule::TSub) continue;
      out.push_back({with(p, make_sub(n, make_refl(n.type))), 1});
    }
    return out;
  }

  std::vector<Candidate> trans_insertions() {
    std::vector<Candidate> out;
    for (const auto& p : paths_) {
      const auto& n = node_at(root_, p);
      if (n.rule != Rule::TSub) continue;
      const auto& s = *n.subsumption;
      for (int side = 0; side < 2; ++side) {
        auto m = n;
        m.subsumption = side == 0 ? make_trans(make_refl(s.super), s) : make_trans(s, make_refl(s.sub));
        out.push_back({with(p, std::move(m)), 1});
      }
    }
    return out;
  }

  std::vector<Candidate> refl_expansions() {
    std::vector<Candidate> out;
    for (const auto& p : paths_) {
      const auto& n = node_at(root_, p);
      if (n.rule != Rule::TSub) continue;
      std::vector<Path> sub_paths;
      Path q;
      collect_paths(*n.subsumption, q, sub_paths);
      for (const auto& sp : sub_paths) {
        const auto& s = node_at(*n.subsumption, sp);
        if (s.rule != Rule::SRefl) continue;
        SubDerivation expanded;
        if (s.sub.kind() == TypeKind::Arrow) {
          expanded = {Rule::SArrow, s.sub, s.super, {make_refl(s.sub.domain()), make_refl(s.sub.codomain())}};
        } else if (s.sub.kind() == TypeKind::Eff) {
          expanded = {Rule::SCons,
                      s.sub,
                      s.super,
                      {make_refl(s.sub.carrier()), make_refl(s.sub.answer()), make_refl(s.sub.rest())}};
        } else {
          continue;
        }
        auto m = n;
        m.subsumption = replace_at(*n.subsumption, sp, 0, std::move(expanded));
        out.push_back({with(p, std::move(m)), 1});
      }
    }
    return out;
  }

  // Derive a node at a proper subtype of its type and subsume.
  std::vector<Candidate> proper_subsumptions() {
    std::vector<Candidate> out;
    for (const auto& p : paths_) {
      const auto& n = node_at(root_, p);
      if (n.rule == Rule::TSub) continue;
      detail::Search search(calc_, n.env, n.type, {5000, 16});
      std::size_t found = 0;
      for (const auto& s : search.pool()) {
        if (found >= 2 || search.exhausted()) break;
        if (s == n.type) continue;
        auto sub = canonical_subtype(calc_, s, n.type);
        if (!sub) continue;
        auto d = search.check(n.env, n.term, s);
        if (!d) continue;
        out.push_back({with(p, make_sub(std::move(*d), std::move(*sub))), 1});
        ++found;
      }
    }
    return out;
  }

  // Pure application read as an effectful one, with both sides lifted.
  std::vector<Candidate> mixed_applications() {
    std::vector<Candidate> out;
    if (calc_ != Calculus::Eff) return out;
    for (const auto& p : paths_) {
      const auto& n = node_at(root_, p);
      if (n.rule != Rule::TPApp || n.type.kind() != TypeKind::Eff) continue;
      const Type& u1 = n.type.rest();
      const auto& f = n.premises[0];
      const auto& x = n.premises[1];
      Type ft = Type::eff(f.type, u1, u1);
      Type xt = Type::eff(x.type, u1, u1);
      auto m = n;
      m.rule = Rule::TApp;
      m.premises = {make_sub(f, SubDerivation{Rule::SLift, f.type, ft, {make_refl(u1)}}),
                    make_sub(x, SubDerivation{Rule::SLift, x.type, xt, {make_refl(u1)}})};
      out.push_back({with(p, std::move(m)), 2});
    }
    return out;
  }

  // Pure applications at a different argument type.
  std::vector<Candidate> argument_types() {
    std::vector<Candidate> out;
    for (const auto& p : paths_) {
      const auto& n = node_at(root_, p);
      bool pure_app = (calc_ == Calculus::Stlc && n.rule == Rule::TApp) || n.rule == Rule::TPApp;
      if (!pure_app) continue;
      const auto* a = n.term.as<term::App>();
      const Type& current = n.premises[1].type;
      detail::Search search(calc_, n.env, n.type, {5000, 16});
      std::size_t found = 0;
      for (const auto& t2 : search.pure_pool()) {
        if (found >= 2 || search.exhausted()) break;
        if (t2 == current) continue;
        auto d1 = search.check(n.env, a->fun, Type::arrow(t2, n.type));
        if (!d1) continue;
        auto d2 = search.check(n.env, a->arg, t2);
        if (!d2) continue;
        auto m = n;
        m.premises = {std::move(*d1), std::move(*d2)};
        out.push_back({with(p, std::move(m)), 1});
        ++found;
      }
    }
    return out;
  }
};

bool seen_shape(const std::vector<Skeleton>& seen, const Skeleton& s) {
  return std::any_of(seen.begin(), seen.end(), [&](const Skeleton& t) { return same_shape(s, t); });
}

}  // namespace

std::vector<TypeDerivation> enumerate_derivations(Calculus calc, const Env& env, const Term& e, const Type& goal,
                                                  const EnumBudget& budget,
                                                  const std::vector<TypeDerivation>& seeds) {
  std::vector<TypeDerivation> out;
  std::vector<Skeleton> shapes;
  std::deque<std::pair<TypeDerivation, std::size_t>> queue;
  auto admit = [&](const TypeDerivation& d, std::size_t cost) {
    auto sk = to_skeleton(d);
    if (seen_shape(shapes, sk)) return;
    if (!validate(calc, d)) return;
    shapes.push_back(std::move(sk));
    out.push_back(d);
    queue.emplace_back(d, cost);
  };

  if (seeds.empty()) {
    auto d = detail::run_check(calc, env, e, goal, CheckLimits{});
    if (d) admit(*d, 0);
  } else {
    for (const auto& d : seeds) {
      if (out.size() < budget.max_derivations) admit(d, 0);
    }
  }

  std::size_t work = 0;
  while (!queue.empty() && out.size() < budget.max_derivations && work < budget.work_limit) {
    auto [d, cost] = std::move(queue.front());
    queue.pop_front();
    if (cost >= budget.extra_subsumptions) continue;
    for (auto& c : Mutator(calc, d).all()) {
      if (cost + c.cost > budget.extra_subsumptions) continue;
      if (++work > budget.work_limit || out.size() >= budget.max_derivations) break;
      admit(c.d, cost + c.cost);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random well-typed source programs

namespace {

class SourceGen {
 public:
  SourceGen(Calculus calc, bool control, std::mt19937_64& rng)
      : calc_(calc), control_(control && calc == Calculus::Eff), rng_(rng) {}

  Type pure_type(int depth) {
    std::size_t r = pick(rng_, 10);
    if (calc_ == Calculus::Stlc) {
      if (r < 5 || (depth <= 0 && r < 8)) return Type::nat();
      if (r < 7 || depth <= 0) return Type::top();
      return Type::arrow(pure_type(depth - 1), pure_type(depth - 1));
    }
    if (depth <= 0 || r < 6) return Type::nat();
    return Type::arrow(pure_type(depth - 1), any_type(depth - 1));
  }

  Type any_type(int depth) {
    if (calc_ == Calculus::Stlc || depth <= 0 || chance(rng_, 55)) return pure_type(depth);
    Type carrier = pure_type(depth - 1);
    Type answer = any_type(depth - 1);
    Type rest = control_ && chance(rng_, 50) ? any_type(depth - 1) : answer;
    return Type::eff(carrier, answer, rest);
  }

  Type subtype(const Type& t, int depth) {
    switch (t.kind()) {
      case TypeKind::Top:
        return depth > 0 && chance(rng_, 30) ? pure_type(depth - 1) : (chance(rng_, 50) ? Type::nat() : Type::top());
      case TypeKind::Arrow:
        if (depth <= 0) return t;
        return Type::arrow(supertype(t.domain(), depth - 1), subtype(t.codomain(), depth - 1));
      case TypeKind::Eff:
        if (depth <= 0) return t;
        if (canonical_subtype(calc_, t.answer(), t.rest()) && chance(rng_, 50)) return subtype(t.carrier(), depth - 1);
        if (!control_) return Type::eff(subtype(t.carrier(), depth - 1), t.answer(), t.rest());
        return Type::eff(subtype(t.carrier(), depth - 1), supertype(t.answer(), depth - 1),
                         subtype(t.rest(), depth - 1));
      default:
        return t;
    }
  }

  Type supertype(const Type& t, int depth) {
    if (calc_ == Calculus::Stlc && chance(rng_, 25)) return Type::top();
    switch (t.kind()) {
      case TypeKind::Arrow:
        if (depth <= 0) return t;
        return Type::arrow(subtype(t.domain(), depth - 1), supertype(t.codomain(), depth - 1));
      case TypeKind::Eff:
        if (depth <= 0) return t;
        if (!control_) return Type::eff(supertype(t.carrier(), depth - 1), t.answer(), t.rest());
        return Type::eff(supertype(t.carrier(), depth - 1), subtype(t.answer(), depth - 1),
                         supertype(t.rest(), depth - 1));
      default:
        if (calc_ == Calculus::Eff && depth > 0 && chance(rng_, 30)) {
          Type x = any_type(depth - 1);
          return Type::eff(t, x, x);
        }
        return t;
    }
  }

  TypeDerivation derive(const Env& env, const Type& goal, int size) {
    if (size <= 0) return minimal(env, goal);
    std::vector<std::pair<unsigned, std::function<std::optional<TypeDerivation>()>>> options;
    auto add = [&](unsigned w, std::function<std::optional<TypeDerivation>()> f) { options.emplace_back(w, std::move(f)); };

    std::vector<std::string> exact, heads;
    for (const auto& [x, t] : env) {
      if (t == goal) exact.push_back(x);
      if (t.kind() == TypeKind::Arrow && t.codomain() == goal) heads.push_back(x);
    }
    if (!exact.empty()) add(4, [&] { return make_var(env, exact[pick(rng_, exact.size())]); });
    if (!heads.empty() && size >= 2) {
      add(4, [&]() -> std::optional<TypeDerivation> {
        const auto& f = heads[pick(rng_, heads.size())];
        auto arg = derive(env, env.at(f).domain(), size - 1);
        return application(env, make_var(env, f), std::move(arg), goal);
      });
    }
    add(2, [&]() -> std::optional<TypeDerivation> {
      Type s = subtype(goal, 2);
      if (s == goal) return std::nullopt;
      if (calc_ == Calculus::Eff && !is_effect_type(s)) return std::nullopt;
      auto sub = canonical_subtype(calc_, s, goal);
      if (!sub) return std::nullopt;
      return make_sub(derive(env, s, size - 1), std::move(*sub));
    });
    if (size >= 3) {
      add(3, [&]() -> std::optional<TypeDerivation> {
        Type a = pure_type(1);
        int left = 1 + static_cast<int>(pick(rng_, static_cast<std::size_t>(size - 1)));
        auto f = derive(env, Type::arrow(a, goal), left - 1);
        auto x = derive(env, a, size - 1 - left);
        return application(env, std::move(f), std::move(x), goal);
      });
    }
    if (control_) {
      add(1, [&]() -> std::optional<TypeDerivation> {
        Type s = pure_type(1);
        auto b = derive(env, Type::eff(s, s, goal), size - 1);
        return TypeDerivation{Rule::TRst, env, reset0(b.term), goal, {std::move(b)}, std::nullopt, {}};
      });
    }
    switch (goal.kind()) {
      case TypeKind::Nat:
        add(2, [&] { return make_const(env, pick(rng_, 10)); });
        if (size >= 3) {
          add(2, [&]() -> std::optional<TypeDerivation> {
            auto l = derive(env, Type::nat(), (size - 1) / 2);
            auto r = derive(env, Type::nat(), (size - 1) / 2);
            auto op = chance(rng_, 50) ? PrimOp::Add : PrimOp::Mul;
            Term t = prim(op, l.term, r.term);
            return TypeDerivation{Rule::TPrim, env, t, goal, {std::move(l), std::move(r)}, std::nullopt, {}};
          });
        }
        break;
      case TypeKind::Arrow:
        add(10, [&] { return abstraction(env, goal, size); });
        add(1, [&] { return fixpoint(env, goal, size); });
        break;
      case TypeKind::Eff:
        if (control_) add(4, [&] { return shift(env, goal, size); });
        if (size >= 3) add(3, [&] { return effectful_application(env, goal, size); });
        break;
      default:
        break;
    }

    for (int attempt = 0; attempt < 8; ++attempt) {
      unsigned total = 0;
      for (const auto& o : options) total += o.first;
      auto r = static_cast<unsigned>(rng_() % total);
      for (auto& o : options) {
        if (r < o.first) {
          if (auto d = o.second()) return std::move(*d);
          break;
        }
        r -= o.first;
      }
    }
    return minimal(env, goal);
  }

  TypeDerivation minimal(const Env& env, const Type& goal) {
    for (const auto& [x, t] : env) {
      if (t == goal) return make_var(env, x);
    }
    switch (goal.kind()) {
      case TypeKind::Nat:
        return make_const(env, pick(rng_, 10));
      case TypeKind::Top:
        return make_sub(make_const(env, pick(rng_, 10)), SubDerivation{Rule::STop, Type::nat(), goal, {}});
      case TypeKind::Arrow:
        return abstraction(env, goal, 0);
      case TypeKind::Eff:
        if (auto sub = canonical_subtype(calc_, goal.carrier(), goal); sub && (!control_ || chance(rng_, 50)))
          return make_sub(minimal(env, goal.carrier()), std::move(*sub));
        return shift(env, goal, 0);
      default:
        return make_const(env, 0);
    }
  }

 private:
  Calculus calc_;
  bool control_;
  std::mt19937_64& rng_;
  std::size_t names_ = 0;

  std::string fresh(const char* base) { return base + std::to_string(++names_); }

  TypeDerivation application(const Env& env, TypeDerivation f, TypeDerivation x, const Type& goal) {
    Term t = app(f.term, x.term);
    Rule r = calc_ == Calculus::Stlc ? Rule::TApp : Rule::TPApp;
    return TypeDerivation{r, env, t, goal, {std::move(f), std::move(x)}, std::nullopt, {}};
  }

  TypeDerivation abstraction(const Env& env, const Type& goal, int size) {
    auto x = fresh("x");
    Env inner = env;
    inner[x] = goal.domain();
    auto b = derive(inner, goal.codomain(), size - 1);
    Term t = lam(x, b.term);
    return TypeDerivation{Rule::TAbs, env, t, goal, {std::move(b)}, std::nullopt, {x}};
  }

  TypeDerivation fixpoint(const Env& env, const Type& goal, int size) {
    auto f = fresh("f");
    auto x = fresh("x");
    Env inner = env;
    inner[f] = goal;
    inner[x] = goal.domain();
    auto b = derive(inner, goal.codomain(), size - 1);
    Term t = fix(f, x, b.term);
    return TypeDerivation{Rule::TFix, env, t, goal, {std::move(b)}, std::nullopt, {f, x}};
  }

  TypeDerivation shift(const Env& env, const Type& goal, int size) {
    auto k = fresh("k");
    Env inner = env;
    inner[k] = Type::arrow(goal.carrier(), goal.answer());
    auto b = derive(inner, goal.rest(), size - 1);
    Term t = shift0(k, b.term);
    return TypeDerivation{Rule::TSft, env, t, goal, {std::move(b)}, std::nullopt, {k}};
  }

  // e1 : [t2 -> [t1, U4, U3], U2, U1]   e2 : [t2, U3, U2]
  TypeDerivation effectful_application(const Env& env, const Type& goal, int size) {
    const Type& t1 = goal.carrier();
    const Type& u4 = goal.answer();
    const Type& u1 = goal.rest();
    Type t2 = pure_type(1);
    Type u3 = control_ && chance(rng_, 40) ? any_type(1) : u1;
    Type u2 = control_ && chance(rng_, 40) ? any_type(1) : u1;
    if (!control_) u3 = u2 = u1;
    int left = 1 + static_cast<int>(pick(rng_, static_cast<std::size_t>(std::max(size - 1, 1))));
    auto f = derive(env, Type::eff(Type::arrow(t2, Type::eff(t1, u4, u3)), u2, u1), left - 1);
    auto x = derive(env, Type::eff(t2, u3, u2), size - 1 - left);
    Term t = app(f.term, x.term);
    return TypeDerivation{Rule::TApp, env, t, goal, {std::move(f), std::move(x)}, std::nullopt, {}};
  }
};

}  // namespace

std::vector<Sample> gen_terms(const GenConfig& config) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < config.samples; ++i) {
    auto rng = split_rng(config.seed, i);
    SourceGen gen(config.calculus, config.control, rng);
    Type goal = config.goal ? *config.goal : gen.any_type(2);
    auto size = static_cast<int>(1 + pick(rng, std::max<std::size_t>(config.term_size, 1)));
    auto d = gen.derive({}, goal, size);
    out.push_back({{}, d.term, goal, std::move(d)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Target values and contexts

namespace {

class TargetGen {
 public:
  explicit TargetGen(std::mt19937_64& rng) : rng_(rng) {}

  using Scope = std::vector<std::pair<std::string, Type>>;

  // The simplest closed inhabitant; identities where the types allow.
  Term inhabit(const Type& t, const Scope& scope) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      if (it->second == t) return free_var(it->first);
    }
    switch (t.kind()) {
      case TypeKind::Unit:
        return unit_value();
      case TypeKind::Arrow: {
        auto x = fresh("x");
        Scope inner = scope;
        inner.emplace_back(x, t.domain());
        return lam(x, inhabit(t.codomain(), inner));
      }
      case TypeKind::Eff: {
        auto k = fresh("k");
        Scope inner = scope;
        inner.emplace_back(k, Type::arrow(t.carrier(), t.answer()));
        if (t.answer() == t.rest()) return lam(k, app(free_var(k), inhabit(t.carrier(), inner)));
        return lam(k, inhabit(t.rest(), inner));
      }
      default:
        return nat_const(1);
    }
  }

  Term value(const Type& t, const Scope& scope, std::size_t depth) {
    if (depth == 0) return inhabit(t, scope);
    switch (t.kind()) {
      case TypeKind::Nat:
        return nat_const(pick(rng_, 10));
      case TypeKind::Arrow: {
        auto x = fresh("x");
        Scope inner = scope;
        inner.emplace_back(x, t.domain());
        return lam(x, expr(t.codomain(), inner, depth - 1));
      }
      case TypeKind::Eff: {
        auto k = fresh("k");
        Scope inner = scope;
        inner.emplace_back(k, Type::arrow(t.carrier(), t.answer()));
        return lam(k, expr(t.rest(), inner, depth - 1));
      }
      default:
        return inhabit(t, scope);
    }
  }

  Term expr(const Type& t, const Scope& scope, std::size_t depth) {
    if (depth == 0) return inhabit(t, scope);
    std::vector<Term> options;
    for (const auto& [x, s] : scope) {
      if (s == t) options.push_back(free_var(x));
      if (s.kind() == TypeKind::Arrow && s.codomain() == t) {
        options.push_back(app(free_var(x), value(s.domain(), scope, depth - 1)));
      }
    }
    if (t.kind() == TypeKind::Nat) {
      options.push_back(nat_const(pick(rng_, 10)));
      options.push_back(prim(chance(rng_, 50) ? PrimOp::Add : PrimOp::Mul, expr(t, scope, depth - 1),
                             expr(t, scope, depth - 1)));
    }
    options.push_back(value(t, scope, depth));
    return options[pick(rng_, options.size())];
  }

  // Applies `hole` to arguments and continuations until a base type.
  std::pair<Term, Type> eliminate(Term hole, Type t, bool canonical) {
    while (t.kind() == TypeKind::Arrow || t.kind() == TypeKind::Eff) {
      if (t.kind() == TypeKind::Arrow) {
        hole = app(hole, canonical ? inhabit(t.domain(), {}) : value(t.domain(), {}, 2));
        t = t.codomain();
      } else {
        Type k = Type::arrow(t.carrier(), t.answer());
        hole = app(hole, canonical ? inhabit(k, {}) : value(k, {}, 2));
        t = t.rest();
      }
    }
    return {hole, t};
  }

  Term adapt(Term c, const Type& from, const Type& to, bool canonical) {
    if (from == to) {
      if (canonical || to.kind() != TypeKind::Nat || chance(rng_, 40)) return c;
      auto y = fresh("y");
      Scope s{{y, from}};
      return app(lam(y, expr(to, s, 2)), c);
    }
    auto y = fresh("y");
    return app(lam(y, canonical ? inhabit(to, {}) : expr(to, {}, 1)), c);
  }

 private:
  std::mt19937_64& rng_;
  std::size_t names_ = 0;

  std::string fresh(const char* base) { return base + std::to_string(++names_); }
};

}  // namespace

Term plug_hole(const Term& context, const Term& t) { return subst(context, kHole, t); }

Term gen_value(const Type& t, std::mt19937_64& rng, std::size_t depth) {
  TargetGen gen(rng);
  return gen.value(t, {}, depth);
}

std::vector<Term> gen_contexts(Flavor flavor, const Type& hole, const Type& answer, const GenConfig& config) {
  std::vector<Term> out;
  Env env{{kHole, hole}};
  TargetCheckOptions opts;
  opts.expected = answer;
  opts.allow_impure_env = true;
  auto keep = [&](const Term& c) {
    if (std::find(out.begin(), out.end(), c) != out.end()) return;
    if (target_check(env, c, flavor, opts)) out.push_back(c);
  };
  std::size_t want = std::max<std::size_t>(config.contexts, 1);
  for (std::size_t i = 0; i < want * 3 && out.size() < want; ++i) {
    auto rng = split_rng(config.seed, 1000003 + i);
    TargetGen gen(rng);
    bool canonical = i == 0;
    auto [c, ground] = gen.eliminate(free_var(kHole), hole, canonical);
    keep(gen.adapt(c, ground, answer, canonical));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Observation

Approx approx_at(std::uint64_t k, std::uint64_t fuel, const Term& e1, const Term& e2) {
  auto o1 = evaluate(e1, {k, 1000000});
  if (o1.kind != Outcome::Kind::Converged) return Approx::Holds;
  auto o2 = evaluate(e2, {fuel, 1000000});
  switch (o2.kind) {
    case Outcome::Kind::Converged:
      return Approx::Holds;
    case Outcome::Kind::FuelExhausted:
      return Approx::Unknown;
    default:
      return Approx::Fails;
  }
}

Observation observe(const Term& program, std::uint64_t fuel) {
  auto o = evaluate(program, {fuel, 1000000});
  Observation obs{o.kind, std::nullopt, o.beta, o.iota, {}};
  if (o.kind == Outcome::Kind::Converged) {
    if (const auto* c = o.term.as<term::Const>()) obs.constant = c->value;
    obs.value = print(o.term);
  } else if (o.kind == Outcome::Kind::Stuck) {
    obs.value = print(o.term);
  }
  return obs;
}

namespace {

std::string describe(const Observation& o) {
  switch (o.kind) {
    case Outcome::Kind::Converged:
      return o.value;
    case Outcome::Kind::FuelExhausted:
      return "diverges?";
    case Outcome::Kind::Stuck:
      return "stuck at " + o.value;
    case Outcome::Kind::InternalLimit:
      return "iota cap";
  }
  return "?";
}

PairVerdict compare(const Observation& a, const Observation& b, bool at_nat) {
  using K = Outcome::Kind;
  PairVerdict v;
  auto broken = [](const Observation& o) { return o.kind == K::Stuck || o.kind == K::InternalLimit; };
  if (broken(a) || broken(b)) {
    v.kind = PairVerdict::Kind::Disagree;
  } else if (a.kind == K::Converged && b.kind == K::Converged) {
    v.kind = at_nat && a.constant != b.constant ? PairVerdict::Kind::Disagree : PairVerdict::Kind::Agree;
  } else if (a.kind == K::FuelExhausted && b.kind == K::FuelExhausted) {
    v.kind = PairVerdict::Kind::Agree;
    v.low_confidence = true;
  } else {
    v.kind = PairVerdict::Kind::Unknown;
  }
  v.note = describe(a) + " / " + describe(b);
  return v;
}

template <class F>
void parallel_for(std::size_t n, std::size_t threads, F f) {
  threads = std::min(std::max<std::size_t>(threads, 1), std::max<std::size_t>(n, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

const PairVerdict* CoherenceReport::witness() const {
  for (const auto& v : verdicts) {
    if (v.kind == PairVerdict::Kind::Disagree) return &v;
  }
  return nullptr;
}

Result<CoherenceReport> coherence_check(Calculus calc, const Env& env, const Term& e, const Type& goal,
                                        const CoherenceConfig& config) {
  CoherenceReport r;
  r.calculus = calc;
  r.env = env;
  r.term = e;
  r.goal = goal;
  r.seed = config.seed;
  r.fuel = config.fuel;
  const Flavor flavor = flavor_of(calc);

  std::vector<TypeDerivation> ds;
  if (!config.supplied.empty()) {
    for (std::size_t i = 0; i < config.supplied.size(); ++i) {
      auto d = replay_derivation(calc, env, e, goal, config.supplied[i]);
      if (!d) {
        auto err = d.error();
        err.message = "derivation " + std::to_string(i) + ": " + err.message;
        return err;
      }
      ds.push_back(std::move(d).value());
    }
  } else if (!config.seeds.empty()) {
    ds = enumerate_derivations(calc, env, e, goal, config.derivations, config.seeds);
  } else {
    auto base = detail::run_check(calc, env, e, goal, CheckLimits{});
    if (!base) return base.error();
    ds = enumerate_derivations(calc, env, e, goal, config.derivations, {*base});
  }

  r.target_type = translate_type(calc, goal);
  Env target_env = calc == Calculus::Stlc ? translate_env_s(env) : translate_env_e(env);
  for (const auto& d : ds) {
    r.derivations.push_back(to_skeleton(d));
    r.translations.push_back(translate_term(calc, d));
  }
  TargetCheckOptions opts;
  opts.expected = r.target_type;
  for (std::size_t i = 0; i < r.translations.size(); ++i) {
    auto t = target_check(target_env, r.translations[i], flavor, opts);
    if (!t) {
      r.summary = CoherenceReport::Summary::Incoherent;
      r.reason = "translation " + std::to_string(i) + " is not of type " + print(r.target_type) + ": " +
                 t.error().message;
      return r;
    }
  }

  // Free variables are closed with generated values before plugging.
  auto rng = split_rng(config.seed, 0);
  for (const auto& [x, t] : target_env) r.closing.emplace_back(x, gen_value(t, rng, 2));
  std::vector<Term> closed;
  for (const auto& t : r.translations) {
    Term c = t;
    for (const auto& [x, v] : r.closing) c = subst(c, x, v);
    closed.push_back(c);
  }

  GenConfig gc;
  gc.seed = config.seed;
  gc.contexts = config.contexts;
  r.contexts = gen_contexts(flavor, r.target_type, Type::nat(), gc);
  if (r.contexts.empty()) {
    r.summary = CoherenceReport::Summary::Inconclusive;
    r.reason = "no closing context could be generated";
    return r;
  }

  const std::size_t n = closed.size();
  const std::size_t m = r.contexts.size();
  r.erased_checked = env.empty() && r.target_type == Type::nat();
  const std::size_t columns = m + (r.erased_checked ? 1 : 0);
  std::vector<Observation> obs(n * columns);
  parallel_for(n * columns, config.threads, [&](std::size_t k) {
    std::size_t i = k / columns, c = k % columns;
    Term program = c < m ? plug_hole(r.contexts[c], closed[i]) : erase(closed[i]);
    obs[k] = observe(program, config.fuel);
  });

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t c = 0; c < columns; ++c) {
        auto v = compare(obs[i * columns + c], obs[j * columns + c], true);
        v.first = i;
        v.second = j;
        v.context = c;
        r.verdicts.push_back(std::move(v));
      }
    }
  }

  bool all_unknown = !r.verdicts.empty();
  for (const auto& v : r.verdicts) {
    if (v.kind == PairVerdict::Kind::Disagree) {
      r.summary = CoherenceReport::Summary::Incoherent;
      r.reason = "derivations " + std::to_string(v.first) + " and " + std::to_string(v.second) +
                 " disagree: " + v.note;
      return r;
    }
    if (v.kind != PairVerdict::Kind::Unknown) all_unknown = false;
  }
  if (all_unknown) {
    r.summary = CoherenceReport::Summary::Inconclusive;
    r.reason = "every comparison ran out of fuel on one side";
  }
  return r;
}

std::string summary_name(CoherenceReport::Summary s) {
  switch (s) {
    case CoherenceReport::Summary::Coherent:
      return "Coherent";
    case CoherenceReport::Summary::Incoherent:
      return "Incoherent";
    case CoherenceReport::Summary::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

namespace {

const char* verdict_name(const PairVerdict& v) {
  switch (v.kind) {
    case PairVerdict::Kind::Agree:
      return v.low_confidence ? "agree (both out of fuel)" : "agree";
    case PairVerdict::Kind::Disagree:
      return "disagree";
    case PairVerdict::Kind::Unknown:
      return "unknown";
  }
  return "?";
}

std::string context_label(const CoherenceReport& r, std::size_t c) {
  return c < r.contexts.size() ? print(r.contexts[c]) : std::string("erased, empty context");
}

}  // namespace

std::string report_text(const CoherenceReport& r) {
  std::ostringstream out;
  out << "judgment: ";
  bool first = true;
  for (const auto& [x, t] : r.env) {
    out << (first ? "" : ", ") << x << " : " << print(t);
    first = false;
  }
  out << " |- " << print(r.term) << " : " << print(r.goal) << "\n";
  out << "target type: " << print(r.target_type) << "\n";
  for (std::size_t i = 0; i < r.derivations.size(); ++i) {
    out << "derivation " << i << ": " << print(r.derivations[i]) << "\n";
    out << "  translation: " << print(r.translations[i]) << "\n";
  }
  for (const auto& [x, v] : r.closing) out << "closing " << x << " := " << print(v) << "\n";
  for (std::size_t c = 0; c < r.contexts.size(); ++c) out << "context " << c << ": " << print(r.contexts[c]) << "\n";
  for (const auto& v : r.verdicts) {
    out << "pair " << v.first << "," << v.second << " in " << context_label(r, v.context) << ": "
        << verdict_name(v) << " (" << v.note << ")\n";
  }
  out << "summary: " << summary_name(r.summary);
  if (!r.reason.empty()) out << " (" << r.reason << ")";
  out << "\nseed: " << r.seed << "  fuel: " << r.fuel << "\n";
  return out.str();
}

std::string report_json(const CoherenceReport& r) {
  using nlohmann::json;
  json j;
  json env = json::object();
  for (const auto& [x, t] : r.env) env[x] = print(t);
  j["judgment"] = {{"calculus", r.calculus == Calculus::Stlc ? "stlc" : "eff"},
                   {"env", env},
                   {"term", print(r.term)},
                   {"type", print(r.goal)},
                   {"target_type", print(r.target_type)}};
  j["derivations"] = json::array();
  for (std::size_t i = 0; i < r.derivations.size(); ++i) {
    j["derivations"].push_back({{"skeleton", print(r.derivations[i])}, {"translation", print(r.translations[i])}});
  }
  j["contexts"] = json::array();
  for (const auto& c : r.contexts) j["contexts"].push_back(print(c));
  if (r.erased_checked) j["contexts"].push_back("erased");
  json closing = json::object();
  for (const auto& [x, v] : r.closing) closing[x] = print(v);
  j["closing"] = closing;
  // One row per derivation pair, one entry per context.
  j["verdicts"] = json::array();
  json row = json::array();
  for (std::size_t k = 0; k < r.verdicts.size(); ++k) {
    const auto& v = r.verdicts[k];
    row.push_back({{"pair", {v.first, v.second}},
                   {"context", v.context},
                   {"verdict", v.kind == PairVerdict::Kind::Agree      ? "agree"
                               : v.kind == PairVerdict::Kind::Disagree ? "disagree"
                                                                       : "unknown"},
                   {"low_confidence", v.low_confidence},
                   {"observations", v.note}});
    bool last_of_pair = k + 1 == r.verdicts.size() || r.verdicts[k + 1].first != v.first ||
                        r.verdicts[k + 1].second != v.second;
    if (last_of_pair) {
      j["verdicts"].push_back(row);
      row = json::array();
    }
  }
  j["summary"] = summary_name(r.summary);
  if (!r.reason.empty()) j["reason"] = r.reason;
  j["seed"] = r.seed;
  j["fuel"] = r.fuel;
  return j.dump(2);
}

}  // namespace coh
