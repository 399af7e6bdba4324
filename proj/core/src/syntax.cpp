#include "coh/syntax.hpp"

#include <cassert>
#include <functional>
#include <optional>
#include <stdexcept>

namespace coh {

// ---------------------------------------------------------------------------
// Types

struct Type::Node {
  TypeKind kind;
  std::array<Type, 3> args;
  std::size_t size;
};

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Type::Type() : Type(nat()) {}

Type Type::nat() {
  static const auto n = std::make_shared<const Node>(Node{TypeKind::Nat, {Type(nullptr), Type(nullptr), Type(nullptr)}, 1});
  return Type(n);
}

Type Type::top() {
  static const auto n = std::make_shared<const Node>(Node{TypeKind::Top, {Type(nullptr), Type(nullptr), Type(nullptr)}, 1});
  return Type(n);
}

Type Type::unit() {
  static const auto n = std::make_shared<const Node>(Node{TypeKind::Unit, {Type(nullptr), Type(nullptr), Type(nullptr)}, 1});
  return Type(n);
}

Type Type::arrow(Type domain, Type codomain) {
  std::size_t s = 1 + domain.size() + codomain.size();
  return Type(std::make_shared<const Node>(
      Node{TypeKind::Arrow, {std::move(domain), std::move(codomain), Type(nullptr)}, s}));
}

Type Type::eff(Type carrier, Type answer, Type rest) {
  std::size_t s = 1 + carrier.size() + answer.size() + rest.size();
  return Type(std::make_shared<const Node>(
      Node{TypeKind::Eff, {std::move(carrier), std::move(answer), std::move(rest)}, s}));
}

TypeKind Type::kind() const { return node_->kind; }
const Type& Type::domain() const {
  assert(kind() == TypeKind::Arrow);
  return node_->args[0];
}
const Type& Type::codomain() const {
  assert(kind() == TypeKind::Arrow);
  return node_->args[1];
}
const Type& Type::carrier() const {
  assert(kind() == TypeKind::Eff);
  return node_->args[0];
}
const Type& Type::answer() const {
  assert(kind() == TypeKind::Eff);
  return node_->args[1];
}
const Type& Type::rest() const {
  assert(kind() == TypeKind::Eff);
  return node_->args[2];
}
std::size_t Type::size() const { return node_->size; }

namespace {
std::size_t type_arity(TypeKind k) {
  switch (k) {
    case TypeKind::Arrow:
      return 2;
    case TypeKind::Eff:
      return 3;
    default:
      return 0;
  }
}
}  // namespace

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < type_arity(a.kind()); ++i) {
    if (!(a.node_->args[i] == b.node_->args[i])) return false;
  }
  return true;
}

std::strong_ordering operator<=>(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  for (std::size_t i = 0; i < type_arity(a.kind()); ++i) {
    if (auto c = a.node_->args[i] <=> b.node_->args[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

bool is_stlc_source_type(const Type& t) {
  switch (t.kind()) {
    case TypeKind::Nat:
    case TypeKind::Top:
      return true;
    case TypeKind::Arrow:
      return is_stlc_source_type(t.domain()) && is_stlc_source_type(t.codomain());
    default:
      return false;
  }
}

bool is_stlc_target_type(const Type& t) {
  switch (t.kind()) {
    case TypeKind::Nat:
    case TypeKind::Unit:
      return true;
    case TypeKind::Arrow:
      return is_stlc_target_type(t.domain()) && is_stlc_target_type(t.codomain());
    default:
      return false;
  }
}

bool is_effect_type(const Type& t) {
  switch (t.kind()) {
    case TypeKind::Nat:
      return true;
    case TypeKind::Arrow:
      return t.domain().is_pure() && is_effect_type(t.domain()) && is_effect_type(t.codomain());
    case TypeKind::Eff:
      return t.carrier().is_pure() && is_effect_type(t.carrier()) && is_effect_type(t.answer()) &&
             is_effect_type(t.rest());
    default:
      return false;
  }
}

void collect_subtypes(const Type& t, std::set<Type>& out) {
  if (!out.insert(t).second) return;
  switch (t.kind()) {
    case TypeKind::Arrow:
      collect_subtypes(t.domain(), out);
      collect_subtypes(t.codomain(), out);
      break;
    case TypeKind::Eff:
      collect_subtypes(t.carrier(), out);
      collect_subtypes(t.answer(), out);
      collect_subtypes(t.rest(), out);
      break;
    default:
      break;
  }
}

// ---------------------------------------------------------------------------
// Coercions

struct Coercion::Node {
  CoercionKind kind;
  std::vector<Coercion> children;
  std::size_t size;
};

Coercion::Coercion() : Coercion(id()) {}

namespace {
std::size_t sum_sizes(const std::vector<Coercion>& cs) {
  std::size_t s = 1;
  for (const auto& c : cs) s += c.size();
  return s;
}
}  // namespace

Coercion Coercion::id() {
  static const auto n = std::make_shared<const Node>(Node{CoercionKind::Id, {}, 1});
  return Coercion(n);
}

Coercion Coercion::top() {
  static const auto n = std::make_shared<const Node>(Node{CoercionKind::Top, {}, 1});
  return Coercion(n);
}

Coercion Coercion::comp(Coercion outer, Coercion inner) {
  std::vector<Coercion> cs{std::move(outer), std::move(inner)};
  auto s = sum_sizes(cs);
  return Coercion(std::make_shared<const Node>(Node{CoercionKind::Comp, std::move(cs), s}));
}

Coercion Coercion::arrow(Coercion arg, Coercion res) {
  std::vector<Coercion> cs{std::move(arg), std::move(res)};
  auto s = sum_sizes(cs);
  return Coercion(std::make_shared<const Node>(Node{CoercionKind::Arrow, std::move(cs), s}));
}

Coercion Coercion::lift(Coercion inner) {
  std::vector<Coercion> cs{std::move(inner)};
  auto s = sum_sizes(cs);
  return Coercion(std::make_shared<const Node>(Node{CoercionKind::Lift, std::move(cs), s}));
}

Coercion Coercion::cons(Coercion carrier, Coercion cont, Coercion rest) {
  std::vector<Coercion> cs{std::move(carrier), std::move(cont), std::move(rest)};
  auto s = sum_sizes(cs);
  return Coercion(std::make_shared<const Node>(Node{CoercionKind::Cons, std::move(cs), s}));
}

CoercionKind Coercion::kind() const { return node_->kind; }
const Coercion& Coercion::child(std::size_t i) const { return node_->children.at(i); }
std::size_t Coercion::arity() const { return node_->children.size(); }
std::size_t Coercion::size() const { return node_->size; }

bool operator==(const Coercion& a, const Coercion& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (!(a.child(i) == b.child(i))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Terms

Term make_term(TermNode n) { return Term(std::make_shared<const TermNode>(std::move(n))); }

Term::Term() : Term(nat_const(0)) {}

Term free_var(std::string name) { return make_term({term::Free{std::move(name)}}); }
Term bound_var(std::uint32_t index) { return make_term({term::Bound{index}}); }
Term lam_raw(std::string hint, Term body) { return make_term({term::Lam{std::move(hint), std::move(body)}}); }
Term fix_raw(std::string fun_hint, std::string arg_hint, Term body) {
  return make_term({term::Fix{std::move(fun_hint), std::move(arg_hint), std::move(body)}});
}
Term shift0_raw(std::string hint, Term body) {
  return make_term({term::Shift0{std::move(hint), std::move(body)}});
}
Term app(Term fun, Term arg) { return make_term({term::App{std::move(fun), std::move(arg)}}); }
Term app(Term fun, Term arg1, Term arg2) { return app(app(std::move(fun), std::move(arg1)), std::move(arg2)); }
Term nat_const(std::uint64_t n) { return make_term({term::Const{n}}); }
Term prim(PrimOp op, Term lhs, Term rhs) { return make_term({term::Prim{op, std::move(lhs), std::move(rhs)}}); }
Term reset0(Term body) { return make_term({term::Reset0{std::move(body)}}); }
Term capp(Coercion c, Term body) { return make_term({term::CApp{std::move(c), std::move(body)}}); }
Term unit_value() {
  static const Term u = make_term({term::Unit{}});
  return u;
}

Term lam(const std::string& x, const Term& body) { return lam_raw(x, close(body, x)); }
Term fix(const std::string& f, const std::string& x, const Term& body) {
  return fix_raw(f, x, close2(body, f, x));
}
Term shift0(const std::string& k, const Term& body) { return shift0_raw(k, close(body, k)); }

namespace {

// Generic structural rewrite that tracks binder depth. `leaf` is asked first
// for every node; returning a term short-circuits the descent.
using LeafFn = std::function<std::optional<Term>(const Term&, std::uint32_t depth)>;

Term rewrite(const Term& e, std::uint32_t depth, const LeafFn& leaf) {
  if (auto r = leaf(e, depth)) return *r;
  return std::visit(
      overloaded{
          [&](const term::Free&) { return e; },
          [&](const term::Bound&) { return e; },
          [&](const term::Const&) { return e; },
          [&](const term::Unit&) { return e; },
          [&](const term::Lam& l) { return lam_raw(l.hint, rewrite(l.body, depth + 1, leaf)); },
          [&](const term::Fix& f) { return fix_raw(f.fun_hint, f.arg_hint, rewrite(f.body, depth + 2, leaf)); },
          [&](const term::Shift0& s) { return shift0_raw(s.hint, rewrite(s.body, depth + 1, leaf)); },
          [&](const term::App& a) { return app(rewrite(a.fun, depth, leaf), rewrite(a.arg, depth, leaf)); },
          [&](const term::Prim& p) { return prim(p.op, rewrite(p.lhs, depth, leaf), rewrite(p.rhs, depth, leaf)); },
          [&](const term::Reset0& r) { return reset0(rewrite(r.body, depth, leaf)); },
          [&](const term::CApp& c) { return capp(c.coercion, rewrite(c.body, depth, leaf)); },
      },
      e.node().v);
}

template <class F>
void for_each_subterm(const Term& e, std::uint32_t depth, F&& f) {
  f(e, depth);
  std::visit(overloaded{
                 [&](const term::Lam& l) { for_each_subterm(l.body, depth + 1, f); },
                 [&](const term::Fix& x) { for_each_subterm(x.body, depth + 2, f); },
                 [&](const term::Shift0& s) { for_each_subterm(s.body, depth + 1, f); },
                 [&](const term::App& a) {
                   for_each_subterm(a.fun, depth, f);
                   for_each_subterm(a.arg, depth, f);
                 },
                 [&](const term::Prim& p) {
                   for_each_subterm(p.lhs, depth, f);
                   for_each_subterm(p.rhs, depth, f);
                 },
                 [&](const term::Reset0& r) { for_each_subterm(r.body, depth, f); },
                 [&](const term::CApp& c) { for_each_subterm(c.body, depth, f); },
                 [&](const auto&) {},
             },
             e.node().v);
}

}  // namespace

Term open(const Term& body, const Term& value) {
  return rewrite(body, 0, [&](const Term& t, std::uint32_t depth) -> std::optional<Term> {
    if (auto b = t.as<term::Bound>(); b && b->index == depth) return value;
    return std::nullopt;
  });
}

Term open2(const Term& body, const Term& outer, const Term& inner) {
  return rewrite(body, 0, [&](const Term& t, std::uint32_t depth) -> std::optional<Term> {
    if (auto b = t.as<term::Bound>()) {
      if (b->index == depth) return inner;
      if (b->index == depth + 1) return outer;
    }
    return std::nullopt;
  });
}

Term close(const Term& e, const std::string& x) {
  return rewrite(e, 0, [&](const Term& t, std::uint32_t depth) -> std::optional<Term> {
    if (auto f = t.as<term::Free>(); f && f->name == x) return bound_var(depth);
    return std::nullopt;
  });
}

Term close2(const Term& e, const std::string& outer, const std::string& inner) {
  return rewrite(e, 0, [&](const Term& t, std::uint32_t depth) -> std::optional<Term> {
    if (auto f = t.as<term::Free>()) {
      if (f->name == inner) return bound_var(depth);
      if (f->name == outer) return bound_var(depth + 1);
    }
    return std::nullopt;
  });
}

Term subst(const Term& e, const std::string& x, const Term& v) {
  return rewrite(e, 0, [&](const Term& t, std::uint32_t) -> std::optional<Term> {
    if (auto f = t.as<term::Free>(); f && f->name == x) return v;
    return std::nullopt;
  });
}

bool alpha_eq(const Term& a, const Term& b) {
  if (&a.node() == &b.node()) return true;
  if (a.node().v.index() != b.node().v.index()) return false;
  return std::visit(
      overloaded{
          [&](const term::Free& x) { return x.name == b.as<term::Free>()->name; },
          [&](const term::Bound& x) { return x.index == b.as<term::Bound>()->index; },
          [&](const term::Const& x) { return x.value == b.as<term::Const>()->value; },
          [&](const term::Unit&) { return true; },
          [&](const term::Lam& x) { return alpha_eq(x.body, b.as<term::Lam>()->body); },
          [&](const term::Fix& x) { return alpha_eq(x.body, b.as<term::Fix>()->body); },
          [&](const term::Shift0& x) { return alpha_eq(x.body, b.as<term::Shift0>()->body); },
          [&](const term::App& x) {
            const auto* y = b.as<term::App>();
            return alpha_eq(x.fun, y->fun) && alpha_eq(x.arg, y->arg);
          },
          [&](const term::Prim& x) {
            const auto* y = b.as<term::Prim>();
            return x.op == y->op && alpha_eq(x.lhs, y->lhs) && alpha_eq(x.rhs, y->rhs);
          },
          [&](const term::Reset0& x) { return alpha_eq(x.body, b.as<term::Reset0>()->body); },
          [&](const term::CApp& x) {
            const auto* y = b.as<term::CApp>();
            return x.coercion == y->coercion && alpha_eq(x.body, y->body);
          },
      },
      a.node().v);
}

bool operator==(const Term& a, const Term& b) { return alpha_eq(a, b); }

std::set<std::string> free_names(const Term& e) {
  std::set<std::string> out;
  for_each_subterm(e, 0, [&](const Term& t, std::uint32_t) {
    if (auto f = t.as<term::Free>()) out.insert(f->name);
  });
  return out;
}

std::set<std::string> all_names(const Term& e) {
  std::set<std::string> out;
  for_each_subterm(e, 0, [&](const Term& t, std::uint32_t) {
    std::visit(overloaded{
                   [&](const term::Free& f) { out.insert(f.name); },
                   [&](const term::Lam& l) { out.insert(l.hint); },
                   [&](const term::Fix& f) {
                     out.insert(f.fun_hint);
                     out.insert(f.arg_hint);
                   },
                   [&](const term::Shift0& s) { out.insert(s.hint); },
                   [&](const auto&) {},
               },
               t.node().v);
  });
  return out;
}

bool is_closed(const Term& e) {
  bool closed = true;
  for_each_subterm(e, 0, [&](const Term& t, std::uint32_t depth) {
    if (t.is<term::Free>()) closed = false;
    if (auto b = t.as<term::Bound>(); b && b->index >= depth) closed = false;
  });
  return closed;
}

bool is_value(const Term& e) {
  return std::visit(overloaded{
                        [](const term::Free&) { return true; },
                        [](const term::Bound&) { return true; },
                        [](const term::Lam&) { return true; },
                        [](const term::Fix&) { return true; },
                        [](const term::Const&) { return true; },
                        [](const term::Unit&) { return true; },
                        [](const term::CApp& c) {
                          switch (c.coercion.kind()) {
                            case CoercionKind::Arrow:
                            case CoercionKind::Lift:
                            case CoercionKind::Cons:
                              return is_value(c.body);
                            default:
                              return false;
                          }
                        },
                        [](const auto&) { return false; },
                    },
                    e.node().v);
}

std::size_t term_size(const Term& e) {
  std::size_t n = 0;
  for_each_subterm(e, 0, [&](const Term&, std::uint32_t) { ++n; });
  return n;
}

bool contains_coercion(const Term& e) {
  bool found = false;
  for_each_subterm(e, 0, [&](const Term& t, std::uint32_t) { found = found || t.is<term::CApp>(); });
  return found;
}

bool in_fragment(const Term& e, Fragment f) {
  bool ok = true;
  for_each_subterm(e, 0, [&](const Term& t, std::uint32_t) {
    bool control = t.is<term::Shift0>() || t.is<term::Reset0>();
    bool target_only = t.is<term::CApp>() || t.is<term::Unit>();
    switch (f) {
      case Fragment::SourceStlc:
        ok = ok && !control && !target_only;
        break;
      case Fragment::SourceEff:
        ok = ok && !target_only;
        break;
      case Fragment::Target:
        ok = ok && !control;
        break;
    }
  });
  return ok;
}

std::string fresh_name(const std::string& hint, const std::set<std::string>& avoid) {
  if (!avoid.contains(hint)) return hint;
  for (std::size_t i = 1;; ++i) {
    auto candidate = hint + std::to_string(i);
    if (!avoid.contains(candidate)) return candidate;
  }
}

}  // namespace coh
