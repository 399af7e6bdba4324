#pragma once

// Abstract syntax shared by the four calculi: the two source languages
// (STLC with Top, delimited control with effect types) and their targets
// (explicit coercions, with and without control effects).
//
// Terms use a locally nameless representation. Bound variables are de Bruijn
// indices, free variables are names, and binders only keep a name hint for
// printing. Two terms are alpha-equivalent iff they are structurally equal
// once hints are ignored, which is what operator== checks.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace coh {

// ---------------------------------------------------------------------------
// Types

enum class TypeKind : std::uint8_t { Nat, Top, Unit, Arrow, Eff };

/// Immutable type tree. One representation serves every calculus:
///   STLC source:   nat | top | t -> t
///   STLC target:   nat | unit | t -> t
///   effect source: pure  tau ::= nat | tau -> T
///                  T ::= tau | [tau, T, T]       (the effect type <tau T U>)
///   effect target: same shape, [tau, T, U] read as the effectful arrow.
class Type {
 public:
  Type();  // nat

  static Type nat();
  static Type top();
  static Type unit();
  static Type arrow(Type domain, Type codomain);
  static Type eff(Type carrier, Type answer, Type rest);

  TypeKind kind() const;
  bool is_pure() const { return kind() != TypeKind::Eff; }

  const Type& domain() const;    // Arrow
  const Type& codomain() const;  // Arrow
  const Type& carrier() const;   // Eff
  const Type& answer() const;    // Eff
  const Type& rest() const;      // Eff

  std::size_t size() const;

  friend bool operator==(const Type& a, const Type& b);
  /// Orders by size first, then structurally. Used to keep candidate pools deterministic.
  friend std::strong_ordering operator<=>(const Type& a, const Type& b);

 private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

bool is_stlc_source_type(const Type& t);
bool is_stlc_target_type(const Type& t);
/// Types of the effect calculus (source or target): no top/unit, and the
/// carrier of [.,.,.] and the domain of -> are pure.
bool is_effect_type(const Type& t);

/// Every subtree of t, including t.
void collect_subtypes(const Type& t, std::set<Type>& out);

using Env = std::map<std::string, Type>;

// ---------------------------------------------------------------------------
// Coercions

enum class CoercionKind : std::uint8_t { Id, Comp, Top, Arrow, Lift, Cons };

/// Coercion trees. comp(outer, inner) applies inner first.
class Coercion {
 public:
  Coercion();  // id

  static Coercion id();
  static Coercion comp(Coercion outer, Coercion inner);
  static Coercion top();
  static Coercion arrow(Coercion arg, Coercion res);
  static Coercion lift(Coercion inner);
  static Coercion cons(Coercion carrier, Coercion cont, Coercion rest);

  CoercionKind kind() const;
  /// Children in grammar order: comp(outer, inner), arrow(arg, res),
  /// lift(inner), cons(carrier, cont, rest).
  const Coercion& child(std::size_t i) const;
  std::size_t arity() const;
  std::size_t size() const;

  friend bool operator==(const Coercion& a, const Coercion& b);

 private:
  struct Node;
  explicit Coercion(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Terms

enum class PrimOp : std::uint8_t { Add, Mul };

struct TermNode;

class Term {
 public:
  Term();  // the constant 0

  const TermNode& node() const { return *node_; }
  template <class T>
  const T* as() const;
  template <class T>
  bool is() const {
    return as<T>() != nullptr;
  }

  friend bool operator==(const Term& a, const Term& b);  // alpha-equivalence

 private:
  friend Term make_term(TermNode n);
  explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TermNode> node_;
};

namespace term {
struct Free {
  std::string name;
};
struct Bound {
  std::uint32_t index;
};
/// `\x. body`; body refers to x as index 0.
struct Lam {
  std::string hint;
  Term body;
};
struct App {
  Term fun;
  Term arg;
};
/// `fix f x. body`; inside body x is index 0 and f is index 1.
struct Fix {
  std::string fun_hint;
  std::string arg_hint;
  Term body;
};
struct Const {
  std::uint64_t value;
};
/// Arithmetic on naturals, wrapping modulo 2^64.
struct Prim {
  PrimOp op;
  Term lhs;
  Term rhs;
};
/// `S0 k. body`; body refers to k as index 0.
struct Shift0 {
  std::string hint;
  Term body;
};
struct Reset0 {
  Term body;
};
/// `[c]body`
struct CApp {
  Coercion coercion;
  Term body;
};
struct Unit {};
}  // namespace term

struct TermNode {
  std::variant<term::Free, term::Bound, term::Lam, term::App, term::Fix, term::Const, term::Prim,
               term::Shift0, term::Reset0, term::CApp, term::Unit>
      v;
};

template <class T>
const T* Term::as() const {
  return std::get_if<T>(&node_->v);
}

Term make_term(TermNode n);

// Raw constructors. Bodies are given in index form.
Term free_var(std::string name);
Term bound_var(std::uint32_t index);
Term lam_raw(std::string hint, Term body);
Term fix_raw(std::string fun_hint, std::string arg_hint, Term body);
Term shift0_raw(std::string hint, Term body);
Term app(Term fun, Term arg);
Term app(Term fun, Term arg1, Term arg2);
Term nat_const(std::uint64_t n);
Term prim(PrimOp op, Term lhs, Term rhs);
Term reset0(Term body);
Term capp(Coercion c, Term body);
Term unit_value();

// Named constructors: the body mentions the binder as a free name, which is
// abstracted away.
Term lam(const std::string& x, const Term& body);
Term fix(const std::string& f, const std::string& x, const Term& body);
Term shift0(const std::string& k, const Term& body);

/// Replace index 0 (relative to the top of `body`) with a locally closed term.
Term open(const Term& body, const Term& value);
/// Fix bodies: index 1 := outer, index 0 := inner.
Term open2(const Term& body, const Term& outer, const Term& inner);
/// Abstract the free name x as index 0.
Term close(const Term& e, const std::string& x);
Term close2(const Term& e, const std::string& outer, const std::string& inner);

/// Capture-avoiding substitution of a closed term for a free name.
Term subst(const Term& e, const std::string& x, const Term& v);

bool alpha_eq(const Term& a, const Term& b);
std::set<std::string> free_names(const Term& e);
/// Free names plus every binder hint.
std::set<std::string> all_names(const Term& e);
bool is_closed(const Term& e);
bool is_value(const Term& e);
std::size_t term_size(const Term& e);
bool contains_coercion(const Term& e);

enum class Fragment { SourceStlc, SourceEff, Target };
bool in_fragment(const Term& e, Fragment f);

/// A name based on `hint` that is not in `avoid`.
std::string fresh_name(const std::string& hint, const std::set<std::string>& avoid);

}  // namespace coh
