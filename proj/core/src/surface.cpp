#include "coh/surface.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>

namespace coh {

namespace {

std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) out += i + 1 == expected.size() ? " or " : ", ";
    out += expected[i];
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, std::vector<std::string> expected, std::string found)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": expected " +
                         join_expected(expected) + ", found " + found),
      line_(line),
      column_(column),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  Ident,
  Nat,
  String,
  Backslash,
  Dot,
  LParen,
  RParen,
  LAngle,
  RAngle,
  LBracket,
  RBracket,
  Comma,
  Plus,
  Star,
  Arrow,
  At,
  Colon,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::vector<Token> lex(std::string_view src, std::size_t line0 = 1, std::size_t col0 = 1) {
  std::vector<Token> out;
  std::size_t line = line0, col = col0, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto single = [](char c) -> std::optional<Tok> {
    switch (c) {
      case '\\': return Tok::Backslash;
      case '.': return Tok::Dot;
      case '(': return Tok::LParen;
      case ')': return Tok::RParen;
      case '<': return Tok::LAngle;
      case '>': return Tok::RAngle;
      case '[': return Tok::LBracket;
      case ']': return Tok::RBracket;
      case ',': return Tok::Comma;
      case '+': return Tok::Plus;
      case '*': return Tok::Star;
      case '@': return Tok::At;
      case ':': return Tok::Colon;
      default: return std::nullopt;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t{Tok::End, {}, line, col};
    std::size_t start = i;
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < src.size()) {
        if (ident_char(src[j])) {
          ++j;
        } else if (src[j] == '-' && j + 1 < src.size() && std::isalpha(static_cast<unsigned char>(src[j + 1]))) {
          j += 2;  // rule names such as T-Var
        } else {
          break;
        }
      }
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(start, j - start));
      advance(j - start);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Nat;
      t.text = std::string(src.substr(start, j - start));
      advance(j - start);
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"') ++j;
      if (j == src.size()) throw ParseError(line, col, {"closing '\"'"}, "end of input");
      t.kind = Tok::String;
      t.text = std::string(src.substr(i + 1, j - i - 1));
      advance(j + 1 - start);
    } else if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      t.kind = Tok::Arrow;
      t.text = "->";
      advance(2);
    } else if (auto k = single(c)) {
      t.kind = *k;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(line, col, {"a token"}, std::string("'") + c + "'");
    }
    out.push_back(std::move(t));
  }
  out.push_back(Token{Tok::End, {}, line, col});
  return out;
}

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw{"fix", "S0", "id", "top", "lift", "o", "nat", "unit"};
  return kw.contains(s);
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.line, t.column, std::move(expected), std::move(found));
  }

  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }

  Token expect(Tok k, const char* what) {
    if (!at(k)) fail({what});
    return next();
  }
  void expect_word(const char* w) {
    if (!at_word(w)) fail({std::string("'") + w + "'"});
    next();
  }
  void expect_end() {
    if (!at(Tok::End)) fail({"end of input"});
  }

  // -- terms --------------------------------------------------------------

  Fragment fragment = Fragment::Target;

  bool control_allowed() const { return fragment == Fragment::SourceEff; }
  bool coercions_allowed() const { return fragment == Fragment::Target; }

  std::string binder() {
    if (!at(Tok::Ident) || is_keyword(peek().text)) fail({"identifier"});
    return next().text;
  }

  Term term() {
    if (at(Tok::Backslash)) {
      next();
      auto x = binder();
      expect(Tok::Dot, "'.'");
      scope_.push_back(x);
      auto body = term();
      scope_.pop_back();
      return lam_raw(x, body);
    }
    if (at_word("fix")) {
      next();
      auto f = binder();
      auto x = binder();
      expect(Tok::Dot, "'.'");
      scope_.push_back(f);
      scope_.push_back(x);
      auto body = term();
      scope_.pop_back();
      scope_.pop_back();
      return fix_raw(f, x, body);
    }
    if (at_word("S0")) {
      if (!control_allowed()) fail({"term"});
      next();
      auto k = binder();
      expect(Tok::Dot, "'.'");
      scope_.push_back(k);
      auto body = term();
      scope_.pop_back();
      return shift0_raw(k, body);
    }
    return sum();
  }

  Term sum() {
    Term lhs = app_term();
    while (at(Tok::Plus) || at(Tok::Star)) {
      PrimOp op = next().kind == Tok::Plus ? PrimOp::Add : PrimOp::Mul;
      lhs = prim(op, lhs, app_term());
    }
    return lhs;
  }

  bool starts_aterm() const {
    switch (peek().kind) {
      case Tok::Ident:
        return !is_keyword(peek().text);
      case Tok::Nat:
      case Tok::LParen:
        return true;
      case Tok::LAngle:
        return control_allowed();
      case Tok::LBracket:
        return coercions_allowed();
      default:
        return false;
    }
  }

  Term app_term() {
    Term f = aterm();
    while (starts_aterm()) f = app(f, aterm());
    return f;
  }

  Term variable(const std::string& name) {
    for (std::size_t i = scope_.size(); i-- > 0;) {
      if (scope_[i] == name) return bound_var(static_cast<std::uint32_t>(scope_.size() - 1 - i));
    }
    return free_var(name);
  }

  Term aterm() {
    if (!starts_aterm()) {
      std::vector<std::string> exp{"identifier", "natural number", "'('"};
      if (control_allowed()) exp.push_back("'<'");
      if (coercions_allowed()) exp.push_back("'['");
      fail(exp);
    }
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident:
        return variable(next().text);
      case Tok::Nat: {
        auto tok = next();
        std::uint64_t n = 0;
        auto [p, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), n);
        if (ec != std::errc{}) throw ParseError(tok.line, tok.column, {"natural number below 2^64"}, tok.text);
        return nat_const(n);
      }
      case Tok::LAngle: {
        next();
        auto body = term();
        expect(Tok::RAngle, "'>'");
        return reset0(body);
      }
      case Tok::LBracket: {
        next();
        auto c = coercion();
        expect(Tok::RBracket, "']'");
        return capp(c, aterm());
      }
      default: {  // LParen
        next();
        if (at(Tok::RParen)) {
          if (!coercions_allowed()) fail({"term"});
          next();
          return unit_value();
        }
        auto e = term();
        expect(Tok::RParen, "')'");
        return e;
      }
    }
  }

  // -- coercions ----------------------------------------------------------

  Coercion coercion() {
    Coercion lhs = crc2();
    if (at_word("o")) {
      next();
      return Coercion::comp(lhs, coercion());
    }
    return lhs;
  }

  Coercion crc2() {
    Coercion lhs = crc1();
    if (at(Tok::Arrow)) {
      next();
      return Coercion::arrow(lhs, crc2());
    }
    return lhs;
  }

  Coercion crc1() {
    if (at_word("id")) {
      next();
      return Coercion::id();
    }
    if (at_word("top")) {
      next();
      return Coercion::top();
    }
    if (at_word("lift")) {
      next();
      return Coercion::lift(crc1());
    }
    if (at(Tok::LParen)) {
      next();
      Coercion c = coercion();
      if (at(Tok::Comma)) {
        next();
        Coercion c1 = coercion();
        expect(Tok::Comma, "','");
        Coercion c2 = coercion();
        expect(Tok::RParen, "')'");
        return Coercion::cons(c, c1, c2);
      }
      expect(Tok::RParen, "')' or ','");
      return c;
    }
    fail({"'id'", "'top'", "'lift'", "'('"});
  }

  // -- types --------------------------------------------------------------

  TypeSyntax type_syntax = TypeSyntax::Target;
  // Skeleton annotations may mention any type former; replay judges them.
  bool any_type = false;

  Type type() {
    const Token start = peek();
    Type lhs = atype();
    if (at(Tok::Arrow)) {
      if (type_syntax != TypeSyntax::SourceStlc && !lhs.is_pure())
        throw ParseError(start.line, start.column, {"pure argument type"}, "'" + print(lhs) + "'");
      next();
      return Type::arrow(lhs, type());
    }
    return lhs;
  }

  Type atype() {
    if (at_word("nat")) {
      next();
      return Type::nat();
    }
    if (at_word("top") && (any_type || type_syntax == TypeSyntax::SourceStlc)) {
      next();
      return Type::top();
    }
    if (at_word("unit") && (any_type || type_syntax == TypeSyntax::Target)) {
      next();
      return Type::unit();
    }
    if (at(Tok::LBracket) && (any_type || type_syntax != TypeSyntax::SourceStlc)) {
      next();
      const Token start = peek();
      Type carrier = type();
      if (!carrier.is_pure())
        throw ParseError(start.line, start.column, {"pure carrier type"}, "'" + print(carrier) + "'");
      expect(Tok::Comma, "','");
      Type answer = type();
      expect(Tok::Comma, "','");
      Type rest = type();
      expect(Tok::RBracket, "']'");
      return Type::eff(carrier, answer, rest);
    }
    if (at(Tok::LParen)) {
      next();
      Type t = type();
      expect(Tok::RParen, "')'");
      return t;
    }
    std::vector<std::string> exp{"'nat'"};
    if (type_syntax == TypeSyntax::SourceStlc) exp.push_back("'top'");
    if (type_syntax == TypeSyntax::Target) exp.push_back("'unit'");
    if (type_syntax != TypeSyntax::SourceStlc) exp.push_back("'['");
    exp.push_back("'('");
    fail(exp);
  }

  // -- skeletons ----------------------------------------------------------

  Skeleton skeleton() {
    expect(Tok::LParen, "'('");
    if (!at(Tok::Ident)) fail({"rule name"});
    const Token name = peek();
    auto rule = rule_from_name(name.text);
    if (!rule) fail({"rule name"});
    next();
    Skeleton s;
    s.rule = *rule;
    while (at(Tok::LParen)) s.children.push_back(skeleton());
    if (at(Tok::At)) {
      next();
      if (!at(Tok::String)) fail({"quoted type"});
      const Token str = next();
      // Column of the first character inside the quotes.
      Parser inner(lex(str.text, str.line, str.column + 1));
      inner.any_type = true;
      s.annotation = inner.type();
      inner.expect_end();
    }
    if (s.children.size() != rule_arity(*rule)) {
      throw ParseError(name.line, name.column,
                       {std::to_string(rule_arity(*rule)) + " premise(s) for " + name.text},
                       std::to_string(s.children.size()));
    }
    expect(Tok::RParen, "')'");
    return s;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> scope_;
};

// ---------------------------------------------------------------------------
// Printer

enum class Level { Term = 0, Sum = 1, App = 2, Atom = 3 };

class TermPrinter {
 public:
  std::string run(const Term& e) {
    print(e, Level::Term);
    return out_.str();
  }

 private:
  std::ostringstream out_;
  std::vector<std::string> names_;  // innermost binder last

  // Names the body may refer to from outside itself: free names and the
  // names of enclosing binders it references.
  void referenced(const Term& body, std::uint32_t depth, std::set<std::string>& acc) const {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, term::Free>) {
            acc.insert(n.name);
          } else if constexpr (std::is_same_v<N, term::Bound>) {
            if (n.index >= depth) {
              std::size_t outer = n.index - depth;
              if (outer < names_.size()) acc.insert(names_[names_.size() - 1 - outer]);
            }
          } else if constexpr (std::is_same_v<N, term::Lam> || std::is_same_v<N, term::Shift0>) {
            referenced(n.body, depth + 1, acc);
          } else if constexpr (std::is_same_v<N, term::Fix>) {
            referenced(n.body, depth + 2, acc);
          } else if constexpr (std::is_same_v<N, term::App>) {
            referenced(n.fun, depth, acc);
            referenced(n.arg, depth, acc);
          } else if constexpr (std::is_same_v<N, term::Prim>) {
            referenced(n.lhs, depth, acc);
            referenced(n.rhs, depth, acc);
          } else if constexpr (std::is_same_v<N, term::Reset0> || std::is_same_v<N, term::CApp>) {
            referenced(n.body, depth, acc);
          }
        },
        body.node().v);
  }

  std::string choose(const std::string& hint, const std::set<std::string>& avoid) const {
    std::string base = hint.empty() || is_keyword(hint) ? "x" : hint;
    return fresh_name(base, avoid);
  }

  void open_paren(bool p) {
    if (p) out_ << '(';
  }
  void close_paren(bool p) {
    if (p) out_ << ')';
  }

  void print(const Term& e, Level ctx) {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, term::Free>) {
            out_ << n.name;
          } else if constexpr (std::is_same_v<N, term::Bound>) {
            if (n.index < names_.size()) {
              out_ << names_[names_.size() - 1 - n.index];
            } else {
              out_ << "#" << n.index;  // dangling index; never produced by well-formed terms
            }
          } else if constexpr (std::is_same_v<N, term::Const>) {
            out_ << n.value;
          } else if constexpr (std::is_same_v<N, term::Unit>) {
            out_ << "()";
          } else if constexpr (std::is_same_v<N, term::Lam> || std::is_same_v<N, term::Shift0>) {
            bool p = ctx != Level::Term;
            open_paren(p);
            std::set<std::string> avoid;
            referenced(n.body, 1, avoid);
            auto x = choose(n.hint, avoid);
            out_ << (std::is_same_v<N, term::Lam> ? "\\" : "S0 ") << x << ". ";
            names_.push_back(x);
            print(n.body, Level::Term);
            names_.pop_back();
            close_paren(p);
          } else if constexpr (std::is_same_v<N, term::Fix>) {
            bool p = ctx != Level::Term;
            open_paren(p);
            std::set<std::string> avoid;
            referenced(n.body, 2, avoid);
            auto f = choose(n.fun_hint, avoid);
            avoid.insert(f);
            auto x = choose(n.arg_hint, avoid);
            out_ << "fix " << f << ' ' << x << ". ";
            names_.push_back(f);
            names_.push_back(x);
            print(n.body, Level::Term);
            names_.pop_back();
            names_.pop_back();
            close_paren(p);
          } else if constexpr (std::is_same_v<N, term::App>) {
            bool p = ctx > Level::App;
            open_paren(p);
            print(n.fun, Level::App);
            out_ << ' ';
            print(n.arg, Level::Atom);
            close_paren(p);
          } else if constexpr (std::is_same_v<N, term::Prim>) {
            bool p = ctx > Level::Sum;
            open_paren(p);
            print(n.lhs, Level::Sum);
            out_ << (n.op == PrimOp::Add ? " + " : " * ");
            print(n.rhs, Level::App);
            close_paren(p);
          } else if constexpr (std::is_same_v<N, term::Reset0>) {
            out_ << '<';
            print(n.body, Level::Term);
            out_ << '>';
          } else if constexpr (std::is_same_v<N, term::CApp>) {
            out_ << '[' << coh::print(n.coercion) << ']';
            print(n.body, Level::Atom);
          }
        },
        e.node().v);
  }
};

enum class CLevel { Comp = 0, Arrow = 1, Atom = 2 };

void print_coercion(std::ostream& out, const Coercion& c, CLevel ctx) {
  switch (c.kind()) {
    case CoercionKind::Id:
      out << "id";
      return;
    case CoercionKind::Top:
      out << "top";
      return;
    case CoercionKind::Lift:
      out << "lift ";
      print_coercion(out, c.child(0), CLevel::Atom);
      return;
    case CoercionKind::Cons:
      out << '(';
      print_coercion(out, c.child(0), CLevel::Comp);
      out << ", ";
      print_coercion(out, c.child(1), CLevel::Comp);
      out << ", ";
      print_coercion(out, c.child(2), CLevel::Comp);
      out << ')';
      return;
    case CoercionKind::Arrow: {
      bool p = ctx > CLevel::Arrow;
      if (p) out << '(';
      print_coercion(out, c.child(0), CLevel::Atom);
      out << " -> ";
      print_coercion(out, c.child(1), CLevel::Arrow);
      if (p) out << ')';
      return;
    }
    case CoercionKind::Comp: {
      bool p = ctx > CLevel::Comp;
      if (p) out << '(';
      print_coercion(out, c.child(0), CLevel::Arrow);
      out << " o ";
      print_coercion(out, c.child(1), CLevel::Comp);
      if (p) out << ')';
      return;
    }
  }
}

void print_type(std::ostream& out, const Type& t, bool atom) {
  switch (t.kind()) {
    case TypeKind::Nat:
      out << "nat";
      return;
    case TypeKind::Top:
      out << "top";
      return;
    case TypeKind::Unit:
      out << "unit";
      return;
    case TypeKind::Arrow:
      if (atom) out << '(';
      print_type(out, t.domain(), true);
      out << " -> ";
      print_type(out, t.codomain(), false);
      if (atom) out << ')';
      return;
    case TypeKind::Eff:
      out << '[';
      print_type(out, t.carrier(), false);
      out << ", ";
      print_type(out, t.answer(), false);
      out << ", ";
      print_type(out, t.rest(), false);
      out << ']';
      return;
  }
}

void print_skeleton(std::ostream& out, const Skeleton& s) {
  out << '(' << rule_name(s.rule);
  for (const auto& c : s.children) {
    out << ' ';
    print_skeleton(out, c);
  }
  if (s.annotation) out << " @ \"" << print(*s.annotation) << '"';
  out << ')';
}

}  // namespace

Term parse_term(std::string_view text, Fragment fragment) {
  Parser p(lex(text));
  p.fragment = fragment;
  Term e = p.term();
  p.expect_end();
  return e;
}

Type parse_type(std::string_view text, TypeSyntax syntax) {
  Parser p(lex(text));
  p.type_syntax = syntax;
  Type t = p.type();
  p.expect_end();
  return t;
}

Coercion parse_coercion(std::string_view text) {
  Parser p(lex(text));
  Coercion c = p.coercion();
  p.expect_end();
  return c;
}

Skeleton parse_skeleton(std::string_view text) {
  Parser p(lex(text));
  Skeleton s = p.skeleton();
  p.expect_end();
  return s;
}

Env parse_env(std::string_view text, TypeSyntax syntax) {
  Env env;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = text.substr(start, end - start);
    start = end + 1;
    Parser p(lex(line, line_no, 1));
    if (p.at(Tok::End)) continue;
    auto x = p.binder();
    p.expect(Tok::Colon, "':'");
    p.type_syntax = syntax;
    env[x] = p.type();
    p.expect_end();
  }
  return env;
}

std::string print(const Term& e) { return TermPrinter{}.run(e); }

std::string print(const Type& t) {
  std::ostringstream out;
  print_type(out, t, false);
  return out.str();
}

std::string print(const Coercion& c) {
  std::ostringstream out;
  print_coercion(out, c, CLevel::Comp);
  return out.str();
}

std::string print(const Skeleton& s) {
  std::ostringstream out;
  print_skeleton(out, s);
  return out.str();
}

}  // namespace coh
