#pragma once

// Concrete ASCII syntax for terms, types, coercions and derivation skeletons.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coh/derivation.hpp"
#include "coh/syntax.hpp"

namespace coh {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, std::vector<std::string> expected, std::string found);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> expected_;
  std::string found_;
};

enum class TypeSyntax { SourceStlc, SourceEff, Target };

Term parse_term(std::string_view text, Fragment fragment);
Type parse_type(std::string_view text, TypeSyntax syntax);
Coercion parse_coercion(std::string_view text);
Skeleton parse_skeleton(std::string_view text);

/// Reads `name : type` lines; blank lines and `#` comments are skipped.
Env parse_env(std::string_view text, TypeSyntax syntax);

std::string print(const Term& e);
std::string print(const Type& t);
std::string print(const Coercion& c);
std::string print(const Skeleton& s);

}  // namespace coh
