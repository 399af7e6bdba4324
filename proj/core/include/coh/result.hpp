#pragma once

#include <cassert>
#include <string>
#include <utility>
#include <variant>

namespace coh {

enum class ErrorKind {
  UnboundVariable,
  NoDerivation,
  InvalidDerivation,
  Underdetermined,
  BudgetExhausted,
  IllTyped,
  IllFormed,
};

struct Diagnostic {
  ErrorKind kind = ErrorKind::NoDerivation;
  std::string message;
  // Slash-separated child indices from the root of a derivation, e.g. "0/1".
  std::string path;
};

/// A value or the diagnostic explaining why there is none.
template <class T>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Result(Diagnostic d) : v_(std::move(d)) {}  // NOLINT(google-explicit-constructor)

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    assert(ok());
    return std::get<0>(v_);
  }
  T&& value() && {
    assert(ok());
    return std::get<0>(std::move(v_));
  }
  const T& operator*() const& { return value(); }
  const T* operator->() const { return &value(); }

  const Diagnostic& error() const {
    assert(!ok());
    return std::get<1>(v_);
  }

 private:
  std::variant<T, Diagnostic> v_;
};

inline Diagnostic make_error(ErrorKind kind, std::string message, std::string path = {}) {
  return Diagnostic{kind, std::move(message), std::move(path)};
}

}  // namespace coh
