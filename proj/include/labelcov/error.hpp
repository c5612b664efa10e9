//===-- error.hpp - Diagnostics raised by the toolkit -----------*- C++ -*-===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//

#ifndef LABELCOV_ERROR_HPP
#define LABELCOV_ERROR_HPP

#include "labelcov/ast.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace labelcov {

enum class ErrorKind {
  SyntaxError,
  DuplicateFunction,
  UnknownEntry,
  InputMissing,
  AtomCapExceeded,
  UnsupportedCriterion,
  ScopeError,
  BadLocation,
  ModeMismatch,
  UnboundedLoop,
  BudgetExceeded,
  InfeasibleHarness,
  HarnessError,
  StoreError,
  IoError,
};

const char *to_string(ErrorKind kind);

/// Base of every diagnostic thrown by labelcov. Carries an optional source
/// location which is rendered as `line:col` in front of the message.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message,
        std::optional<Location> loc = std::nullopt);

  ErrorKind kind() const { return kind_; }
  const std::optional<Location> &location() const { return loc_; }
  const std::string &message() const { return message_; }

private:
  ErrorKind kind_;
  std::optional<Location> loc_;
  std::string message_;
};

} // namespace labelcov

#endif // LABELCOV_ERROR_HPP
