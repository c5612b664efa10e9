//===-- minic.hpp - MiniC front-end and concrete interpreter ----*- C++ -*-===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//
//
// Parsing, pretty-printing, static checks and the reference interpreter.
// The interpreter doubles as the replayer's execution engine and as the
// oracle against which the symbolic explorer is checked.
//
//===----------------------------------------------------------------------===//

#ifndef LABELCOV_MINIC_HPP
#define LABELCOV_MINIC_HPP

#include "labelcov/ast.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace labelcov {

//===----------------------------------------------------------------------===//
// Parsing and printing
//===----------------------------------------------------------------------===//

/// Parses MiniC source. When `entry` is empty the last function defined is
/// the entry point.
Program parse(std::string_view source, const std::string &entry = "");

std::string print(const Expr &e);
std::string print(const Program &p);

//===----------------------------------------------------------------------===//
// Static checks
//===----------------------------------------------------------------------===//

enum class DiagKind {
  UndeclaredVariable,
  Redeclaration,
  DuplicateParameter,
  UnknownFunction,
  ArityMismatch,
  RecursionForbidden,
  NonPositiveArrayLength,
  TypeMismatch,
  MissingReturn,
  VoidValueUsed,
  NondetOutsideGuard,
  CallInExpression,
};

const char *to_string(DiagKind kind);

struct Diagnostic {
  DiagKind kind;
  Location loc;
  std::string message;
};

std::vector<Diagnostic> typecheck(const Program &p);

//===----------------------------------------------------------------------===//
// Concrete execution
//===----------------------------------------------------------------------===//

enum class RteKind { DivByZero, ModByZero, IndexOutOfBounds };
const char *to_string(RteKind kind);

namespace outcome {
struct Returned {
  std::optional<Int> value;
};
struct RuntimeError {
  RteKind kind;
  Location loc;
};
struct SilentExited {};
struct AssertFailed {
  Location loc;
  int label_id = 0;
};
struct StepLimit {};
} // namespace outcome

using Outcome =
    std::variant<outcome::Returned, outcome::RuntimeError,
                 outcome::SilentExited, outcome::AssertFailed,
                 outcome::StepLimit>;

/// One evaluation of an atomic condition of original (non-synthetic) code.
struct BranchEdge {
  Location loc;
  bool taken;
  friend bool operator==(const BranchEdge &, const BranchEdge &) = default;
};

struct LabelEvent {
  int label_id;
  bool truth;
  friend bool operator==(const LabelEvent &, const LabelEvent &) = default;
};

struct ExecResult {
  Outcome outcome;
  std::vector<Location> visited;
  /// Atom-level edges, in evaluation order.
  std::vector<BranchEdge> edges;
  /// Whole-decision outcomes of if/while statements, keyed by the
  /// statement's location.
  std::vector<BranchEdge> decisions;
  std::vector<LabelEvent> label_events;
  std::size_t steps = 0;

  bool returned() const {
    return std::holds_alternative<outcome::Returned>(outcome);
  }
};

/// Receives (label id, predicate truth) at every LabelStmt, and (id, true)
/// at every executed `__set_covered(id)`.
using LabelHook = std::function<void(int, bool)>;

/// Input values keyed by parameter name. `nondet_<id>` entries select the
/// visit (1-based) at which NondetGuard `id` is taken; absent means never.
using Inputs = std::map<std::string, Value>;

constexpr std::size_t kDefaultStepLimit = 1'000'000;

ExecResult interpret(const Program &p, const Inputs &input,
                     const LabelHook &hook = {},
                     std::size_t step_limit = kDefaultStepLimit);

/// Result of evaluating a side-effect-free expression: a value or the runtime
/// error that prevented one.
struct EvalResult {
  std::optional<Int> value;
  RteKind error = RteKind::DivByZero;

  bool ok() const { return value.has_value(); }
};

/// Evaluates a call-free expression against a variable environment.
EvalResult evaluate(const Expr &e, const std::map<std::string, Value> &env);

/// Truth of a label predicate; runtime errors make it false.
bool guarded_truth(const Expr &e, const std::map<std::string, Value> &env);

} // namespace labelcov

#endif // LABELCOV_MINIC_HPP
