//===-- criteria.hpp - Coverage label annotation ----------------*- C++ -*-===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//
//
// Turns a coverage criterion into labels: predicates attached to program
// points. The annotated program carries them as LabelStmt nodes.
//
//===----------------------------------------------------------------------===//

#ifndef LABELCOV_CRITERIA_HPP
#define LABELCOV_CRITERIA_HPP

#include "labelcov/ast.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace labelcov {

enum class WmOp { ABS, AOR, ROR, COR };

const char *to_string(WmOp op);

struct CriterionTag {
  enum class Kind { DC, CC, MCC, WM, LIMIT, CUSTOM };

  Kind kind = Kind::DC;
  /// WM operators, kept in ABS, AOR, ROR, COR order.
  std::vector<WmOp> ops;
  /// LIMIT distance.
  unsigned limit = 0;

  static CriterionTag dc() { return {Kind::DC, {}, 0}; }
  static CriterionTag cc() { return {Kind::CC, {}, 0}; }
  static CriterionTag mcc() { return {Kind::MCC, {}, 0}; }
  static CriterionTag wm(std::vector<WmOp> ops);
  static CriterionTag limit_n(unsigned n) { return {Kind::LIMIT, {}, n}; }
  static CriterionTag custom() { return {Kind::CUSTOM, {}, 0}; }

  /// Renders as `DC`, `WM:ABS,AOR`, `LIMIT:0`, ...
  std::string str() const;

  friend bool operator==(const CriterionTag &, const CriterionTag &) = default;
};

/// Parses `DC | CC | MCC | WM:ops | LIMIT:N` (case-insensitive). Throws
/// UnsupportedCriterion.
CriterionTag parse_criterion(std::string_view spec);

struct Label {
  int id = 0;
  /// Location of the statement the label qualifies.
  Location loc;
  ExprPtr predicate;
  CriterionTag criterion;
  std::string note;
};

struct AnnotatedProgram {
  Program program;
  std::vector<Label> labels; // ids 1..K in order
  CriterionTag criterion;

  const Label *find(int id) const;
};

struct AnnotateOptions {
  std::size_t mcc_atom_cap = 6;
};

/// Atomic conditions of a decision: the maximal subexpressions that are not
/// `&&`, `||` or `!`, left to right.
std::vector<ExprPtr> atoms(const ExprPtr &decision);

AnnotatedProgram annotate(const Program &p, const CriterionTag &c,
                          const AnnotateOptions &opts = {});

/// Removes every LabelStmt.
Program strip(const AnnotatedProgram &ap);
Program strip(const Program &p);

/// Adds a CUSTOM label immediately before the statement at `loc` (matched by
/// line and column). Throws BadLocation or ScopeError.
AnnotatedProgram add_custom_label(const AnnotatedProgram &ap, Location loc,
                                  ExprPtr predicate);

/// One `id<TAB>line:col<TAB>criterion<TAB>predicate<TAB>note` line per label.
std::string label_table(const AnnotatedProgram &ap);

/// The annotated source with `// label <id>: <predicate>` comment lines.
std::string print_annotated(const AnnotatedProgram &ap);

} // namespace labelcov

#endif // LABELCOV_CRITERIA_HPP
