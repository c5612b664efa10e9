//===-- ast.hpp - MiniC abstract syntax -------------------------*- C++ -*-===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//
//
// Immutable AST for MiniC. Nodes are shared through shared_ptr<const ...> so
// that annotation and instrumentation passes can rebuild only the spine they
// touch and reuse every untouched subtree.
//
//===----------------------------------------------------------------------===//

#ifndef LABELCOV_AST_HPP
#define LABELCOV_AST_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace labelcov {

/// Exact integers; MiniC arithmetic never wraps.
using Int = boost::multiprecision::cpp_int;

struct Location {
  int line = 0;
  int column = 0;
  std::uint32_t seq = 0;
  /// Set on nodes introduced by annotation or instrumentation.
  bool synthetic = false;

  std::string str() const;

  friend bool operator==(const Location &a, const Location &b) {
    return a.line == b.line && a.column == b.column && a.seq == b.seq;
  }
  friend std::strong_ordering operator<=>(const Location &a,
                                          const Location &b) {
    if (auto c = a.line <=> b.line; c != 0)
      return c;
    if (auto c = a.column <=> b.column; c != 0)
      return c;
    return a.seq <=> b.seq;
  }
};

struct Type {
  bool array_ = false;
  std::size_t length = 0;

  bool is_array() const { return array_; }
  static Type scalar() { return {}; }
  static Type array(std::size_t n) { return {true, n}; }
  friend bool operator==(const Type &, const Type &) = default;
};

//===----------------------------------------------------------------------===//
// Expressions
//===----------------------------------------------------------------------===//

enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

const char *spelling(UnOp op);
const char *spelling(BinOp op);
bool is_arithmetic(BinOp op);
bool is_relational(BinOp op);
bool is_logical(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct IntLit {
  Int value;
};
struct VarRef {
  std::string name;
};
struct IndexRef {
  std::string name;
  ExprPtr index;
};
struct Unary {
  UnOp op;
  ExprPtr operand;
};
struct Binary {
  BinOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct AbsCall {
  ExprPtr operand;
};
/// `__nondet_<id>`; only meaningful as the condition of a NondetGuard.
struct NondetRef {
  std::string name;
};
struct CallExpr {
  std::string callee;
  std::vector<ExprPtr> args;
};

struct Expr {
  Location loc;
  std::variant<IntLit, VarRef, IndexRef, Unary, Binary, AbsCall, NondetRef,
               CallExpr>
      node;

  template <class T> const T *as() const { return std::get_if<T>(&node); }
};

ExprPtr make_int(Int v, Location loc = {});
ExprPtr make_var(std::string name, Location loc = {});
ExprPtr make_index(std::string name, ExprPtr index, Location loc = {});
ExprPtr make_unary(UnOp op, ExprPtr e, Location loc = {});
ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r, Location loc = {});
ExprPtr make_abs(ExprPtr e, Location loc = {});
ExprPtr make_call(std::string callee, std::vector<ExprPtr> args,
                  Location loc = {});

//===----------------------------------------------------------------------===//
// Statements
//===----------------------------------------------------------------------===//

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Block {
  std::vector<StmtPtr> stmts;
};

struct Decl {
  std::string name;
  Type type;
  ExprPtr init; // null when absent; always null for arrays
};
struct Assign {
  std::string name;
  ExprPtr index; // null for scalar assignment
  ExprPtr value;
};
struct If {
  ExprPtr cond;
  Block then_block;
  std::optional<Block> else_block;
};
/// `head` runs before every evaluation of `cond`; it only ever holds labels
/// attached to the loop decision or their instrumented forms.
struct While {
  ExprPtr cond;
  Block body;
  Block head;
};
struct Return {
  ExprPtr value; // null for `return;`
};
struct LabelStmt {
  int id;
  ExprPtr predicate;
};
struct Nop {};
struct Assert {
  ExprPtr cond;
};
struct SilentExit {};
struct NondetGuard {
  int id;
  Block body;
};
struct CoveredGuard {
  int id;
  Block body;
};
struct SetCovered {
  int id;
};

struct Stmt {
  Location loc;
  std::variant<Decl, Assign, If, While, Return, Block, LabelStmt, Nop, Assert,
               SilentExit, NondetGuard, CoveredGuard, SetCovered>
      node;

  template <class T> const T *as() const { return std::get_if<T>(&node); }
};

template <class T> StmtPtr make_stmt(T node, Location loc = {}) {
  return std::make_shared<const Stmt>(Stmt{loc, std::move(node)});
}

//===----------------------------------------------------------------------===//
// Program
//===----------------------------------------------------------------------===//

struct Param {
  std::string name;
  Type type;
  Location loc;
};

struct FunctionDef {
  std::string name;
  std::vector<Param> params;
  Block body;
  Location loc;
};

struct Program {
  std::vector<FunctionDef> functions;
  std::string entry;

  const FunctionDef *find(const std::string &name) const;
  const FunctionDef &entry_function() const;
  /// Largest sequence number used by any node, for minting fresh locations.
  std::uint32_t max_seq() const;
};

/// A concrete MiniC value: a scalar or a fixed-length array.
using Value = std::variant<Int, std::vector<Int>>;

/// Structural equality that ignores locations.
bool same_shape(const Expr &a, const Expr &b);
bool same_shape(const Stmt &a, const Stmt &b);
bool same_shape(const Block &a, const Block &b);
bool same_shape(const Program &a, const Program &b);

/// Visits every statement (pre-order, including nested blocks and loop heads).
template <class F> void for_each_stmt(const Block &b, F &&f);

template <class F> void for_each_stmt(const Stmt &s, F &&f) {
  f(s);
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Block>) {
          for_each_stmt(n, f);
        } else if constexpr (std::is_same_v<T, If>) {
          for_each_stmt(n.then_block, f);
          if (n.else_block)
            for_each_stmt(*n.else_block, f);
        } else if constexpr (std::is_same_v<T, While>) {
          for_each_stmt(n.head, f);
          for_each_stmt(n.body, f);
        } else if constexpr (std::is_same_v<T, NondetGuard> ||
                             std::is_same_v<T, CoveredGuard>) {
          for_each_stmt(n.body, f);
        }
      },
      s.node);
}

template <class F> void for_each_stmt(const Block &b, F &&f) {
  for (const auto &s : b.stmts)
    for_each_stmt(*s, f);
}

template <class F> void for_each_stmt(const Program &p, F &&f) {
  for (const auto &fn : p.functions)
    for_each_stmt(fn.body, f);
}

} // namespace labelcov

#endif // LABELCOV_AST_HPP
