//===-- ast.cpp - MiniC abstract syntax -----------------------------------===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//

#include "labelcov/ast.hpp"
#include "labelcov/error.hpp"

#include <algorithm>

namespace labelcov {

std::string Location::str() const {
  return std::to_string(line) + ":" + std::to_string(column);
}

const char *spelling(UnOp op) { return op == UnOp::Neg ? "-" : "!"; }

const char *spelling(BinOp op) {
  switch (op) {
  case BinOp::Add: return "+";
  case BinOp::Sub: return "-";
  case BinOp::Mul: return "*";
  case BinOp::Div: return "/";
  case BinOp::Mod: return "%";
  case BinOp::Lt: return "<";
  case BinOp::Le: return "<=";
  case BinOp::Gt: return ">";
  case BinOp::Ge: return ">=";
  case BinOp::Eq: return "==";
  case BinOp::Ne: return "!=";
  case BinOp::And: return "&&";
  case BinOp::Or: return "||";
  }
  return "?";
}

bool is_arithmetic(BinOp op) {
  return op == BinOp::Add || op == BinOp::Sub || op == BinOp::Mul ||
         op == BinOp::Div || op == BinOp::Mod;
}

bool is_relational(BinOp op) {
  return op == BinOp::Lt || op == BinOp::Le || op == BinOp::Gt ||
         op == BinOp::Ge || op == BinOp::Eq || op == BinOp::Ne;
}

bool is_logical(BinOp op) { return op == BinOp::And || op == BinOp::Or; }

namespace {
template <class T> ExprPtr mk(T node, Location loc) {
  return std::make_shared<const Expr>(Expr{loc, std::move(node)});
}
} // namespace

ExprPtr make_int(Int v, Location loc) { return mk(IntLit{std::move(v)}, loc); }
ExprPtr make_var(std::string name, Location loc) {
  return mk(VarRef{std::move(name)}, loc);
}
ExprPtr make_index(std::string name, ExprPtr index, Location loc) {
  return mk(IndexRef{std::move(name), std::move(index)}, loc);
}
ExprPtr make_unary(UnOp op, ExprPtr e, Location loc) {
  return mk(Unary{op, std::move(e)}, loc);
}
ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r, Location loc) {
  return mk(Binary{op, std::move(l), std::move(r)}, loc);
}
ExprPtr make_abs(ExprPtr e, Location loc) {
  return mk(AbsCall{std::move(e)}, loc);
}
ExprPtr make_call(std::string callee, std::vector<ExprPtr> args,
                  Location loc) {
  return mk(CallExpr{std::move(callee), std::move(args)}, loc);
}

const FunctionDef *Program::find(const std::string &name) const {
  for (const auto &f : functions)
    if (f.name == name)
      return &f;
  return nullptr;
}

const FunctionDef &Program::entry_function() const {
  if (const auto *f = find(entry))
    return *f;
  throw Error(ErrorKind::UnknownEntry, "no entry function '" + entry + "'");
}

namespace {

std::uint32_t max_seq(const Expr &e) {
  std::uint32_t m = e.loc.seq;
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IndexRef>)
          m = std::max(m, max_seq(*n.index));
        else if constexpr (std::is_same_v<T, Unary> ||
                           std::is_same_v<T, AbsCall>)
          m = std::max(m, max_seq(*n.operand));
        else if constexpr (std::is_same_v<T, Binary>)
          m = std::max({m, max_seq(*n.lhs), max_seq(*n.rhs)});
        else if constexpr (std::is_same_v<T, CallExpr>)
          for (const auto &a : n.args)
            m = std::max(m, max_seq(*a));
      },
      e.node);
  return m;
}

std::uint32_t max_seq_of(const ExprPtr &e) { return e ? max_seq(*e) : 0; }

} // namespace

std::uint32_t Program::max_seq() const {
  std::uint32_t m = 0;
  for (const auto &f : functions) {
    m = std::max(m, f.loc.seq);
    for (const auto &p : f.params)
      m = std::max(m, p.loc.seq);
  }
  for_each_stmt(*this, [&](const Stmt &s) {
    m = std::max(m, s.loc.seq);
    std::visit(
        [&](const auto &n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Decl>)
            m = std::max(m, max_seq_of(n.init));
          else if constexpr (std::is_same_v<T, Assign>)
            m = std::max({m, max_seq_of(n.index), max_seq_of(n.value)});
          else if constexpr (std::is_same_v<T, If> || std::is_same_v<T, While>)
            m = std::max(m, max_seq_of(n.cond));
          else if constexpr (std::is_same_v<T, Return>)
            m = std::max(m, max_seq_of(n.value));
          else if constexpr (std::is_same_v<T, LabelStmt>)
            m = std::max(m, max_seq_of(n.predicate));
          else if constexpr (std::is_same_v<T, Assert>)
            m = std::max(m, max_seq_of(n.cond));
        },
        s.node);
  });
  return m;
}

//===----------------------------------------------------------------------===//
// Structural equality
//===----------------------------------------------------------------------===//

namespace {

bool same_ptr(const ExprPtr &a, const ExprPtr &b) {
  if (!a || !b)
    return !a && !b;
  return same_shape(*a, *b);
}

bool same_opt_block(const std::optional<Block> &a,
                    const std::optional<Block> &b) {
  if (!a || !b)
    return !a && !b;
  return same_shape(*a, *b);
}

} // namespace

bool same_shape(const Expr &a, const Expr &b) {
  if (a.node.index() != b.node.index())
    return false;
  return std::visit(
      [&](const auto &x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto &y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, IntLit>)
          return x.value == y.value;
        else if constexpr (std::is_same_v<T, VarRef> ||
                           std::is_same_v<T, NondetRef>)
          return x.name == y.name;
        else if constexpr (std::is_same_v<T, IndexRef>)
          return x.name == y.name && same_ptr(x.index, y.index);
        else if constexpr (std::is_same_v<T, Unary>)
          return x.op == y.op && same_ptr(x.operand, y.operand);
        else if constexpr (std::is_same_v<T, AbsCall>)
          return same_ptr(x.operand, y.operand);
        else if constexpr (std::is_same_v<T, Binary>)
          return x.op == y.op && same_ptr(x.lhs, y.lhs) &&
                 same_ptr(x.rhs, y.rhs);
        else if constexpr (std::is_same_v<T, CallExpr>) {
          if (x.callee != y.callee || x.args.size() != y.args.size())
            return false;
          for (std::size_t i = 0; i < x.args.size(); ++i)
            if (!same_ptr(x.args[i], y.args[i]))
              return false;
          return true;
        }
      },
      a.node);
}

bool same_shape(const Block &a, const Block &b) {
  if (a.stmts.size() != b.stmts.size())
    return false;
  for (std::size_t i = 0; i < a.stmts.size(); ++i)
    if (!same_shape(*a.stmts[i], *b.stmts[i]))
      return false;
  return true;
}

bool same_shape(const Stmt &a, const Stmt &b) {
  if (a.node.index() != b.node.index())
    return false;
  return std::visit(
      [&](const auto &x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto &y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Decl>)
          return x.name == y.name && x.type == y.type &&
                 same_ptr(x.init, y.init);
        else if constexpr (std::is_same_v<T, Assign>)
          return x.name == y.name && same_ptr(x.index, y.index) &&
                 same_ptr(x.value, y.value);
        else if constexpr (std::is_same_v<T, If>)
          return same_ptr(x.cond, y.cond) &&
                 same_shape(x.then_block, y.then_block) &&
                 same_opt_block(x.else_block, y.else_block);
        else if constexpr (std::is_same_v<T, While>)
          return same_ptr(x.cond, y.cond) && same_shape(x.body, y.body) &&
                 same_shape(x.head, y.head);
        else if constexpr (std::is_same_v<T, Return>)
          return same_ptr(x.value, y.value);
        else if constexpr (std::is_same_v<T, Block>)
          return same_shape(x, y);
        else if constexpr (std::is_same_v<T, LabelStmt>)
          return x.id == y.id && same_ptr(x.predicate, y.predicate);
        else if constexpr (std::is_same_v<T, Assert>)
          return same_ptr(x.cond, y.cond);
        else if constexpr (std::is_same_v<T, NondetGuard> ||
                           std::is_same_v<T, CoveredGuard>)
          return x.id == y.id && same_shape(x.body, y.body);
        else if constexpr (std::is_same_v<T, SetCovered>)
          return x.id == y.id;
        else
          return true; // Nop, SilentExit
      },
      a.node);
}

bool same_shape(const Program &a, const Program &b) {
  if (a.entry != b.entry || a.functions.size() != b.functions.size())
    return false;
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto &f = a.functions[i];
    const auto &g = b.functions[i];
    if (f.name != g.name || f.params.size() != g.params.size())
      return false;
    for (std::size_t j = 0; j < f.params.size(); ++j)
      if (f.params[j].name != g.params[j].name ||
          f.params[j].type != g.params[j].type)
        return false;
    if (!same_shape(f.body, g.body))
      return false;
  }
  return true;
}

//===----------------------------------------------------------------------===//
// Errors
//===----------------------------------------------------------------------===//

const char *to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::SyntaxError: return "SyntaxError";
  case ErrorKind::DuplicateFunction: return "DuplicateFunction";
  case ErrorKind::UnknownEntry: return "UnknownEntry";
  case ErrorKind::InputMissing: return "InputMissing";
  case ErrorKind::AtomCapExceeded: return "AtomCapExceeded";
  case ErrorKind::UnsupportedCriterion: return "UnsupportedCriterion";
  case ErrorKind::ScopeError: return "ScopeError";
  case ErrorKind::BadLocation: return "BadLocation";
  case ErrorKind::ModeMismatch: return "ModeMismatch";
  case ErrorKind::UnboundedLoop: return "UnboundedLoop";
  case ErrorKind::BudgetExceeded: return "BudgetExceeded";
  case ErrorKind::InfeasibleHarness: return "InfeasibleHarness";
  case ErrorKind::HarnessError: return "HarnessError";
  case ErrorKind::StoreError: return "StoreError";
  case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

namespace {
std::string render(ErrorKind kind, const std::string &message,
                   const std::optional<Location> &loc) {
  std::string out;
  if (loc)
    out += loc->str() + ": ";
  out += to_string(kind);
  out += ": ";
  out += message;
  return out;
}
} // namespace

Error::Error(ErrorKind kind, const std::string &message,
             std::optional<Location> loc)
    : std::runtime_error(render(kind, message, loc)), kind_(kind), loc_(loc),
      message_(message) {}

} // namespace labelcov
