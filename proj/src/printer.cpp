//===-- printer.cpp - MiniC pretty-printer --------------------------------===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//
//
// Output re-parses to an isomorphic AST. Parentheses are emitted only where
// C precedence requires them.
//
//===----------------------------------------------------------------------===//

#include "labelcov/minic.hpp"

#include <sstream>

namespace labelcov {

namespace {

constexpr int kUnaryPrec = 7;
constexpr int kPrimaryPrec = 8;

int precedence(BinOp op) {
  switch (op) {
  case BinOp::Or: return 1;
  case BinOp::And: return 2;
  case BinOp::Eq:
  case BinOp::Ne: return 3;
  case BinOp::Lt:
  case BinOp::Le:
  case BinOp::Gt:
  case BinOp::Ge: return 4;
  case BinOp::Add:
  case BinOp::Sub: return 5;
  default: return 6;
  }
}

int precedence(const Expr &e) {
  if (const auto *b = e.as<Binary>())
    return precedence(b->op);
  if (e.as<Unary>())
    return kUnaryPrec;
  if (const auto *lit = e.as<IntLit>(); lit && lit->value < 0)
    return kUnaryPrec;
  return kPrimaryPrec;
}

void emit(std::ostream &os, const Expr &e, int ctx);

void emit_wrapped(std::ostream &os, const Expr &e, int ctx) {
  bool paren = precedence(e) < ctx;
  if (paren)
    os << '(';
  emit(os, e, paren ? 0 : ctx);
  if (paren)
    os << ')';
}

void emit(std::ostream &os, const Expr &e, int) {
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          os << n.value;
        } else if constexpr (std::is_same_v<T, VarRef>) {
          os << n.name;
        } else if constexpr (std::is_same_v<T, NondetRef>) {
          os << "__" << n.name;
        } else if constexpr (std::is_same_v<T, IndexRef>) {
          os << n.name << '[';
          emit(os, *n.index, 0);
          os << ']';
        } else if constexpr (std::is_same_v<T, AbsCall>) {
          os << "abs(";
          emit(os, *n.operand, 0);
          os << ')';
        } else if constexpr (std::is_same_v<T, CallExpr>) {
          os << n.callee << '(';
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i)
              os << ", ";
            emit(os, *n.args[i], 0);
          }
          os << ')';
        } else if constexpr (std::is_same_v<T, Unary>) {
          os << spelling(n.op);
          // `-5` would re-parse as a literal, and `--` is not a token, so
          // negated literals and nested unaries keep their parentheses.
          const auto *lit = n.operand->template as<IntLit>();
          if (n.op == UnOp::Neg && lit && lit->value >= 0)
            os << '(' << lit->value << ')';
          else
            emit_wrapped(os, *n.operand, kUnaryPrec + 1);
        } else if constexpr (std::is_same_v<T, Binary>) {
          int p = precedence(n.op);
          emit_wrapped(os, *n.lhs, p);
          os << ' ' << spelling(n.op) << ' ';
          emit_wrapped(os, *n.rhs, p + 1);
        }
      },
      e.node);
}

class Printer {
public:
  explicit Printer(std::ostream &os) : os_(os) {}

  void program(const Program &p) {
    for (std::size_t i = 0; i < p.functions.size(); ++i) {
      if (i)
        os_ << '\n';
      function(p.functions[i]);
    }
  }

private:
  std::ostream &os_;
  int depth_ = 0;

  void indent() {
    for (int i = 0; i < depth_; ++i)
      os_ << "  ";
  }

  void function(const FunctionDef &f) {
    os_ << "int " << f.name << '(';
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i)
        os_ << ", ";
      os_ << "int " << f.params[i].name;
      if (f.params[i].type.is_array())
        os_ << '[' << f.params[i].type.length << ']';
    }
    os_ << ") ";
    braced(f.body);
    os_ << '\n';
  }

  void braced(const Block &b) {
    os_ << "{\n";
    ++depth_;
    for (const auto &s : b.stmts)
      stmt(*s);
    --depth_;
    indent();
    os_ << '}';
  }

  static bool only_labels(const Block &b) {
    for (const auto &s : b.stmts)
      if (!s->as<LabelStmt>())
        return false;
    return true;
  }

  void line_end() { os_ << '\n'; }

  void stmt(const Stmt &s) {
    std::visit(
        [&](const auto &n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, While>) {
            if (only_labels(n.head))
              for (const auto &l : n.head.stmts)
                stmt(*l);
            indent();
            os_ << "while (" << print(*n.cond) << ") {\n";
            ++depth_;
            if (!only_labels(n.head)) {
              indent();
              os_ << "__head ";
              braced(n.head);
              line_end();
            }
            for (const auto &b : n.body.stmts)
              stmt(*b);
            --depth_;
            indent();
            os_ << "}\n";
            return;
          }
          indent();
          if constexpr (std::is_same_v<T, Decl>) {
            os_ << "int " << n.name;
            if (n.type.is_array())
              os_ << '[' << n.type.length << ']';
            if (n.init)
              os_ << " = " << print(*n.init);
            os_ << ";\n";
          } else if constexpr (std::is_same_v<T, Assign>) {
            os_ << n.name;
            if (n.index)
              os_ << '[' << print(*n.index) << ']';
            os_ << " = " << print(*n.value) << ";\n";
          } else if constexpr (std::is_same_v<T, If>) {
            os_ << "if (" << print(*n.cond) << ") ";
            braced(n.then_block);
            if (n.else_block) {
              os_ << " else ";
              braced(*n.else_block);
            }
            line_end();
          } else if constexpr (std::is_same_v<T, Return>) {
            os_ << "return";
            if (n.value)
              os_ << ' ' << print(*n.value);
            os_ << ";\n";
          } else if constexpr (std::is_same_v<T, Block>) {
            braced(n);
            line_end();
          } else if constexpr (std::is_same_v<T, LabelStmt>) {
            os_ << "// label " << n.id << ": " << print(*n.predicate) << '\n';
          } else if constexpr (std::is_same_v<T, Nop>) {
            os_ << "__nop();\n";
          } else if constexpr (std::is_same_v<T, Assert>) {
            os_ << "__assert(" << print(*n.cond) << ");\n";
          } else if constexpr (std::is_same_v<T, SilentExit>) {
            os_ << "__silent_exit();\n";
          } else if constexpr (std::is_same_v<T, NondetGuard>) {
            os_ << "if (__nondet_" << n.id << ") ";
            braced(n.body);
            line_end();
          } else if constexpr (std::is_same_v<T, CoveredGuard>) {
            os_ << "if (!__covered(" << n.id << ")) ";
            braced(n.body);
            line_end();
          } else if constexpr (std::is_same_v<T, SetCovered>) {
            os_ << "__set_covered(" << n.id << ");\n";
          }
        },
        s.node);
  }
};

} // namespace

std::string print(const Expr &e) {
  std::ostringstream os;
  emit_wrapped(os, e, 0);
  return os.str();
}

std::string print(const Program &p) {
  std::ostringstream os;
  Printer(os).program(p);
  return os.str();
}

} // namespace labelcov
