//===-- typecheck.cpp - MiniC static checks -------------------------------===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//

#include "labelcov/minic.hpp"

#include <functional>
#include <set>

namespace labelcov {

const char *to_string(DiagKind kind) {
  switch (kind) {
  case DiagKind::UndeclaredVariable: return "UndeclaredVariable";
  case DiagKind::Redeclaration: return "Redeclaration";
  case DiagKind::DuplicateParameter: return "DuplicateParameter";
  case DiagKind::UnknownFunction: return "UnknownFunction";
  case DiagKind::ArityMismatch: return "ArityMismatch";
  case DiagKind::RecursionForbidden: return "RecursionForbidden";
  case DiagKind::NonPositiveArrayLength: return "NonPositiveArrayLength";
  case DiagKind::TypeMismatch: return "TypeMismatch";
  case DiagKind::MissingReturn: return "MissingReturn";
  case DiagKind::VoidValueUsed: return "VoidValueUsed";
  case DiagKind::NondetOutsideGuard: return "NondetOutsideGuard";
  case DiagKind::CallInExpression: return "CallInExpression";
  }
  return "Diagnostic";
}

namespace {

class Checker {
public:
  explicit Checker(const Program &p) : prog_(p) {}

  std::vector<Diagnostic> run() {
    for (const auto &f : prog_.functions)
      function(f);
    recursion();
    for (const auto &f : prog_.functions)
      if (returns_void_.count(f.name) && called_.count(f.name))
        report(DiagKind::VoidValueUsed, f.loc,
               "function '" + f.name + "' is called but may return no value");
    return std::move(diags_);
  }

private:
  const Program &prog_;
  std::vector<Diagnostic> diags_;
  std::vector<std::map<std::string, Type>> scopes_;
  std::map<std::string, std::set<std::string>> calls_;
  std::set<std::string> returns_void_;
  std::set<std::string> called_;
  std::string current_;

  void report(DiagKind k, Location loc, std::string msg) {
    diags_.push_back({k, loc, std::move(msg)});
  }

  const Type *lookup(const std::string &name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (auto f = it->find(name); f != it->end())
        return &f->second;
    return nullptr;
  }

  void declare(const std::string &name, Type t, Location loc) {
    if (t.is_array() && t.length == 0)
      report(DiagKind::NonPositiveArrayLength, loc,
             "array '" + name + "' must have positive length");
    if (!scopes_.back().emplace(name, t).second)
      report(DiagKind::Redeclaration, loc, "'" + name + "' redeclared");
  }

  void function(const FunctionDef &f) {
    current_ = f.name;
    scopes_.clear();
    scopes_.emplace_back();
    std::set<std::string> seen;
    for (const auto &p : f.params) {
      if (!seen.insert(p.name).second) {
        report(DiagKind::DuplicateParameter, p.loc,
               "parameter '" + p.name + "' repeated");
        continue;
      }
      if (p.type.is_array() && p.type.length == 0)
        report(DiagKind::NonPositiveArrayLength, p.loc,
               "array '" + p.name + "' must have positive length");
      scopes_.back().emplace(p.name, p.type);
    }
    calls_[f.name];
    // Parameters and the outermost body block share one scope, as in C.
    for (const auto &s : f.body.stmts)
      stmt(*s, false);
    if (!terminates(f.body))
      report(DiagKind::MissingReturn, f.loc,
             "control can reach the end of '" + f.name + "'");
  }

  void block(const Block &b, bool in_guard) {
    scopes_.emplace_back();
    for (const auto &s : b.stmts)
      stmt(*s, in_guard);
    scopes_.pop_back();
  }

  static bool terminates(const Block &b) {
    for (const auto &s : b.stmts)
      if (terminates(*s))
        return true;
    return false;
  }

  static bool terminates(const Stmt &s) {
    if (s.as<Return>() || s.as<SilentExit>())
      return true;
    if (const auto *b = s.as<Block>())
      return terminates(*b);
    if (const auto *i = s.as<If>())
      return i->else_block && terminates(i->then_block) &&
             terminates(*i->else_block);
    return false;
  }

  void value_or_call(const ExprPtr &e, Location loc) {
    if (const auto *c = e->as<CallExpr>())
      call(*c, e->loc);
    else
      scalar(*e, false);
    (void)loc;
  }

  void stmt(const Stmt &s, bool in_guard) {
    std::visit(
        [&](const auto &n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Decl>) {
            if (n.init)
              value_or_call(n.init, s.loc);
            declare(n.name, n.type, s.loc);
          } else if constexpr (std::is_same_v<T, Assign>) {
            const Type *t = lookup(n.name);
            if (!t) {
              report(DiagKind::UndeclaredVariable, s.loc,
                     "'" + n.name + "' is not declared");
            } else if (t->is_array() != static_cast<bool>(n.index)) {
              report(DiagKind::TypeMismatch, s.loc,
                     n.index ? "'" + n.name + "' is not an array"
                             : "cannot assign to array '" + n.name + "'");
            }
            if (n.index)
              scalar(*n.index, false);
            value_or_call(n.value, s.loc);
          } else if constexpr (std::is_same_v<T, If>) {
            scalar(*n.cond, false);
            block(n.then_block, in_guard);
            if (n.else_block)
              block(*n.else_block, in_guard);
          } else if constexpr (std::is_same_v<T, While>) {
            block(n.head, in_guard);
            scalar(*n.cond, false);
            block(n.body, in_guard);
          } else if constexpr (std::is_same_v<T, Return>) {
            if (n.value)
              scalar(*n.value, false);
            else
              returns_void_.insert(current_);
          } else if constexpr (std::is_same_v<T, Block>) {
            block(n, in_guard);
          } else if constexpr (std::is_same_v<T, LabelStmt>) {
            scalar(*n.predicate, false);
          } else if constexpr (std::is_same_v<T, Assert>) {
            scalar(*n.cond, false);
          } else if constexpr (std::is_same_v<T, NondetGuard> ||
                               std::is_same_v<T, CoveredGuard>) {
            block(n.body, true);
          }
        },
        s.node);
  }

  void scalar(const Expr &e, bool allow_array) {
    std::visit(
        [&](const auto &n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, VarRef>) {
            const Type *t = lookup(n.name);
            if (!t)
              report(DiagKind::UndeclaredVariable, e.loc,
                     "'" + n.name + "' is not declared");
            else if (t->is_array() && !allow_array)
              report(DiagKind::TypeMismatch, e.loc,
                     "array '" + n.name + "' used as a scalar");
          } else if constexpr (std::is_same_v<T, IndexRef>) {
            const Type *t = lookup(n.name);
            if (!t)
              report(DiagKind::UndeclaredVariable, e.loc,
                     "'" + n.name + "' is not declared");
            else if (!t->is_array())
              report(DiagKind::TypeMismatch, e.loc,
                     "'" + n.name + "' is not an array");
            scalar(*n.index, false);
          } else if constexpr (std::is_same_v<T, Unary> ||
                               std::is_same_v<T, AbsCall>) {
            scalar(*n.operand, false);
          } else if constexpr (std::is_same_v<T, Binary>) {
            scalar(*n.lhs, false);
            scalar(*n.rhs, false);
          } else if constexpr (std::is_same_v<T, NondetRef>) {
            report(DiagKind::NondetOutsideGuard, e.loc,
                   "'__" + n.name + "' may only guard a label check");
          } else if constexpr (std::is_same_v<T, CallExpr>) {
            report(DiagKind::CallInExpression, e.loc,
                   "calls may only appear as a whole right-hand side");
            call(n, e.loc);
          }
        },
        e.node);
  }

  void call(const CallExpr &c, Location loc) {
    const FunctionDef *callee = prog_.find(c.callee);
    if (!callee) {
      report(DiagKind::UnknownFunction, loc,
             "function '" + c.callee + "' is not defined");
      for (const auto &a : c.args)
        scalar(*a, true);
      return;
    }
    calls_[current_].insert(c.callee);
    called_.insert(c.callee);
    if (callee->params.size() != c.args.size()) {
      report(DiagKind::ArityMismatch, loc,
             "'" + c.callee + "' expects " +
                 std::to_string(callee->params.size()) + " arguments");
      return;
    }
    for (std::size_t i = 0; i < c.args.size(); ++i) {
      const Type &want = callee->params[i].type;
      const Expr &arg = *c.args[i];
      if (want.is_array()) {
        const auto *v = arg.as<VarRef>();
        const Type *t = v ? lookup(v->name) : nullptr;
        if (!v || !t || *t != want)
          report(DiagKind::TypeMismatch, arg.loc,
                 "argument " + std::to_string(i + 1) + " of '" + c.callee +
                     "' must be an int[" + std::to_string(want.length) +
                     "] variable");
      } else {
        scalar(arg, false);
      }
    }
  }

  void recursion() {
    // Colouring DFS over the call graph.
    std::map<std::string, int> colour;
    std::set<std::string> reported;
    std::function<void(const std::string &)> visit =
        [&](const std::string &f) {
          colour[f] = 1;
          for (const auto &g : calls_[f]) {
            if (colour[g] == 1) {
              if (reported.insert(g).second) {
                const FunctionDef *def = prog_.find(g);
                report(DiagKind::RecursionForbidden,
                       def ? def->loc : Location{},
                       "recursive call cycle through '" + g + "'");
              }
            } else if (colour[g] == 0) {
              visit(g);
            }
          }
          colour[f] = 2;
        };
    for (const auto &f : prog_.functions)
      if (colour[f.name] == 0)
        visit(f.name);
  }
};

} // namespace

std::vector<Diagnostic> typecheck(const Program &p) {
  return Checker(p).run();
}

} // namespace labelcov
