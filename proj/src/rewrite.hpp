//===-- rewrite.hpp - Statement-level AST rebuilding ------------*- C++ -*-===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//

#ifndef LABELCOV_REWRITE_HPP
#define LABELCOV_REWRITE_HPP

#include "labelcov/ast.hpp"

namespace labelcov::detail {

/// Rebuilds blocks statement by statement. Subclasses override `stmt` to
/// emit replacement statements and `loop_head` to change while heads.
class Rewriter {
public:
  virtual ~Rewriter() = default;

  Program program(const Program &p) {
    Program out;
    out.entry = p.entry;
    for (const auto &f : p.functions) {
      current_ = &f;
      FunctionDef g = f;
      g.body = function_body(f);
      out.functions.push_back(std::move(g));
    }
    current_ = nullptr;
    return out;
  }

  Block block(const Block &b) {
    Block out;
    for (const auto &s : b.stmts)
      stmt(s, out.stmts);
    return out;
  }

protected:
  const FunctionDef *current_ = nullptr;

  virtual Block function_body(const FunctionDef &f) { return block(f.body); }

  virtual void stmt(const StmtPtr &s, std::vector<StmtPtr> &out) {
    out.push_back(rebuild(s));
  }

  virtual Block loop_head(const Stmt &, const While &w) {
    return block(w.head);
  }

  /// Copies `s` with its nested blocks rewritten.
  StmtPtr rebuild(const StmtPtr &s) {
    return std::visit(
        [&](const auto &n) -> StmtPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, If>) {
            If r{n.cond, block(n.then_block), std::nullopt};
            if (n.else_block)
              r.else_block = block(*n.else_block);
            return make_stmt(std::move(r), s->loc);
          } else if constexpr (std::is_same_v<T, While>) {
            Block head = loop_head(*s, n);
            return make_stmt(While{n.cond, block(n.body), std::move(head)},
                             s->loc);
          } else if constexpr (std::is_same_v<T, Block>) {
            return make_stmt(block(n), s->loc);
          } else if constexpr (std::is_same_v<T, NondetGuard> ||
                               std::is_same_v<T, CoveredGuard>) {
            return make_stmt(T{n.id, block(n.body)}, s->loc);
          } else {
            return s;
          }
        },
        s->node);
  }
};

} // namespace labelcov::detail

#endif // LABELCOV_REWRITE_HPP
