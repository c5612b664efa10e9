//===-- instrument.cpp - Label instrumentation modes ----------------------===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//

#include "labelcov/instrument.hpp"
#include "labelcov/error.hpp"
#include "rewrite.hpp"

#include <algorithm>

namespace labelcov {

const char *to_string(Mode m) {
  switch (m) {
  case Mode::Ignore: return "ignore";
  case Mode::Naive: return "naive";
  case Mode::Tight: return "tight";
  case Mode::Optim: return "optim";
  case Mode::Replayer: return "replayer";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  for (Mode m : {Mode::Ignore, Mode::Naive, Mode::Tight, Mode::Optim,
                 Mode::Replayer})
    if (name == to_string(m))
      return m;
  throw Error(ErrorKind::UnsupportedCriterion,
              "unknown mode '" + std::string(name) + "'");
}

namespace {

bool instrumentation_form(const Stmt &s) {
  return s.as<Nop>() || s.as<Assert>() || s.as<SilentExit>() ||
         s.as<NondetGuard>() || s.as<CoveredGuard>() || s.as<SetCovered>();
}

class Instrumenter : public detail::Rewriter {
public:
  Instrumenter(Mode m, std::string entry, std::uint32_t seq)
      : entry_(std::move(entry)), mode_(m), seq_(seq) {}

protected:
  Block function_body(const FunctionDef &f) override {
    Block b = block(f.body);
    bool exits = mode_ == Mode::Tight || mode_ == Mode::Optim;
    if (exits && f.name == entry_ && !ends_in_exit(b))
      b.stmts.push_back(make_stmt(SilentExit{}, fresh(f.loc)));
    return b;
  }

  void stmt(const StmtPtr &s, std::vector<StmtPtr> &out) override {
    if (instrumentation_form(*s))
      throw Error(ErrorKind::ModeMismatch,
                  "program is already instrumented", s->loc);
    if (const auto *l = s->as<LabelStmt>()) {
      label(*s, *l, out);
      return;
    }
    if (const auto *r = s->as<Return>(); r && rewrite_returns()) {
      Block b;
      if (r->value)
        b.stmts.push_back(make_stmt(Decl{kResultVar, Type::scalar(), r->value},
                                    s->loc));
      b.stmts.push_back(make_stmt(SilentExit{}, fresh(s->loc)));
      out.push_back(make_stmt(std::move(b), fresh(s->loc)));
      return;
    }
    out.push_back(rebuild(s));
  }

private:
  std::string entry_;
  Mode mode_;
  std::uint32_t seq_;

  bool rewrite_returns() const {
    return (mode_ == Mode::Tight || mode_ == Mode::Optim) && current_ &&
           current_->name == entry_;
  }

  Location fresh(Location at) {
    return Location{at.line, at.column, ++seq_, true};
  }

  static bool ends_in_exit(const Block &b) {
    if (b.stmts.empty())
      return false;
    const Stmt &last = *b.stmts.back();
    if (last.as<SilentExit>())
      return true;
    if (const auto *inner = last.as<Block>())
      return ends_in_exit(*inner);
    return false;
  }

  void label(const Stmt &s, const LabelStmt &l, std::vector<StmtPtr> &out) {
    Location at = s.loc;
    auto negated = [&] {
      return make_unary(UnOp::Not, l.predicate, l.predicate->loc);
    };
    switch (mode_) {
    case Mode::Ignore:
      return;
    case Mode::Naive: {
      Block then;
      then.stmts.push_back(make_stmt(Nop{}, fresh(at)));
      out.push_back(
          make_stmt(If{l.predicate, std::move(then), std::nullopt}, fresh(at)));
      return;
    }
    case Mode::Replayer: {
      Block then;
      then.stmts.push_back(make_stmt(SetCovered{l.id}, fresh(at)));
      out.push_back(
          make_stmt(If{l.predicate, std::move(then), std::nullopt}, fresh(at)));
      return;
    }
    case Mode::Tight: {
      Block body;
      body.stmts.push_back(make_stmt(Assert{negated()}, fresh(at)));
      body.stmts.push_back(make_stmt(SilentExit{}, fresh(at)));
      out.push_back(make_stmt(NondetGuard{l.id, std::move(body)}, fresh(at)));
      return;
    }
    case Mode::Optim: {
      Block check;
      check.stmts.push_back(make_stmt(Assert{negated()}, fresh(at)));
      Block body;
      body.stmts.push_back(
          make_stmt(CoveredGuard{l.id, std::move(check)}, fresh(at)));
      body.stmts.push_back(make_stmt(SilentExit{}, fresh(at)));
      out.push_back(make_stmt(NondetGuard{l.id, std::move(body)}, fresh(at)));
      return;
    }
    }
  }
};

//===----------------------------------------------------------------------===//
// Static path counting
//===----------------------------------------------------------------------===//

class PathCounter {
public:
  PathCounter(std::uint64_t max, std::optional<unsigned> unroll)
      : max_(max), unroll_(unroll) {}

  /// Paths that fall through the end, and paths that terminate inside.
  struct Pair {
    std::uint64_t fall, term;
  };

  bool saturated = false;

  std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    if (b > max_ - a) {
      saturated = true;
      return max_;
    }
    return a + b;
  }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0)
      return 0;
    if (a > max_ / b) {
      saturated = true;
      return max_;
    }
    return a * b;
  }

  Pair block(const Block &b) {
    Pair acc{1, 0};
    for (const auto &s : b.stmts) {
      Pair p = stmt(*s);
      acc.term = add(acc.term, mul(acc.fall, p.term));
      acc.fall = mul(acc.fall, p.fall);
    }
    return acc;
  }

  Pair stmt(const Stmt &s) {
    return std::visit(
        [&](const auto &n) -> Pair {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, If>) {
            Pair t = block(n.then_block);
            Pair e = n.else_block ? block(*n.else_block) : Pair{1, 0};
            return {add(t.fall, e.fall), add(t.term, e.term)};
          } else if constexpr (std::is_same_v<T, While>) {
            if (!unroll_)
              throw Error(ErrorKind::UnboundedLoop,
                          "loop needs an unroll bound", s.loc);
            Pair h = block(n.head);
            Pair b = block(n.body);
            Pair out{0, 0};
            std::uint64_t reach = 1;
            for (unsigned i = 0; i <= *unroll_; ++i) {
              out.term = add(out.term, mul(reach, h.term));
              std::uint64_t tested = mul(reach, h.fall);
              out.fall = add(out.fall, tested);
              if (i == *unroll_)
                break;
              out.term = add(out.term, mul(tested, b.term));
              reach = mul(tested, b.fall);
            }
            return out;
          } else if constexpr (std::is_same_v<T, Block>) {
            return block(n);
          } else if constexpr (std::is_same_v<T, Return> ||
                               std::is_same_v<T, SilentExit>) {
            return {0, 1};
          } else if constexpr (std::is_same_v<T, NondetGuard> ||
                               std::is_same_v<T, CoveredGuard>) {
            Pair b = block(n.body);
            return {add(1, b.fall), b.term};
          } else {
            return {1, 0};
          }
        },
        s.node);
  }

private:
  std::uint64_t max_;
  std::optional<unsigned> unroll_;
};

} // namespace

Program transform(const AnnotatedProgram &ap, Mode m) {
  return Instrumenter(m, ap.program.entry, ap.program.max_seq())
      .program(ap.program);
}

StaticPaths count_static_paths(const Program &p, std::uint64_t max,
                               std::optional<unsigned> unroll) {
  PathCounter c(max, unroll);
  PathCounter::Pair r = c.block(p.entry_function().body);
  std::uint64_t total = c.add(r.fall, r.term);
  return {total, c.saturated};
}

} // namespace labelcov
