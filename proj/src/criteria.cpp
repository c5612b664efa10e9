//===-- criteria.cpp - Coverage label annotation --------------------------===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//

#include "labelcov/criteria.hpp"
#include "labelcov/error.hpp"
#include "labelcov/minic.hpp"
#include "rewrite.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace labelcov {

const char *to_string(WmOp op) {
  switch (op) {
  case WmOp::ABS: return "ABS";
  case WmOp::AOR: return "AOR";
  case WmOp::ROR: return "ROR";
  case WmOp::COR: return "COR";
  }
  return "?";
}

CriterionTag CriterionTag::wm(std::vector<WmOp> ops) {
  std::sort(ops.begin(), ops.end());
  ops.erase(std::unique(ops.begin(), ops.end()), ops.end());
  return {Kind::WM, std::move(ops), 0};
}

std::string CriterionTag::str() const {
  switch (kind) {
  case Kind::DC: return "DC";
  case Kind::CC: return "CC";
  case Kind::MCC: return "MCC";
  case Kind::LIMIT: return "LIMIT:" + std::to_string(limit);
  case Kind::CUSTOM: return "CUSTOM";
  case Kind::WM: {
    std::string s = "WM:";
    for (std::size_t i = 0; i < ops.size(); ++i) {
      if (i)
        s += ',';
      s += to_string(ops[i]);
    }
    return s;
  }
  }
  return "?";
}

CriterionTag parse_criterion(std::string_view spec) {
  std::string s;
  for (char c : spec)
    s += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  auto bad = [&](const std::string &why) {
    return Error(ErrorKind::UnsupportedCriterion,
                 "'" + std::string(spec) + "': " + why);
  };
  if (s == "DC")
    return CriterionTag::dc();
  if (s == "CC")
    return CriterionTag::cc();
  if (s == "MCC")
    return CriterionTag::mcc();
  if (s.rfind("LIMIT:", 0) == 0) {
    std::string_view digits = std::string_view(s).substr(6);
    unsigned n = 0;
    auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (digits.empty() || ec != std::errc() ||
        ptr != digits.data() + digits.size())
      throw bad("LIMIT needs a nonnegative integer");
    return CriterionTag::limit_n(n);
  }
  if (s.rfind("WM:", 0) == 0) {
    std::vector<WmOp> ops;
    std::stringstream in(s.substr(3));
    std::string item;
    while (std::getline(in, item, ',')) {
      if (item == "ABS")
        ops.push_back(WmOp::ABS);
      else if (item == "AOR")
        ops.push_back(WmOp::AOR);
      else if (item == "ROR")
        ops.push_back(WmOp::ROR);
      else if (item == "COR")
        ops.push_back(WmOp::COR);
      else
        throw bad("unknown mutation operator '" + item + "'");
    }
    if (ops.empty())
      throw bad("WM needs at least one operator");
    return CriterionTag::wm(std::move(ops));
  }
  if (s == "WM")
    return CriterionTag::wm({WmOp::ABS, WmOp::AOR, WmOp::ROR, WmOp::COR});
  throw bad("expected DC, CC, MCC, WM:<ops> or LIMIT:<N>");
}

const Label *AnnotatedProgram::find(int id) const {
  if (id < 1 || static_cast<std::size_t>(id) > labels.size())
    return nullptr;
  return &labels[static_cast<std::size_t>(id - 1)];
}

namespace {

void collect_atoms(const ExprPtr &e, std::vector<ExprPtr> &out) {
  if (const auto *b = e->as<Binary>(); b && is_logical(b->op)) {
    collect_atoms(b->lhs, out);
    collect_atoms(b->rhs, out);
  } else if (const auto *u = e->as<Unary>(); u && u->op == UnOp::Not) {
    collect_atoms(u->operand, out);
  } else {
    out.push_back(e);
  }
}

ExprPtr negate(const ExprPtr &e) { return make_unary(UnOp::Not, e, e->loc); }

ExprPtr conj(const ExprPtr &a, const ExprPtr &b) {
  return make_binary(BinOp::And, a, b, a->loc);
}

ExprPtr binop(BinOp op, const ExprPtr &a, const ExprPtr &b) {
  return make_binary(op, a, b, a->loc);
}

bool is_leaf_operand(const Expr &e) {
  return e.as<VarRef>() || e.as<IndexRef>();
}

struct Site {
  ExprPtr predicate;
  CriterionTag tag;
  std::string note;
};

class Annotator : public detail::Rewriter {
public:
  Annotator(const CriterionTag &c, const AnnotateOptions &opts,
            std::uint32_t seq)
      : crit_(c), opts_(opts), seq_(seq) {}

  std::vector<Label> labels;

protected:
  void stmt(const StmtPtr &s, std::vector<StmtPtr> &out) override {
    if (s->loc.synthetic) {
      out.push_back(rebuild(s));
      return;
    }
    if (s->as<While>()) {
      out.push_back(rebuild(s)); // labels land in the head
      return;
    }
    for (auto &l : sites(*s))
      out.push_back(emit(*s, std::move(l)));
    out.push_back(rebuild(s));
  }

  Block loop_head(const Stmt &s, const While &w) override {
    Block head;
    for (auto &l : sites(s))
      head.stmts.push_back(emit(s, std::move(l)));
    Block rest = block(w.head);
    for (auto &r : rest.stmts)
      head.stmts.push_back(std::move(r));
    return head;
  }

private:
  const CriterionTag &crit_;
  const AnnotateOptions &opts_;
  std::uint32_t seq_;

  StmtPtr emit(const Stmt &s, Site site) {
    Label l;
    l.id = static_cast<int>(labels.size()) + 1;
    l.loc = s.loc;
    l.predicate = site.predicate;
    l.criterion = std::move(site.tag);
    l.note = std::move(site.note);
    Location at{s.loc.line, s.loc.column, ++seq_, true};
    labels.push_back(l);
    return make_stmt(LabelStmt{l.id, l.predicate}, at);
  }

  static ExprPtr decision_of(const Stmt &s) {
    if (const auto *i = s.as<If>())
      return i->cond;
    if (const auto *w = s.as<While>())
      return w->cond;
    return nullptr;
  }

  static ExprPtr rhs_of(const Stmt &s) {
    if (const auto *d = s.as<Decl>())
      return d->init;
    if (const auto *a = s.as<Assign>())
      return a->value;
    return nullptr;
  }

  std::vector<Site> sites(const Stmt &s) {
    std::vector<Site> out;
    ExprPtr d = decision_of(s);
    switch (crit_.kind) {
    case CriterionTag::Kind::DC:
      if (d) {
        out.push_back({d, crit_, "decision true"});
        out.push_back({negate(d), crit_, "decision false"});
      }
      break;
    case CriterionTag::Kind::CC:
      if (d) {
        auto as = atoms(d);
        for (std::size_t i = 0; i < as.size(); ++i) {
          std::string n = "atom " + std::to_string(i + 1);
          out.push_back({as[i], crit_, n + " true"});
          out.push_back({negate(as[i]), crit_, n + " false"});
        }
      }
      break;
    case CriterionTag::Kind::MCC:
      if (d)
        mcc(s, d, out);
      break;
    case CriterionTag::Kind::LIMIT:
      if (d)
        for (const auto &a : atoms(d))
          limit(a, out);
      break;
    case CriterionTag::Kind::WM:
      for (WmOp op : crit_.ops) {
        CriterionTag tag = CriterionTag::wm({op});
        ExprPtr rhs = rhs_of(s);
        switch (op) {
        case WmOp::ABS:
          if (rhs)
            abs_sites(rhs, tag, out);
          break;
        case WmOp::AOR:
          if (rhs)
            aor_sites(rhs, tag, out);
          break;
        case WmOp::ROR:
          if (d)
            ror_sites(d, tag, out);
          if (rhs)
            ror_sites(rhs, tag, out);
          break;
        case WmOp::COR:
          if (d)
            cor_sites(d, tag, out);
          if (rhs)
            cor_sites(rhs, tag, out);
          break;
        }
      }
      break;
    case CriterionTag::Kind::CUSTOM:
      break;
    }
    return out;
  }

  void mcc(const Stmt &s, const ExprPtr &d, std::vector<Site> &out) {
    auto as = atoms(d);
    if (as.size() > opts_.mcc_atom_cap)
      throw Error(ErrorKind::AtomCapExceeded,
                  "decision has " + std::to_string(as.size()) +
                      " atoms, cap is " + std::to_string(opts_.mcc_atom_cap),
                  s.loc);
    std::size_t k = as.size();
    for (std::size_t m = 0; m < (std::size_t{1} << k); ++m) {
      ExprPtr pred;
      std::string note;
      for (std::size_t i = 0; i < k; ++i) {
        bool positive = ((m >> i) & 1) == 0;
        ExprPtr lit = positive ? as[i] : negate(as[i]);
        pred = pred ? conj(pred, lit) : lit;
        note += positive ? 'T' : 'F';
      }
      out.push_back({pred, crit_, note});
    }
  }

  void limit(const ExprPtr &atom, std::vector<Site> &out) {
    const auto *b = atom->as<Binary>();
    if (!b)
      return;
    ExprPtr one = make_int(1, atom->loc);
    ExprPtr boundary;
    switch (b->op) {
    case BinOp::Lt:
      boundary = binop(BinOp::Add, binop(BinOp::Sub, b->lhs, b->rhs), one);
      break;
    case BinOp::Le: boundary = binop(BinOp::Sub, b->lhs, b->rhs); break;
    case BinOp::Gt:
      boundary = binop(BinOp::Add, binop(BinOp::Sub, b->rhs, b->lhs), one);
      break;
    case BinOp::Ge: boundary = binop(BinOp::Sub, b->rhs, b->lhs); break;
    default: return;
    }
    ExprPtr near = binop(BinOp::Le, make_abs(boundary, atom->loc),
                         make_int(Int(crit_.limit), atom->loc));
    out.push_back({conj(atom, near), crit_, "boundary of " + print(*atom)});
  }

  template <class F> static void each_binary(const ExprPtr &e, F &&f) {
    std::visit(
        [&](const auto &n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Binary>) {
            f(e, n);
            each_binary(n.lhs, f);
            each_binary(n.rhs, f);
          } else if constexpr (std::is_same_v<T, Unary> ||
                               std::is_same_v<T, AbsCall>) {
            each_binary(n.operand, f);
          } else if constexpr (std::is_same_v<T, IndexRef>) {
            each_binary(n.index, f);
          } else if constexpr (std::is_same_v<T, CallExpr>) {
            for (const auto &a : n.args)
              each_binary(a, f);
          }
        },
        e->node);
  }

  static void abs_sites(const ExprPtr &e, const CriterionTag &tag,
                        std::vector<Site> &out) {
    // Operands in source order.
    std::visit(
        [&](const auto &n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Binary>) {
            for (const ExprPtr &side : {n.lhs, n.rhs}) {
              if (is_arithmetic(n.op) && is_leaf_operand(*side))
                out.push_back({binop(BinOp::Ne, side,
                                     make_abs(side, side->loc)),
                               tag, "ABS " + print(*side)});
              abs_sites(side, tag, out);
            }
          } else if constexpr (std::is_same_v<T, Unary> ||
                               std::is_same_v<T, AbsCall>) {
            abs_sites(n.operand, tag, out);
          } else if constexpr (std::is_same_v<T, IndexRef>) {
            abs_sites(n.index, tag, out);
          } else if constexpr (std::is_same_v<T, CallExpr>) {
            for (const auto &a : n.args)
              abs_sites(a, tag, out);
          }
        },
        e->node);
  }

  static void aor_sites(const ExprPtr &e, const CriterionTag &tag,
                        std::vector<Site> &out) {
    static constexpr BinOp kRepl[] = {BinOp::Add, BinOp::Sub, BinOp::Mul,
                                      BinOp::Div};
    each_binary(e, [&](const ExprPtr &node, const Binary &b) {
      if (!is_arithmetic(b.op))
        return;
      for (BinOp r : kRepl) {
        if (r == b.op)
          continue;
        out.push_back({binop(BinOp::Ne, node, binop(r, b.lhs, b.rhs)), tag,
                       std::string("AOR ") + spelling(b.op) + " -> " +
                           spelling(r)});
      }
    });
  }

  static void ror_sites(const ExprPtr &e, const CriterionTag &tag,
                        std::vector<Site> &out) {
    static constexpr BinOp kRepl[] = {BinOp::Lt, BinOp::Le, BinOp::Gt,
                                      BinOp::Ge, BinOp::Eq, BinOp::Ne};
    each_binary(e, [&](const ExprPtr &node, const Binary &b) {
      if (!is_relational(b.op))
        return;
      for (BinOp r : kRepl) {
        if (r == b.op)
          continue;
        out.push_back({binop(BinOp::Ne, node, binop(r, b.lhs, b.rhs)), tag,
                       std::string("ROR ") + spelling(b.op) + " -> " +
                           spelling(r)});
      }
    });
  }

  static void cor_sites(const ExprPtr &e, const CriterionTag &tag,
                        std::vector<Site> &out) {
    each_binary(e, [&](const ExprPtr &node, const Binary &b) {
      if (!is_logical(b.op))
        return;
      BinOp r = b.op == BinOp::And ? BinOp::Or : BinOp::And;
      out.push_back({binop(BinOp::Ne, node, binop(r, b.lhs, b.rhs)), tag,
                     std::string("COR ") + spelling(b.op) + " -> " +
                         spelling(r)});
    });
  }
};

class Stripper : public detail::Rewriter {
protected:
  void stmt(const StmtPtr &s, std::vector<StmtPtr> &out) override {
    if (!s->as<LabelStmt>())
      out.push_back(rebuild(s));
  }
};

//===----------------------------------------------------------------------===//
// Custom labels
//===----------------------------------------------------------------------===//

using Scope = std::map<std::string, Type>;

/// Finds the statement at (line, col) and the variables visible before it.
class ScopeFinder {
public:
  ScopeFinder(int line, int col) : line_(line), col_(col) {}

  bool search(const Program &p) {
    for (const auto &f : p.functions) {
      Scope s;
      for (const auto &param : f.params)
        s[param.name] = param.type;
      if (block(f.body, s))
        return true;
    }
    return false;
  }

  Scope scope;

private:
  int line_, col_;

  bool block(const Block &b, Scope s) {
    for (const auto &st : b.stmts) {
      if (!st->loc.synthetic && !st->as<LabelStmt>() &&
          st->loc.line == line_ && st->loc.column == col_) {
        scope = s;
        return true;
      }
      bool found = std::visit(
          [&](const auto &n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Decl>) {
              s[n.name] = n.type;
            } else if constexpr (std::is_same_v<T, If>) {
              return block(n.then_block, s) ||
                     (n.else_block && block(*n.else_block, s));
            } else if constexpr (std::is_same_v<T, While>) {
              return block(n.body, s);
            } else if constexpr (std::is_same_v<T, Block>) {
              return block(n, s);
            } else if constexpr (std::is_same_v<T, NondetGuard> ||
                                 std::is_same_v<T, CoveredGuard>) {
              return block(n.body, s);
            }
            return false;
          },
          st->node);
      if (found)
        return true;
    }
    return false;
  }
};

void check_scope(const Expr &e, const Scope &scope) {
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarRef>) {
          auto it = scope.find(n.name);
          if (it == scope.end() || it->second.is_array())
            throw Error(ErrorKind::ScopeError,
                        "'" + n.name + "' is not a scalar in scope", e.loc);
        } else if constexpr (std::is_same_v<T, IndexRef>) {
          auto it = scope.find(n.name);
          if (it == scope.end() || !it->second.is_array())
            throw Error(ErrorKind::ScopeError,
                        "'" + n.name + "' is not an array in scope", e.loc);
          check_scope(*n.index, scope);
        } else if constexpr (std::is_same_v<T, Unary> ||
                             std::is_same_v<T, AbsCall>) {
          check_scope(*n.operand, scope);
        } else if constexpr (std::is_same_v<T, Binary>) {
          check_scope(*n.lhs, scope);
          check_scope(*n.rhs, scope);
        } else if constexpr (std::is_same_v<T, CallExpr> ||
                             std::is_same_v<T, NondetRef>) {
          throw Error(ErrorKind::ScopeError,
                      "label predicates must be side-effect free", e.loc);
        }
      },
      e.node);
}

class Inserter : public detail::Rewriter {
public:
  Inserter(int line, int col, StmtPtr label)
      : line_(line), col_(col), label_(std::move(label)) {}

protected:
  void stmt(const StmtPtr &s, std::vector<StmtPtr> &out) override {
    if (!s->loc.synthetic && !s->as<LabelStmt>() && s->loc.line == line_ &&
        s->loc.column == col_)
      out.push_back(label_);
    out.push_back(rebuild(s));
  }

private:
  int line_, col_;
  StmtPtr label_;
};

} // namespace

std::vector<ExprPtr> atoms(const ExprPtr &decision) {
  std::vector<ExprPtr> out;
  collect_atoms(decision, out);
  return out;
}

AnnotatedProgram annotate(const Program &p, const CriterionTag &c,
                          const AnnotateOptions &opts) {
  if (c.kind == CriterionTag::Kind::CUSTOM)
    throw Error(ErrorKind::UnsupportedCriterion,
                "CUSTOM labels are added with add_custom_label");
  if (c.kind == CriterionTag::Kind::WM && c.ops.empty())
    throw Error(ErrorKind::UnsupportedCriterion, "WM needs an operator");
  Annotator a(c, opts, p.max_seq());
  AnnotatedProgram out;
  out.program = a.program(p);
  out.labels = std::move(a.labels);
  out.criterion = c;
  return out;
}

Program strip(const Program &p) { return Stripper().program(p); }

Program strip(const AnnotatedProgram &ap) { return strip(ap.program); }

AnnotatedProgram add_custom_label(const AnnotatedProgram &ap, Location loc,
                                  ExprPtr predicate) {
  ScopeFinder finder(loc.line, loc.column);
  if (!finder.search(ap.program))
    throw Error(ErrorKind::BadLocation,
                "no statement starts at " + loc.str(), loc);
  check_scope(*predicate, finder.scope);

  Label l;
  l.id = static_cast<int>(ap.labels.size()) + 1;
  l.loc = Location{loc.line, loc.column, 0, false};
  for_each_stmt(ap.program, [&](const Stmt &s) {
    if (!s.loc.synthetic && s.loc.line == loc.line &&
        s.loc.column == loc.column)
      l.loc = s.loc;
  });
  l.predicate = predicate;
  l.criterion = CriterionTag::custom();
  Location at{loc.line, loc.column, ap.program.max_seq() + 1, true};

  AnnotatedProgram out;
  out.program = Inserter(loc.line, loc.column,
                         make_stmt(LabelStmt{l.id, predicate}, at))
                    .program(ap.program);
  out.labels = ap.labels;
  out.labels.push_back(std::move(l));
  out.criterion = ap.criterion;
  return out;
}

std::string label_table(const AnnotatedProgram &ap) {
  std::string out;
  for (const auto &l : ap.labels) {
    out += std::to_string(l.id);
    out += '\t';
    out += l.loc.str();
    out += '\t';
    out += l.criterion.str();
    out += '\t';
    out += print(*l.predicate);
    out += '\t';
    out += l.note;
    out += '\n';
  }
  return out;
}

std::string print_annotated(const AnnotatedProgram &ap) {
  return print(ap.program);
}

} // namespace labelcov
