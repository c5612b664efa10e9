//===-- symex.cpp - Bounded symbolic exploration --------------------------===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//
//
// Programs are compiled to a small stack bytecode so that a state can fork in
// the middle of an expression. A state carries its surviving input
// assignments as "lanes": every value is a vector with one entry per lane,
// plus a term over the inputs that the path condition is built from.
//
//===----------------------------------------------------------------------===//

#include "labelcov/symex.hpp"
#include "labelcov/error.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace labelcov {

namespace fs = std::filesystem;

const char *to_string(TestKind k) {
  switch (k) {
  case TestKind::Complete: return "complete";
  case TestKind::AssertErr: return "assert";
  case TestKind::RteErr: return "rte";
  }
  return "?";
}

const char *to_string(Strategy s) {
  return s == Strategy::DFS ? "dfs" : "bfs";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "dfs")
    return Strategy::DFS;
  if (name == "bfs")
    return Strategy::BFS;
  throw Error(ErrorKind::UnsupportedCriterion,
              "unknown strategy '" + std::string(name) + "'");
}

//===----------------------------------------------------------------------===//
// Harness
//===----------------------------------------------------------------------===//

namespace {

const std::regex kHarnessLine(
    R"(^([A-Za-z_][A-Za-z0-9_]*)(?:\[([0-9]+)\])?\s+(-?[0-9]+)\s+(-?[0-9]+)$)");

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

std::string element_name(const std::string &base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

} // namespace

Harness Harness::parse(std::string_view text, const Program &p) {
  const FunctionDef &entry = p.entry_function();
  Harness h;
  h.entry = entry.name;
  std::map<std::string, std::vector<std::optional<Interval>>> partial;
  std::set<std::string> scalars;
  for (const auto &param : entry.params) {
    if (param.type.is_array())
      partial[param.name].resize(param.type.length);
    else
      scalars.insert(param.name);
  }

  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    std::smatch m;
    std::string where = "harness line " + std::to_string(lineno) + ": ";
    if (!std::regex_match(line, m, kHarnessLine))
      throw Error(ErrorKind::HarnessError, where + "expected 'name lo hi'");
    std::string name = m[1];
    Interval iv{Int(m[3].str()), Int(m[4].str())};
    if (auto arr = partial.find(name); arr != partial.end()) {
      if (m[2].matched) {
        std::size_t i = std::stoul(m[2].str());
        if (i >= arr->second.size())
          throw Error(ErrorKind::HarnessError,
                      where + "index out of range for '" + name + "'");
        arr->second[i] = iv;
      } else {
        for (auto &slot : arr->second)
          slot = iv;
      }
    } else if (scalars.count(name) && !m[2].matched) {
      h.scalars[name] = iv;
    } else {
      throw Error(ErrorKind::HarnessError,
                  where + "'" + name + "' is not a parameter of '" +
                      entry.name + "'");
    }
  }

  for (const auto &name : scalars)
    if (!h.scalars.count(name))
      throw Error(ErrorKind::HarnessError, "no domain for '" + name + "'");
  for (auto &[name, elems] : partial) {
    std::vector<Interval> out;
    for (std::size_t i = 0; i < elems.size(); ++i) {
      if (!elems[i])
        throw Error(ErrorKind::HarnessError,
                    "no domain for '" + element_name(name, i) + "'");
      out.push_back(*elems[i]);
    }
    h.arrays[name] = std::move(out);
  }
  return h;
}

void set_bound(Harness &h, const std::string &name, Interval iv) {
  if (auto it = h.scalars.find(name); it != h.scalars.end()) {
    it->second = iv;
    return;
  }
  if (auto it = h.arrays.find(name); it != h.arrays.end()) {
    for (auto &e : it->second)
      e = iv;
    return;
  }
  auto br = name.find('[');
  if (br != std::string::npos && name.back() == ']') {
    auto it = h.arrays.find(name.substr(0, br));
    const std::string digits = name.substr(br + 1, name.size() - br - 2);
    if (it != h.arrays.end() && !digits.empty() &&
        digits.find_first_not_of("0123456789") == std::string::npos) {
      std::size_t i = std::stoul(digits);
      if (i < it->second.size()) {
        it->second[i] = iv;
        return;
      }
    }
  }
  throw Error(ErrorKind::HarnessError, "'" + name + "' is not a harness input");
}

Harness Harness::load(const fs::path &file, const Program &p) {
  std::ifstream in(file);
  if (!in)
    throw Error(ErrorKind::IoError, "cannot read " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), p);
}

std::string Harness::str() const {
  std::ostringstream os;
  std::map<std::string, std::string> lines;
  for (const auto &[name, iv] : scalars)
    lines[name] = name + " " + iv.lo.str() + " " + iv.hi.str() + "\n";
  for (const auto &[name, elems] : arrays) {
    bool uniform = std::all_of(elems.begin(), elems.end(),
                               [&](const Interval &i) { return i == elems[0]; });
    std::string text;
    if (uniform && !elems.empty())
      text = name + " " + elems[0].lo.str() + " " + elems[0].hi.str() + "\n";
    else
      for (std::size_t i = 0; i < elems.size(); ++i)
        text += element_name(name, i) + " " + elems[i].lo.str() + " " +
                elems[i].hi.str() + "\n";
    lines[name] = text;
  }
  for (const auto &[_, text] : lines)
    os << text;
  return os.str();
}

namespace {

struct InputVar {
  std::string name;
  std::string base;
  std::size_t index = 0;
  bool element = false;
  Interval domain;
};

std::vector<InputVar> input_vars(const Harness &h) {
  std::vector<InputVar> out;
  std::set<std::string> bases;
  for (const auto &[n, _] : h.scalars)
    bases.insert(n);
  for (const auto &[n, _] : h.arrays)
    bases.insert(n);
  for (const auto &b : bases) {
    if (auto s = h.scalars.find(b); s != h.scalars.end()) {
      out.push_back({b, b, 0, false, s->second});
      continue;
    }
    const auto &elems = h.arrays.at(b);
    for (std::size_t i = 0; i < elems.size(); ++i)
      out.push_back({element_name(b, i), b, i, true, elems[i]});
  }
  return out;
}

/// Mixed-radix decoding of an assignment rank; the first input is the most
/// significant digit.
class Domain {
public:
  explicit Domain(const Harness &h) : vars_(input_vars(h)) {}

  const std::vector<InputVar> &vars() const { return vars_; }

  /// Throws BudgetExceeded past `budget`; returns 0 for an empty product.
  std::uint64_t prepare(std::uint64_t budget) {
    Int total = 1;
    sizes_.clear();
    for (const auto &v : vars_) {
      Int n = v.domain.hi - v.domain.lo + 1;
      if (n <= 0)
        return size_ = 0;
      total *= n;
      if (total > budget)
        throw Error(ErrorKind::BudgetExceeded,
                    "input domain has more than " + std::to_string(budget) +
                        " assignments");
      sizes_.push_back(static_cast<std::uint64_t>(n));
    }
    strides_.assign(vars_.size(), 1);
    for (std::size_t i = vars_.size(); i-- > 1;)
      strides_[i - 1] = strides_[i] * sizes_[i];
    return size_ = static_cast<std::uint64_t>(total);
  }

  Int value(std::size_t var, std::uint64_t rank) const {
    return vars_[var].domain.lo +
           Int((rank / strides_[var]) % sizes_[var]);
  }

  std::uint64_t size() const { return size_; }

private:
  std::vector<InputVar> vars_;
  std::vector<std::uint64_t> sizes_, strides_;
  std::uint64_t size_ = 0;
};

} // namespace

std::vector<std::string> input_names(const Harness &h) {
  std::vector<std::string> out;
  for (const auto &v : input_vars(h))
    out.push_back(v.name);
  return out;
}

std::optional<std::uint64_t> domain_size(const Harness &h, std::uint64_t cap) {
  Domain d(h);
  try {
    return d.prepare(cap);
  } catch (const Error &) {
    return std::nullopt;
  }
}

Inputs to_inputs(const Model &m, const Program &p) {
  Inputs in;
  auto get = [&](const std::string &name) {
    auto it = m.find(name);
    if (it == m.end())
      throw Error(ErrorKind::InputMissing, "test has no value for '" + name + "'");
    return it->second;
  };
  for (const auto &param : p.entry_function().params) {
    if (param.type.is_array()) {
      std::vector<Int> elems;
      for (std::size_t i = 0; i < param.type.length; ++i)
        elems.push_back(get(element_name(param.name, i)));
      in[param.name] = std::move(elems);
    } else {
      in[param.name] = get(param.name);
    }
  }
  for (const auto &[name, v] : m)
    if (name.rfind("nondet_", 0) == 0)
      in[name] = v;
  return in;
}

//===----------------------------------------------------------------------===//
// Term evaluation
//===----------------------------------------------------------------------===//

namespace {

/// Evaluates terms over one assignment, memoizing shared subterms.
class TermEval {
public:
  TermEval(const std::map<std::string, std::pair<std::size_t, std::size_t>>
               &layout,
           const std::vector<Int> &values)
      : layout_(layout), values_(values) {}

  std::optional<Int> eval(const Expr &e) {
    if (auto it = memo_.find(&e); it != memo_.end())
      return it->second;
    std::optional<Int> r = compute(e);
    memo_.emplace(&e, r);
    return r;
  }

  bool satisfies(const Conjunct &c) {
    std::optional<Int> v = eval(*c.term);
    switch (c.expect) {
    case Expect::Nonzero: return v && *v != 0;
    case Expect::Zero: return v && *v == 0;
    case Expect::NonzeroOrError: return !v || *v != 0;
    case Expect::ZeroOrError: return !v || *v == 0;
    }
    return false;
  }

private:
  const std::map<std::string, std::pair<std::size_t, std::size_t>> &layout_;
  const std::vector<Int> &values_;
  std::map<const Expr *, std::optional<Int>> memo_;

  const std::pair<std::size_t, std::size_t> &slot(const std::string &name) {
    auto it = layout_.find(name);
    if (it == layout_.end())
      throw Error(ErrorKind::HarnessError, "no domain for '" + name + "'");
    return it->second;
  }

  std::optional<Int> compute(const Expr &e) {
    return std::visit(
        [&](const auto &n) -> std::optional<Int> {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, VarRef>) {
            return values_[slot(n.name).first];
          } else if constexpr (std::is_same_v<T, IndexRef>) {
            auto [start, len] = slot(n.name);
            auto i = eval(*n.index);
            if (!i || *i < 0 || *i >= len)
              return std::nullopt;
            return values_[start + static_cast<std::size_t>(*i)];
          } else if constexpr (std::is_same_v<T, Unary>) {
            auto v = eval(*n.operand);
            if (!v)
              return v;
            return n.op == UnOp::Neg ? Int(-*v) : Int(*v == 0 ? 1 : 0);
          } else if constexpr (std::is_same_v<T, AbsCall>) {
            auto v = eval(*n.operand);
            if (!v)
              return v;
            return *v < 0 ? Int(-*v) : *v;
          } else if constexpr (std::is_same_v<T, Binary>) {
            auto a = eval(*n.lhs);
            if (!a)
              return a;
            if (n.op == BinOp::And || n.op == BinOp::Or) {
              bool lhs = *a != 0;
              if (lhs == (n.op == BinOp::Or))
                return Int(lhs ? 1 : 0);
              auto b = eval(*n.rhs);
              if (!b)
                return b;
              return Int(*b != 0 ? 1 : 0);
            }
            auto b = eval(*n.rhs);
            if (!b)
              return b;
            switch (n.op) {
            case BinOp::Add: return *a + *b;
            case BinOp::Sub: return *a - *b;
            case BinOp::Mul: return *a * *b;
            case BinOp::Div:
              if (*b == 0)
                return std::nullopt;
              return Int(*a / *b);
            case BinOp::Mod:
              if (*b == 0)
                return std::nullopt;
              return Int(*a % *b);
            case BinOp::Lt: return Int(*a < *b ? 1 : 0);
            case BinOp::Le: return Int(*a <= *b ? 1 : 0);
            case BinOp::Gt: return Int(*a > *b ? 1 : 0);
            case BinOp::Ge: return Int(*a >= *b ? 1 : 0);
            case BinOp::Eq: return Int(*a == *b ? 1 : 0);
            case BinOp::Ne: return Int(*a != *b ? 1 : 0);
            default: return std::nullopt;
            }
          } else {
            throw Error(ErrorKind::HarnessError,
                        "term is not over harness inputs", e.loc);
          }
        },
        e.node);
  }
};

std::map<std::string, std::pair<std::size_t, std::size_t>>
layout_of(const std::vector<InputVar> &vars) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (!vars[i].element) {
      out[vars[i].name] = {i, 0};
    } else {
      auto &slot = out[vars[i].base];
      if (vars[i].index == 0)
        slot.first = i;
      slot.second = vars[i].index + 1;
    }
  }
  return out;
}

} // namespace

std::optional<Model> solve(const PathCondition &pc, const ExprPtr &extra,
                           const Harness &h, std::uint64_t budget) {
  Domain d(h);
  std::uint64_t n = d.prepare(budget);
  auto layout = layout_of(d.vars());
  std::optional<Conjunct> also;
  if (extra)
    also = Conjunct{extra, Expect::Nonzero};
  std::vector<Int> values(d.vars().size());
  for (std::uint64_t rank = 0; rank < n; ++rank) {
    for (std::size_t i = 0; i < values.size(); ++i)
      values[i] = d.value(i, rank);
    TermEval ev(layout, values);
    bool ok = std::all_of(pc.conjuncts.begin(), pc.conjuncts.end(),
                          [&](const Conjunct &c) { return ev.satisfies(c); });
    if (ok && also)
      ok = ev.satisfies(*also);
    if (ok) {
      Model m;
      for (std::size_t i = 0; i < values.size(); ++i)
        m[d.vars()[i].name] = values[i];
      return m;
    }
  }
  return std::nullopt;
}

//===----------------------------------------------------------------------===//
// Bytecode
//===----------------------------------------------------------------------===//

namespace {

enum class Op {
  Const,
  Load,
  LoadElem,
  Store,
  StoreElem,
  DeclScalar,
  NewArray,
  Neg,
  Not,
  Abs,
  Arith,
  LAnd,
  LOr,
  Branch,
  GuardBranch,
  Jump,
  Mark,
  Tick,
  Call,
  Ret,
  Nop,
  Assert,
  Exit,
  NondetFork,
  CoveredCheck,
};

struct Instr {
  Instr(Op o, int x = 0, int y = 0) : op(o), a(x), b(y) {}

  Op op;
  /// Slot, jump target, function index or label id depending on `op`.
  int a = 0;
  int b = 0;
  BinOp bin = BinOp::Add;
  /// Runtime errors fork (original code) rather than poison the value.
  bool checked = false;
  /// Branch: record the edge. Mark: count as an original statement.
  bool flag = false;
  Location loc;
  Int k;
  std::vector<int> array_args;
};

struct Function {
  std::string name;
  std::vector<Instr> code;
  int slots = 0;
  std::vector<Param> params;
};

class Compiler {
public:
  explicit Compiler(const Program &p) : prog_(p) {
    for (std::size_t i = 0; i < p.functions.size(); ++i)
      index_[p.functions[i].name] = static_cast<int>(i);
  }

  std::vector<Function> run() {
    std::vector<Function> out;
    for (const auto &f : prog_.functions)
      out.push_back(function(f));
    return out;
  }

  int index_of(const std::string &name) const { return index_.at(name); }

private:
  const Program &prog_;
  std::map<std::string, int> index_;
  Function *fn_ = nullptr;
  std::vector<std::map<std::string, int>> scopes_;
  std::vector<std::ptrdiff_t> labels_;
  std::vector<int> guards_;

  Function function(const FunctionDef &f) {
    Function out;
    out.name = f.name;
    out.params = f.params;
    fn_ = &out;
    labels_.clear();
    scopes_.assign(1, {});
    for (const auto &p : f.params)
      declare(p.name);
    block(f.body);
    // Falling off the end of a void function returns nothing.
    emit({Op::Ret, 0});
    for (auto &in : out.code)
      if (in.op == Op::Jump || in.op == Op::Branch ||
          in.op == Op::GuardBranch || in.op == Op::NondetFork ||
          in.op == Op::CoveredCheck) {
        in.a = static_cast<int>(labels_[static_cast<std::size_t>(in.a)]);
        if (in.op == Op::Branch || in.op == Op::GuardBranch)
          in.b = static_cast<int>(labels_[static_cast<std::size_t>(in.b)]);
      }
    fn_ = nullptr;
    return out;
  }

  void emit(Instr in) { fn_->code.push_back(std::move(in)); }

  int label() {
    labels_.push_back(-1);
    return static_cast<int>(labels_.size() - 1);
  }
  void bind(int l) {
    labels_[static_cast<std::size_t>(l)] =
        static_cast<std::ptrdiff_t>(fn_->code.size());
  }

  int declare(const std::string &name) {
    int slot = fn_->slots++;
    scopes_.back()[name] = slot;
    return slot;
  }

  int lookup(const std::string &name, Location loc) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (auto f = it->find(name); f != it->end())
        return f->second;
    throw Error(ErrorKind::ScopeError, "undeclared '" + name + "'", loc);
  }

  void block(const Block &b) {
    scopes_.emplace_back();
    for (const auto &s : b.stmts)
      stmt(*s);
    scopes_.pop_back();
  }

  void stmt(const Stmt &s) {
    bool syn = s.loc.synthetic;
    Instr mark{Op::Mark};
    mark.flag = !syn;
    mark.loc = s.loc;
    emit(mark);
    std::visit(
        [&](const auto &n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Decl>) {
            if (n.type.is_array()) {
              emit({Op::NewArray, declare(n.name),
                    static_cast<int>(n.type.length)});
            } else if (n.init) {
              rhs(*n.init, syn);
              emit({Op::Store, declare(n.name)});
            } else {
              emit({Op::DeclScalar, declare(n.name)});
            }
          } else if constexpr (std::is_same_v<T, Assign>) {
            int slot = lookup(n.name, s.loc);
            if (n.index) {
              value(*n.index, syn);
              rhs(*n.value, syn);
              Instr st{Op::StoreElem, slot};
              st.checked = true;
              st.loc = n.index->loc;
              emit(st);
            } else {
              rhs(*n.value, syn);
              emit({Op::Store, slot});
            }
          } else if constexpr (std::is_same_v<T, If>) {
            int then_l = label(), else_l = label(), end_l = label();
            condition(*n.cond, syn, then_l, else_l, s.loc);
            bind(then_l);
            block(n.then_block);
            emit({Op::Jump, end_l});
            bind(else_l);
            if (n.else_block)
              block(*n.else_block);
            bind(end_l);
          } else if constexpr (std::is_same_v<T, While>) {
            int head_l = label(), body_l = label(), exit_l = label();
            bind(head_l);
            block(n.head);
            emit({Op::Tick});
            control(*n.cond, body_l, exit_l, !syn);
            bind(body_l);
            block(n.body);
            emit({Op::Jump, head_l});
            bind(exit_l);
          } else if constexpr (std::is_same_v<T, Return>) {
            if (n.value)
              value(*n.value, syn);
            emit({Op::Ret, n.value ? 1 : 0});
          } else if constexpr (std::is_same_v<T, Block>) {
            block(n);
          } else if constexpr (std::is_same_v<T, LabelStmt> ||
                               std::is_same_v<T, SetCovered>) {
            throw Error(ErrorKind::ModeMismatch,
                        "labels must be instrumented before exploration",
                        s.loc);
          } else if constexpr (std::is_same_v<T, Nop>) {
            Instr in{Op::Nop};
            in.loc = s.loc;
            emit(in);
          } else if constexpr (std::is_same_v<T, Assert>) {
            value(*n.cond, true);
            Instr in{Op::Assert, guards_.empty() ? 0 : guards_.back()};
            in.loc = s.loc;
            emit(in);
          } else if constexpr (std::is_same_v<T, SilentExit>) {
            emit({Op::Exit});
          } else if constexpr (std::is_same_v<T, NondetGuard>) {
            int end_l = label();
            Instr in{Op::NondetFork, end_l, n.id};
            in.loc = s.loc;
            emit(in);
            guards_.push_back(n.id);
            block(n.body);
            guards_.pop_back();
            bind(end_l);
          } else if constexpr (std::is_same_v<T, CoveredGuard>) {
            int end_l = label();
            emit({Op::CoveredCheck, end_l, n.id});
            block(n.body);
            bind(end_l);
          }
        },
        s.node);
  }

  /// Synthetic conditions are evaluated as a whole, without forking on
  /// runtime errors.
  void condition(const Expr &e, bool syn, int t, int f, Location at) {
    if (!syn) {
      control(e, t, f, true);
      return;
    }
    value(e, true);
    Instr in{Op::GuardBranch, t, f};
    in.loc = at;
    emit(in);
  }

  void control(const Expr &e, int t, int f, bool record) {
    if (const auto *b = e.as<Binary>()) {
      if (b->op == BinOp::And || b->op == BinOp::Or) {
        int mid = label();
        if (b->op == BinOp::And)
          control(*b->lhs, mid, f, record);
        else
          control(*b->lhs, t, mid, record);
        bind(mid);
        control(*b->rhs, t, f, record);
        return;
      }
    }
    if (const auto *u = e.as<Unary>(); u && u->op == UnOp::Not) {
      control(*u->operand, f, t, record);
      return;
    }
    value(e, false);
    Instr in{Op::Branch, t, f};
    in.flag = record;
    in.loc = e.loc;
    emit(in);
  }

  void rhs(const Expr &e, bool syn) {
    const auto *c = e.as<CallExpr>();
    if (!c) {
      value(e, syn);
      return;
    }
    auto it = index_.find(c->callee);
    if (it == index_.end())
      throw Error(ErrorKind::UnknownEntry, "no function '" + c->callee + "'",
                  e.loc);
    const FunctionDef &callee = prog_.functions[static_cast<std::size_t>(it->second)];
    Instr call{Op::Call, it->second};
    call.loc = e.loc;
    for (std::size_t i = 0; i < c->args.size(); ++i) {
      if (i < callee.params.size() && callee.params[i].type.is_array()) {
        const auto *v = c->args[i]->as<VarRef>();
        if (!v)
          throw Error(ErrorKind::ModeMismatch, "array argument expected",
                      c->args[i]->loc);
        call.array_args.push_back(lookup(v->name, c->args[i]->loc));
      } else {
        value(*c->args[i], syn);
        call.array_args.push_back(-1);
      }
    }
    emit(call);
  }

  /// `guarded` evaluation never forks: errors poison the affected lanes.
  void value(const Expr &e, bool guarded) {
    std::visit(
        [&](const auto &n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            Instr in{Op::Const};
            in.k = n.value;
            emit(in);
          } else if constexpr (std::is_same_v<T, VarRef>) {
            emit({Op::Load, lookup(n.name, e.loc)});
          } else if constexpr (std::is_same_v<T, IndexRef>) {
            int slot = lookup(n.name, e.loc);
            value(*n.index, guarded);
            Instr in{Op::LoadElem, slot};
            in.checked = !guarded;
            in.loc = e.loc;
            emit(in);
          } else if constexpr (std::is_same_v<T, Unary>) {
            value(*n.operand, guarded);
            emit({n.op == UnOp::Neg ? Op::Neg : Op::Not});
          } else if constexpr (std::is_same_v<T, AbsCall>) {
            value(*n.operand, guarded);
            emit({Op::Abs});
          } else if constexpr (std::is_same_v<T, Binary>) {
            if (is_logical(n.op)) {
              if (guarded) {
                value(*n.lhs, true);
                value(*n.rhs, true);
                emit({n.op == BinOp::And ? Op::LAnd : Op::LOr});
                return;
              }
              int one = label(), zero = label(), end = label();
              control(e, one, zero, true);
              bind(one);
              Instr c1{Op::Const};
              c1.k = 1;
              emit(c1);
              emit({Op::Jump, end});
              bind(zero);
              Instr c0{Op::Const};
              c0.k = 0;
              emit(c0);
              bind(end);
              return;
            }
            value(*n.lhs, guarded);
            value(*n.rhs, guarded);
            Instr in{Op::Arith};
            in.bin = n.op;
            in.checked = !guarded;
            in.loc = e.loc;
            emit(in);
          } else if constexpr (std::is_same_v<T, NondetRef>) {
            throw Error(ErrorKind::ModeMismatch,
                        "nondet choice used as a value", e.loc);
          } else {
            throw Error(ErrorKind::ModeMismatch,
                        "call '" + n.callee + "' inside an expression", e.loc);
          }
        },
        e.node);
  }
};

//===----------------------------------------------------------------------===//
// States
//===----------------------------------------------------------------------===//

using Positions = std::vector<std::size_t>;

struct SymVal {
  std::vector<Int> lanes;
  /// Lanes whose guarded evaluation failed; empty when none did.
  std::vector<char> err;
  ExprPtr term;

  bool failed(std::size_t i) const { return !err.empty() && err[i]; }
};

template <class T> void compact(std::vector<T> &v, const Positions &keep) {
  if (v.empty())
    return;
  std::vector<T> out;
  out.reserve(keep.size());
  for (std::size_t i : keep)
    out.push_back(std::move(v[i]));
  v = std::move(out);
}

void compact(SymVal &v, const Positions &keep) {
  compact(v.lanes, keep);
  compact(v.err, keep);
}

struct ArrayObj {
  std::vector<SymVal> elems;
  /// Name of the input array while its contents are still the inputs.
  std::string input;
  bool live = true;
};

struct Frame {
  int fn = 0;
  std::size_t pc = 0;
  std::vector<SymVal> vals;
  std::vector<int> arrays;
  std::vector<char> owned;
};

struct State {
  std::vector<std::uint64_t> ranks;
  std::vector<Frame> frames;
  std::vector<SymVal> stack;
  std::vector<ArrayObj> heap;
  std::vector<int> free_arrays;
  PathCondition pc;
  std::vector<BranchEdge> edges;
  std::set<Location> nops;
  std::map<int, Int> visits;
  std::map<int, Int> taken;
  std::size_t steps = 0;
  std::size_t stmts = 0;

  void restrict_to(const Positions &keep) {
    compact(ranks, keep);
    for (auto &f : frames)
      for (auto &v : f.vals)
        compact(v, keep);
    for (auto &v : stack)
      compact(v, keep);
    for (auto &a : heap)
      for (auto &v : a.elems)
        compact(v, keep);
  }

  SymVal pop() {
    SymVal v = std::move(stack.back());
    stack.pop_back();
    return v;
  }
};

bool is_const(const ExprPtr &t) { return t && t->as<IntLit>(); }

/// Replaces a term by a literal when every surviving lane agrees. Later
/// conjuncts are only ever evaluated on assignments that survive this point,
/// so the literal is exact where it matters.
void fold(SymVal &v) {
  if (is_const(v.term) || v.lanes.empty())
    return;
  if (std::any_of(v.err.begin(), v.err.end(), [](char c) { return c; }))
    return;
  const Int &first = v.lanes.front();
  if (std::all_of(v.lanes.begin(), v.lanes.end(),
                  [&](const Int &x) { return x == first; }))
    v.term = make_int(first);
  v.err.clear();
}

Int arith(BinOp op, const Int &a, const Int &b) {
  switch (op) {
  case BinOp::Add: return a + b;
  case BinOp::Sub: return a - b;
  case BinOp::Mul: return a * b;
  case BinOp::Div: return a / b;
  case BinOp::Mod: return a % b;
  case BinOp::Lt: return Int(a < b ? 1 : 0);
  case BinOp::Le: return Int(a <= b ? 1 : 0);
  case BinOp::Gt: return Int(a > b ? 1 : 0);
  case BinOp::Ge: return Int(a >= b ? 1 : 0);
  case BinOp::Eq: return Int(a == b ? 1 : 0);
  case BinOp::Ne: return Int(a != b ? 1 : 0);
  default: return 0;
  }
}

//===----------------------------------------------------------------------===//
// Engine
//===----------------------------------------------------------------------===//

class Engine {
public:
  Engine(const Program &p, const Harness &h, const ExploreConfig &cfg,
         ExplorationHook *hook)
      : prog_(p), harness_(h), cfg_(cfg), hook_(hook), domain_(h) {
    Compiler c(p);
    code_ = c.run();
    entry_ = c.index_of(p.entry);
    for_each_stmt(p, [&](const Stmt &s) {
      if (const auto *g = s.as<NondetGuard>())
        guard_ids_.insert(g->id);
    });
  }

  ExplorationReport run() {
    start_ = std::chrono::steady_clock::now();
    if (domain_.prepare(cfg_.feasibility_budget) == 0)
      throw Error(ErrorKind::InfeasibleHarness, "input domain is empty");

    std::deque<State> work;
    work.push_back(initial());
    while (!work.empty()) {
      if (out_of_time()) {
        report_.timed_out = true;
        break;
      }
      if (paths() >= cfg_.max_paths) {
        report_.truncated = true;
        break;
      }
      State s = std::move(cfg_.strategy == Strategy::DFS ? work.back()
                                                         : work.front());
      if (cfg_.strategy == Strategy::DFS)
        work.pop_back();
      else
        work.pop_front();
      std::optional<State> other;
      Stop stop = execute(s, other);
      if (stop == Stop::OutOfTime) {
        report_.timed_out = true;
        break;
      }
      if (stop != Stop::Forked)
        continue;
      if (cfg_.strategy == Strategy::DFS) {
        work.push_back(std::move(*other));
        work.push_back(std::move(s));
      } else {
        work.push_back(std::move(s));
        work.push_back(std::move(*other));
      }
    }
    report_.wall_time_ms = elapsed_ms();
    return std::move(report_);
  }

private:
  enum class Stop { Terminated, Forked, OutOfTime };

  const Program &prog_;
  const Harness &harness_;
  const ExploreConfig &cfg_;
  ExplorationHook *hook_;
  Domain domain_;
  std::vector<Function> code_;
  int entry_ = 0;
  std::set<int> guard_ids_;
  ExplorationReport report_;
  std::chrono::steady_clock::time_point start_;
  std::set<std::pair<Location, bool>> covered_edges_;
  std::set<Location> covered_nops_;
  int next_test_ = 0;

  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }
  bool out_of_time() const {
    return elapsed_ms() >= static_cast<double>(cfg_.time_budget.count());
  }
  std::size_t paths() const {
    return report_.paths_complete + report_.paths_partial;
  }

  SymVal input(std::size_t var, const State &s, ExprPtr term) const {
    SymVal v;
    v.lanes.reserve(s.ranks.size());
    for (std::uint64_t r : s.ranks)
      v.lanes.push_back(domain_.value(var, r));
    v.term = std::move(term);
    return v;
  }

  State initial() {
    State s;
    s.ranks.resize(domain_.size());
    for (std::uint64_t i = 0; i < domain_.size(); ++i)
      s.ranks[i] = i;
    const Function &fn = code_[static_cast<std::size_t>(entry_)];
    Frame f;
    f.fn = entry_;
    f.vals.resize(static_cast<std::size_t>(fn.slots));
    f.arrays.assign(static_cast<std::size_t>(fn.slots), -1);
    f.owned.assign(static_cast<std::size_t>(fn.slots), 0);
    const auto &vars = domain_.vars();
    for (std::size_t p = 0; p < fn.params.size(); ++p) {
      const Param &param = fn.params[p];
      if (!param.type.is_array()) {
        auto it = std::find_if(vars.begin(), vars.end(), [&](const InputVar &v) {
          return !v.element && v.name == param.name;
        });
        if (it == vars.end())
          throw Error(ErrorKind::HarnessError,
                      "no domain for '" + param.name + "'", param.loc);
        f.vals[p] = input(static_cast<std::size_t>(it - vars.begin()), s,
                          make_var(param.name));
        continue;
      }
      ArrayObj arr;
      arr.input = param.name;
      for (std::size_t i = 0; i < param.type.length; ++i) {
        auto it = std::find_if(vars.begin(), vars.end(), [&](const InputVar &v) {
          return v.element && v.base == param.name && v.index == i;
        });
        if (it == vars.end())
          throw Error(ErrorKind::HarnessError,
                      "no domain for '" + element_name(param.name, i) + "'",
                      param.loc);
        arr.elems.push_back(
            input(static_cast<std::size_t>(it - vars.begin()), s,
                  make_index(param.name, make_int(Int(i)))));
      }
      s.heap.push_back(std::move(arr));
      f.arrays[p] = static_cast<int>(s.heap.size() - 1);
    }
    s.frames.push_back(std::move(f));
    return s;
  }

  SymVal constant(const State &s, const Int &k) const {
    return SymVal{std::vector<Int>(s.ranks.size(), k), {}, make_int(k)};
  }

  //===--------------------------------------------------------------------===//
  // Tests
  //===--------------------------------------------------------------------===//

  Model model_at(const State &s, std::size_t lane) const {
    Model m;
    for (std::size_t i = 0; i < domain_.vars().size(); ++i)
      m[domain_.vars()[i].name] = domain_.value(i, s.ranks[lane]);
    for (int id : guard_ids_) {
      auto it = s.taken.find(id);
      m["nondet_" + std::to_string(id)] = it == s.taken.end() ? Int(0) : it->second;
    }
    return m;
  }

  void emit(const State &s, std::size_t lane, std::optional<Conjunct> last,
            TestKind kind, int label_id, RteKind rte) {
    TestCase t;
    t.id = ++next_test_;
    t.assignment = model_at(s, lane);
    t.kind = kind;
    t.label_id = label_id;
    t.rte = rte;
    t.path_len = s.stmts;
    t.pc = s.pc;
    if (last)
      t.pc.conjuncts.push_back(std::move(*last));
    t.edges = s.edges;
    report_.tests.push_back(t);
    if (hook_)
      hook_->on_test(report_.tests.back());
  }

  void complete(const State &s) {
    ++report_.paths_complete;
    bool fresh = !cfg_.covering_new;
    for (const auto &e : s.edges)
      fresh = fresh || !covered_edges_.count({e.loc, e.taken});
    for (const auto &n : s.nops)
      fresh = fresh || !covered_nops_.count(n);
    if (!fresh)
      return;
    for (const auto &e : s.edges)
      covered_edges_.insert({e.loc, e.taken});
    covered_nops_.insert(s.nops.begin(), s.nops.end());
    emit(s, 0, std::nullopt, TestKind::Complete, 0, RteKind::DivByZero);
  }

  void forked(State &s, State &other, Location loc) {
    ++report_.forks;
    s.pc.fork_locs.push_back(loc);
    other.pc.fork_locs.push_back(loc);
  }

  /// Splits off the lanes that hit a runtime error. Returns false when no
  /// lane survives.
  bool rte_check(State &s, const Positions &bad, const Positions &good,
                 const ExprPtr &safe, RteKind kind) {
    ++report_.solver_calls;
    if (bad.empty())
      return true;
    State err_view;
    err_view.ranks = {s.ranks[bad.front()]};
    err_view.pc = s.pc;
    err_view.edges = s.edges;
    err_view.taken = s.taken;
    err_view.stmts = s.stmts;
    ++report_.paths_partial;
    if (!good.empty()) {
      ++report_.forks;
      s.pc.fork_locs.push_back(safe->loc);
      err_view.pc.fork_locs.push_back(safe->loc);
    }
    emit(err_view, 0, Conjunct{safe, Expect::Zero}, TestKind::RteErr, 0, kind);
    if (good.empty())
      return false;
    s.restrict_to(good);
    s.pc.conjuncts.push_back({safe, Expect::Nonzero});
    if (hook_)
      hook_->on_fork();
    return true;
  }

  ExprPtr in_bounds(const ExprPtr &idx, std::size_t len, Location loc) const {
    return make_binary(
        BinOp::And, make_binary(BinOp::Ge, idx, make_int(0), loc),
        make_binary(BinOp::Lt, idx, make_int(Int(len)), loc), loc);
  }

  /// Term for `arr[idx]`.
  ExprPtr read_term(const ArrayObj &arr, const SymVal &idx,
                    Location loc) const {
    std::size_t len = arr.elems.size();
    if (const auto *k = idx.term->as<IntLit>()) {
      if (k->value >= 0 && k->value < len)
        return arr.elems[static_cast<std::size_t>(k->value)].term;
    }
    if (!arr.input.empty())
      return make_index(arr.input, idx.term, loc);
    ExprPtr sum = make_int(0);
    for (std::size_t j = 0; j < len; ++j) {
      ExprPtr hit = make_binary(BinOp::Eq, idx.term, make_int(Int(j)), loc);
      sum = make_binary(BinOp::Add, sum,
                        make_binary(BinOp::Mul, hit, arr.elems[j].term, loc),
                        loc);
    }
    // 1 / in_bounds - 1 is 0 inside the array and a division error outside.
    ExprPtr guard = make_binary(
        BinOp::Sub,
        make_binary(BinOp::Div, make_int(1), in_bounds(idx.term, len, loc), loc),
        make_int(1), loc);
    return make_binary(BinOp::Add, sum, guard, loc);
  }

  int alloc_array(State &s, std::size_t len) {
    ArrayObj arr;
    for (std::size_t i = 0; i < len; ++i)
      arr.elems.push_back(constant(s, 0));
    if (!s.free_arrays.empty()) {
      int id = s.free_arrays.back();
      s.free_arrays.pop_back();
      s.heap[static_cast<std::size_t>(id)] = std::move(arr);
      return id;
    }
    s.heap.push_back(std::move(arr));
    return static_cast<int>(s.heap.size() - 1);
  }

  void release_frame(State &s, const Frame &f) {
    for (std::size_t i = 0; i < f.arrays.size(); ++i)
      if (f.owned[i] && f.arrays[i] >= 0) {
        auto &arr = s.heap[static_cast<std::size_t>(f.arrays[i])];
        arr.elems.clear();
        arr.live = false;
        s.free_arrays.push_back(f.arrays[i]);
      }
  }

  //===--------------------------------------------------------------------===//
  // Interpretation
  //===--------------------------------------------------------------------===//

  Stop execute(State &s, std::optional<State> &other) {
    std::size_t since_check = 0;
    for (;;) {
      if (++since_check == 4096) {
        since_check = 0;
        if (out_of_time())
          return Stop::OutOfTime;
      }
      Frame &fr = s.frames.back();
      const Instr &in = code_[static_cast<std::size_t>(fr.fn)].code[fr.pc++];
      std::size_t n = s.ranks.size();
      switch (in.op) {
      case Op::Const:
        s.stack.push_back(constant(s, in.k));
        break;
      case Op::Load:
        s.stack.push_back(fr.vals[static_cast<std::size_t>(in.a)]);
        break;
      case Op::Store:
        fr.vals[static_cast<std::size_t>(in.a)] = s.pop();
        break;
      case Op::DeclScalar:
        fr.vals[static_cast<std::size_t>(in.a)] = constant(s, 0);
        break;
      case Op::NewArray: {
        std::size_t slot = static_cast<std::size_t>(in.a);
        int id = fr.arrays[slot];
        if (fr.owned[slot] && id >= 0) {
          ArrayObj &arr = s.heap[static_cast<std::size_t>(id)];
          arr.input.clear();
          for (auto &e : arr.elems)
            e = constant(s, 0);
        } else {
          id = alloc_array(s, static_cast<std::size_t>(in.b));
          Frame &cur = s.frames.back();
          cur.arrays[slot] = id;
          cur.owned[slot] = 1;
        }
        break;
      }
      case Op::LoadElem: {
        SymVal idx = s.pop();
        if (!load_elem(s, in, std::move(idx)))
          return Stop::Terminated;
        break;
      }
      case Op::StoreElem: {
        SymVal val = s.pop();
        SymVal idx = s.pop();
        if (!store_elem(s, in, std::move(idx), std::move(val)))
          return Stop::Terminated;
        break;
      }
      case Op::Neg:
      case Op::Not:
      case Op::Abs: {
        SymVal &v = s.stack.back();
        for (std::size_t i = 0; i < n; ++i) {
          Int &x = v.lanes[i];
          if (in.op == Op::Neg)
            x = -x;
          else if (in.op == Op::Not)
            x = x == 0 ? 1 : 0;
          else if (x < 0)
            x = -x;
        }
        if (!is_const(v.term))
          v.term = in.op == Op::Abs ? make_abs(v.term)
                                    : make_unary(in.op == Op::Neg ? UnOp::Neg
                                                                  : UnOp::Not,
                                                 v.term);
        else
          v.term = make_int(v.lanes.front());
        fold(v);
        break;
      }
      case Op::Arith:
        if (!arithmetic(s, in))
          return Stop::Terminated;
        break;
      case Op::LAnd:
      case Op::LOr: {
        SymVal b = s.pop();
        SymVal &a = s.stack.back();
        bool is_and = in.op == Op::LAnd;
        std::vector<char> err(n, 0);
        bool any_err = false;
        for (std::size_t i = 0; i < n; ++i) {
          if (a.failed(i)) {
            err[i] = 1;
          } else if ((a.lanes[i] != 0) != is_and) {
            a.lanes[i] = is_and ? 0 : 1;
            continue;
          } else if (b.failed(i)) {
            err[i] = 1;
          } else {
            a.lanes[i] = b.lanes[i] != 0 ? 1 : 0;
            continue;
          }
          a.lanes[i] = 0;
          any_err = true;
        }
        a.err = any_err ? std::move(err) : std::vector<char>{};
        a.term = make_binary(is_and ? BinOp::And : BinOp::Or, a.term, b.term);
        fold(a);
        break;
      }
      case Op::Branch:
      case Op::GuardBranch:
        if (branch(s, in, other))
          return Stop::Forked;
        break;
      case Op::Jump:
        s.frames.back().pc = static_cast<std::size_t>(in.a);
        break;
      case Op::Mark:
        if (in.flag) {
          ++s.stmts;
          ++report_.stmts_executed;
        }
        [[fallthrough]];
      case Op::Tick:
        if (++s.steps > cfg_.max_steps_per_path) {
          ++report_.paths_partial;
          return Stop::Terminated;
        }
        break;
      case Op::Call: {
        const Function &callee = code_[static_cast<std::size_t>(in.a)];
        Frame f;
        f.fn = in.a;
        f.vals.resize(static_cast<std::size_t>(callee.slots));
        f.arrays.assign(static_cast<std::size_t>(callee.slots), -1);
        f.owned.assign(static_cast<std::size_t>(callee.slots), 0);
        for (std::size_t i = in.array_args.size(); i-- > 0;) {
          if (in.array_args[i] < 0)
            f.vals[i] = s.pop();
          else
            f.arrays[i] =
                fr.arrays[static_cast<std::size_t>(in.array_args[i])];
        }
        s.frames.push_back(std::move(f));
        break;
      }
      case Op::Ret: {
        if (s.frames.size() == 1) {
          complete(s);
          return Stop::Terminated;
        }
        SymVal result = in.a ? s.pop() : constant(s, 0);
        release_frame(s, s.frames.back());
        s.frames.pop_back();
        s.stack.push_back(std::move(result));
        break;
      }
      case Op::Nop:
        s.nops.insert(in.loc);
        break;
      case Op::Assert:
        if (!assertion(s, in))
          return Stop::Terminated;
        break;
      case Op::Exit:
        ++report_.paths_partial;
        return Stop::Terminated;
      case Op::NondetFork: {
        Int &visit = s.visits[in.b];
        ++visit;
        if (s.taken.count(in.b)) {
          s.frames.back().pc = static_cast<std::size_t>(in.a);
          break;
        }
        other = s;
        other->frames.back().pc = static_cast<std::size_t>(in.a);
        s.taken[in.b] = visit;
        forked(s, *other, in.loc);
        if (hook_)
          hook_->on_fork();
        return Stop::Forked;
      }
      case Op::CoveredCheck: {
        bool c = hook_ && hook_->covered(in.b);
        report_.guard_events.push_back({in.b, c});
        if (c)
          s.frames.back().pc = static_cast<std::size_t>(in.a);
        break;
      }
      }
    }
  }

  bool arithmetic(State &s, const Instr &in) {
    SymVal b = s.pop();
    SymVal a = s.pop();
    std::size_t n = s.ranks.size();
    bool divides = in.bin == BinOp::Div || in.bin == BinOp::Mod;
    RteKind kind =
        in.bin == BinOp::Div ? RteKind::DivByZero : RteKind::ModByZero;
    if (divides && in.checked) {
      Positions bad, good;
      for (std::size_t i = 0; i < n; ++i)
        (b.lanes[i] == 0 ? bad : good).push_back(i);
      if (!bad.empty()) {
        ExprPtr safe = make_binary(BinOp::Ne, b.term, make_int(0), in.loc);
        if (!rte_check(s, bad, good, safe, kind))
          return false;
        compact(a, good);
        compact(b, good);
        n = good.size();
      } else {
        ++report_.solver_calls;
      }
    }
    SymVal r;
    r.lanes.resize(n);
    bool any_err = false;
    std::vector<char> err(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (a.failed(i) || b.failed(i) || (divides && b.lanes[i] == 0)) {
        err[i] = 1;
        any_err = true;
        continue;
      }
      r.lanes[i] = arith(in.bin, a.lanes[i], b.lanes[i]);
    }
    if (any_err)
      r.err = std::move(err);
    if (is_const(a.term) && is_const(b.term) && !any_err)
      r.term = make_int(r.lanes.front());
    else
      r.term = make_binary(in.bin, a.term, b.term, in.loc);
    fold(r);
    s.stack.push_back(std::move(r));
    return true;
  }

  ArrayObj &array_of(State &s, int slot) {
    int id = s.frames.back().arrays[static_cast<std::size_t>(slot)];
    return s.heap[static_cast<std::size_t>(id)];
  }

  /// Bounds check on original code; returns false if no lane survives.
  bool check_index(State &s, const Instr &in, SymVal &idx, std::size_t len,
                   std::vector<SymVal *> also) {
    Positions bad, good;
    for (std::size_t i = 0; i < idx.lanes.size(); ++i)
      (idx.lanes[i] < 0 || idx.lanes[i] >= len ? bad : good).push_back(i);
    if (bad.empty()) {
      ++report_.solver_calls;
      return true;
    }
    if (!rte_check(s, bad, good, in_bounds(idx.term, len, in.loc),
                   RteKind::IndexOutOfBounds))
      return false;
    compact(idx, good);
    for (SymVal *v : also)
      compact(*v, good);
    return true;
  }

  bool load_elem(State &s, const Instr &in, SymVal idx) {
    std::size_t len = array_of(s, in.a).elems.size();
    if (in.checked && !check_index(s, in, idx, len, {}))
      return false;
    const ArrayObj &arr = array_of(s, in.a);
    std::size_t n = s.ranks.size();
    SymVal r;
    r.lanes.resize(n);
    std::vector<char> err(n, 0);
    bool any_err = false;
    for (std::size_t i = 0; i < n; ++i) {
      const Int &k = idx.lanes[i];
      if (idx.failed(i) || k < 0 || k >= len) {
        err[i] = 1;
        any_err = true;
        continue;
      }
      const SymVal &e = arr.elems[static_cast<std::size_t>(k)];
      r.lanes[i] = e.lanes[i];
    }
    if (any_err)
      r.err = std::move(err);
    r.term = read_term(arr, idx, in.loc);
    fold(r);
    s.stack.push_back(std::move(r));
    return true;
  }

  bool store_elem(State &s, const Instr &in, SymVal idx, SymVal val) {
    std::size_t len = array_of(s, in.a).elems.size();
    if (!check_index(s, in, idx, len, {&val}))
      return false;
    ArrayObj &arr = array_of(s, in.a);
    std::size_t n = s.ranks.size();
    if (const auto *k = idx.term->as<IntLit>()) {
      arr.elems[static_cast<std::size_t>(k->value)] = std::move(val);
    } else {
      std::vector<char> hit(len, 0);
      for (std::size_t i = 0; i < n; ++i) {
        auto j = static_cast<std::size_t>(idx.lanes[i]);
        arr.elems[j].lanes[i] = val.lanes[i];
        hit[j] = 1;
      }
      for (std::size_t j = 0; j < len; ++j) {
        if (!hit[j])
          continue;
        SymVal &e = arr.elems[j];
        ExprPtr is = make_binary(BinOp::Eq, idx.term, make_int(Int(j)));
        ExprPtr isnt = make_binary(BinOp::Ne, idx.term, make_int(Int(j)));
        e.term = make_binary(BinOp::Add, make_binary(BinOp::Mul, is, val.term),
                             make_binary(BinOp::Mul, isnt, e.term));
        fold(e);
      }
    }
    arr.input.clear();
    return true;
  }

  /// Returns true when the state forked into `s` (then) and `other` (else).
  bool branch(State &s, const Instr &in, std::optional<State> &other) {
    SymVal c = s.pop();
    bool guarded = in.op == Op::GuardBranch;
    Positions yes, no;
    for (std::size_t i = 0; i < c.lanes.size(); ++i)
      (!c.failed(i) && c.lanes[i] != 0 ? yes : no).push_back(i);
    ++report_.solver_calls;
    auto go = [&](State &st, bool taken) {
      if (in.flag)
        st.edges.push_back({in.loc, taken});
      st.frames.back().pc = static_cast<std::size_t>(taken ? in.a : in.b);
    };
    if (no.empty() || yes.empty()) {
      go(s, no.empty());
      return false;
    }
    other = s;
    s.restrict_to(yes);
    other->restrict_to(no);
    s.pc.conjuncts.push_back({c.term, Expect::Nonzero});
    other->pc.conjuncts.push_back(
        {c.term, guarded ? Expect::ZeroOrError : Expect::Zero});
    forked(s, *other, in.loc);
    go(s, true);
    go(*other, false);
    if (hook_)
      hook_->on_fork();
    return true;
  }

  /// Returns false when the path ends at the assertion.
  bool assertion(State &s, const Instr &in) {
    SymVal c = s.pop();
    Positions fail, pass;
    for (std::size_t i = 0; i < c.lanes.size(); ++i)
      (!c.failed(i) && c.lanes[i] == 0 ? fail : pass).push_back(i);
    ++report_.solver_calls;
    bool covered = hook_ && hook_->covered(in.a);
    report_.assert_events.push_back(
        {in.a, !fail.empty(), !pass.empty(), covered});
    if (fail.empty())
      return true;
    ++report_.paths_partial;
    if (!pass.empty()) {
      ++report_.forks;
      s.pc.fork_locs.push_back(in.loc);
    }
    emit(s, fail.front(), Conjunct{c.term, Expect::Zero}, TestKind::AssertErr,
         in.a, RteKind::DivByZero);
    if (pass.empty())
      return false;
    s.restrict_to(pass);
    s.pc.conjuncts.push_back({c.term, Expect::NonzeroOrError});
    if (hook_)
      hook_->on_fork();
    return true;
  }
};

} // namespace

ExplorationReport explore(const Program &p, const Harness &h,
                          const ExploreConfig &cfg, ExplorationHook *hook) {
  return Engine(p, h, cfg, hook).run();
}

std::vector<TestCase> classify_tests(const ExplorationReport &r, Mode m) {
  TestKind keep = m == Mode::Tight || m == Mode::Optim ? TestKind::AssertErr
                                                       : TestKind::Complete;
  std::vector<TestCase> out;
  for (const auto &t : r.tests)
    if (t.kind == keep)
      out.push_back(t);
  return out;
}

//===----------------------------------------------------------------------===//
// Test files
//===----------------------------------------------------------------------===//

void write_test(const fs::path &file, const Model &m) {
  std::ofstream out(file, std::ios::binary);
  if (!out)
    throw Error(ErrorKind::IoError, "cannot write " + file.string());
  for (const auto &[name, v] : m)
    out << name << '=' << v << '\n';
}

std::string stats_text(const ExplorationReport &r) {
  std::ostringstream os;
  os << "tests=" << r.tests.size() << '\n'
     << "paths_complete=" << r.paths_complete << '\n'
     << "paths_partial=" << r.paths_partial << '\n'
     << "forks=" << r.forks << '\n'
     << "solver_calls=" << r.solver_calls << '\n'
     << "stmts_executed=" << r.stmts_executed << '\n'
     << "wall_time_ms=" << static_cast<long long>(r.wall_time_ms) << '\n'
     << "timed_out=" << (r.timed_out ? 1 : 0) << '\n'
     << "truncated=" << (r.truncated ? 1 : 0) << '\n';
  return os.str();
}

void write_tests(const fs::path &dir, const ExplorationReport &r) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw Error(ErrorKind::IoError, "cannot create " + dir.string());
  for (const auto &t : r.tests) {
    std::string stem = "test_" + std::to_string(t.id);
    write_test(dir / (stem + ".kv"), t.assignment);
    if (t.kind != TestKind::Complete) {
      auto marker = dir / (stem + (t.kind == TestKind::AssertErr
                                       ? ".assert.err"
                                       : ".rte.err"));
      std::ofstream touch(marker);
      if (!touch)
        throw Error(ErrorKind::IoError, "cannot write " + marker.string());
    }
  }
  std::ofstream stats(dir / "stats.txt");
  if (!stats)
    throw Error(ErrorKind::IoError, "cannot write stats.txt");
  stats << stats_text(r);
}

TestCase read_test(const fs::path &file) {
  std::ifstream in(file);
  if (!in)
    throw Error(ErrorKind::IoError, "cannot read " + file.string());
  TestCase t;
  static const std::regex kLine(R"(^([A-Za-z_][A-Za-z0-9_]*(?:\[[0-9]+\])?)=(-?[0-9]+)$)");
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    std::smatch m;
    if (!std::regex_match(line, m, kLine))
      throw Error(ErrorKind::IoError,
                  file.string() + ": malformed line '" + line + "'");
    t.assignment[m[1]] = Int(m[2].str());
  }
  std::string stem = file.stem().string();
  static const std::regex kStem(R"(^test_([0-9]+)$)");
  std::smatch sm;
  if (std::regex_match(stem, sm, kStem))
    t.id = std::stoi(sm[1]);
  fs::path dir = file.parent_path();
  if (fs::exists(dir / (stem + ".assert.err"))) {
    t.kind = TestKind::AssertErr;
    for (const auto &[name, v] : t.assignment)
      if (name.rfind("nondet_", 0) == 0 && v != 0)
        t.label_id = std::stoi(name.substr(7));
  } else if (fs::exists(dir / (stem + ".rte.err"))) {
    t.kind = TestKind::RteErr;
  }
  return t;
}

std::vector<TestCase> read_tests(const fs::path &dir) {
  static const std::regex kName(R"(^test_([0-9]+)\.kv$)");
  std::vector<std::pair<int, fs::path>> found;
  std::error_code ec;
  for (const auto &entry : fs::directory_iterator(dir, ec)) {
    std::string name = entry.path().filename().string();
    std::smatch m;
    if (std::regex_match(name, m, kName))
      found.emplace_back(std::stoi(m[1]), entry.path());
  }
  if (ec)
    throw Error(ErrorKind::IoError, "cannot list " + dir.string());
  std::sort(found.begin(), found.end());
  std::vector<TestCase> out;
  for (const auto &[_, path] : found)
    out.push_back(read_test(path));
  return out;
}

} // namespace labelcov
