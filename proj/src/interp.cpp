//===-- interp.cpp - MiniC reference interpreter --------------------------===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//
//
// A direct AST walker. Conditions of original code are evaluated atom by atom
// so that the branch edges it records line up with the forks of the symbolic
// explorer. Synthetic conditions (label checks) are evaluated as a whole with
// runtime errors mapped to "false".
//
//===----------------------------------------------------------------------===//

#include "labelcov/error.hpp"
#include "labelcov/minic.hpp"

namespace labelcov {

const char *to_string(RteKind kind) {
  switch (kind) {
  case RteKind::DivByZero: return "DivByZero";
  case RteKind::ModByZero: return "ModByZero";
  case RteKind::IndexOutOfBounds: return "IndexOutOfBounds";
  }
  return "Rte";
}

namespace {

struct RteSignal {
  RteKind kind;
  Location loc;
};

Int abs_of(const Int &v) { return v < 0 ? Int(-v) : v; }

Int arith(BinOp op, const Int &a, const Int &b, Location loc) {
  switch (op) {
  case BinOp::Add: return a + b;
  case BinOp::Sub: return a - b;
  case BinOp::Mul: return a * b;
  case BinOp::Div:
    if (b == 0)
      throw RteSignal{RteKind::DivByZero, loc};
    return a / b; // cpp_int truncates toward zero, as C does
  case BinOp::Mod:
    if (b == 0)
      throw RteSignal{RteKind::ModByZero, loc};
    return a % b;
  case BinOp::Lt: return a < b ? 1 : 0;
  case BinOp::Le: return a <= b ? 1 : 0;
  case BinOp::Gt: return a > b ? 1 : 0;
  case BinOp::Ge: return a >= b ? 1 : 0;
  case BinOp::Eq: return a == b ? 1 : 0;
  case BinOp::Ne: return a != b ? 1 : 0;
  default: break;
  }
  return 0;
}

/// `Env` provides scalar(name) and element(name, index, loc).
template <class Env> class Evaluator {
public:
  Evaluator(const Env &env, std::vector<BranchEdge> *edges)
      : env_(env), edges_(edges) {}

  Int value(const Expr &e) {
    return std::visit(
        [&](const auto &n) -> Int {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, VarRef>) {
            return env_.scalar(n.name);
          } else if constexpr (std::is_same_v<T, NondetRef>) {
            return env_.scalar(n.name);
          } else if constexpr (std::is_same_v<T, IndexRef>) {
            return env_.element(n.name, value(*n.index), e.loc);
          } else if constexpr (std::is_same_v<T, AbsCall>) {
            return abs_of(value(*n.operand));
          } else if constexpr (std::is_same_v<T, Unary>) {
            Int v = value(*n.operand);
            return n.op == UnOp::Neg ? Int(-v) : Int(v == 0 ? 1 : 0);
          } else if constexpr (std::is_same_v<T, Binary>) {
            if (is_logical(n.op))
              return truth(e) ? 1 : 0;
            Int a = value(*n.lhs);
            Int b = value(*n.rhs);
            return arith(n.op, a, b, e.loc);
          } else {
            throw Error(ErrorKind::ModeMismatch,
                        "call '" + n.callee + "' inside an expression", e.loc);
          }
        },
        e.node);
  }

  bool truth(const Expr &e) {
    if (const auto *b = e.as<Binary>()) {
      if (b->op == BinOp::And)
        return truth(*b->lhs) && truth(*b->rhs);
      if (b->op == BinOp::Or)
        return truth(*b->lhs) || truth(*b->rhs);
    }
    if (const auto *u = e.as<Unary>(); u && u->op == UnOp::Not)
      return !truth(*u->operand);
    bool t = value(e) != 0;
    if (edges_)
      edges_->push_back({e.loc, t});
    return t;
  }

private:
  const Env &env_;
  std::vector<BranchEdge> *edges_;
};

struct MapEnv {
  const std::map<std::string, Value> &vars;

  Int scalar(const std::string &name) const {
    auto it = vars.find(name);
    if (it == vars.end()) {
      if (name.rfind("nondet_", 0) == 0)
        return 0;
      throw Error(ErrorKind::InputMissing, "no value for '" + name + "'");
    }
    if (const Int *v = std::get_if<Int>(&it->second))
      return *v;
    throw Error(ErrorKind::InputMissing, "'" + name + "' is an array");
  }

  Int element(const std::string &name, const Int &idx, Location loc) const {
    auto it = vars.find(name);
    const auto *arr =
        it == vars.end() ? nullptr : std::get_if<std::vector<Int>>(&it->second);
    if (!arr)
      throw Error(ErrorKind::InputMissing, "no array '" + name + "'");
    if (idx < 0 || idx >= arr->size())
      throw RteSignal{RteKind::IndexOutOfBounds, loc};
    return (*arr)[static_cast<std::size_t>(idx)];
  }
};

//===----------------------------------------------------------------------===//
// Machine
//===----------------------------------------------------------------------===//

struct Slot {
  Int scalar;
  std::shared_ptr<std::vector<Int>> array;
};

struct Frame {
  std::vector<std::map<std::string, Slot>> scopes;

  Slot *find(const std::string &name) {
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it)
      if (auto f = it->find(name); f != it->end())
        return &f->second;
    return nullptr;
  }
};

struct StepSignal {};

class Machine {
public:
  Machine(const Program &p, const Inputs &in, const LabelHook &hook,
          std::size_t limit)
      : prog_(p), inputs_(in), hook_(hook), limit_(limit) {}

  ExecResult run() {
    const FunctionDef &entry = prog_.entry_function();
    Frame frame;
    frame.scopes.emplace_back();
    for (const auto &param : entry.params) {
      auto it = inputs_.find(param.name);
      if (it == inputs_.end())
        throw Error(ErrorKind::InputMissing,
                    "no value for parameter '" + param.name + "'", param.loc);
      Slot slot;
      if (param.type.is_array()) {
        const auto *arr = std::get_if<std::vector<Int>>(&it->second);
        if (!arr || arr->size() != param.type.length)
          throw Error(ErrorKind::InputMissing,
                      "'" + param.name + "' needs " +
                          std::to_string(param.type.length) + " elements",
                      param.loc);
        slot.array = std::make_shared<std::vector<Int>>(*arr);
      } else {
        const Int *v = std::get_if<Int>(&it->second);
        if (!v)
          throw Error(ErrorKind::InputMissing,
                      "'" + param.name + "' must be a scalar", param.loc);
        slot.scalar = *v;
      }
      frame.scopes.back().emplace(param.name, std::move(slot));
    }
    frames_.push_back(std::move(frame));
    try {
      Flow f = body(entry.body, false);
      if (f != Flow::Stop)
        result_.outcome = outcome::Returned{ret_};
    } catch (const StepSignal &) {
      result_.outcome = outcome::StepLimit{};
    }
    return std::move(result_);
  }

  // Environment interface for Evaluator.
  Int scalar(const std::string &name) const {
    if (name.rfind("nondet_", 0) == 0) {
      auto it = inputs_.find(name);
      const Int *v = it == inputs_.end() ? nullptr : std::get_if<Int>(&it->second);
      return v ? *v : Int(0);
    }
    Slot *s = const_cast<Frame &>(frames_.back()).find(name);
    if (!s)
      throw Error(ErrorKind::InputMissing, "unbound variable '" + name + "'");
    return s->scalar;
  }

  Int element(const std::string &name, const Int &idx, Location loc) const {
    Slot *s = const_cast<Frame &>(frames_.back()).find(name);
    if (!s || !s->array)
      throw Error(ErrorKind::InputMissing, "unbound array '" + name + "'");
    if (idx < 0 || idx >= s->array->size())
      throw RteSignal{RteKind::IndexOutOfBounds, loc};
    return (*s->array)[static_cast<std::size_t>(idx)];
  }

private:
  enum class Flow { Next, Return, Stop };

  const Program &prog_;
  const Inputs &inputs_;
  const LabelHook &hook_;
  std::size_t limit_;
  ExecResult result_;
  std::vector<Frame> frames_;
  std::map<int, Int> visits_;
  std::vector<int> guards_;
  std::optional<Int> ret_;

  void step() {
    if (++result_.steps > limit_)
      throw StepSignal{};
  }

  Evaluator<Machine> eval(bool synthetic) {
    return Evaluator<Machine>(*this, synthetic ? nullptr : &result_.edges);
  }

  /// Guarded evaluation; nullopt when a runtime error occurs.
  std::optional<Int> guarded(const Expr &e) {
    try {
      return eval(true).value(e);
    } catch (const RteSignal &) {
      return std::nullopt;
    }
  }

  void label(int id, bool truth) {
    result_.label_events.push_back({id, truth});
    if (hook_)
      hook_(id, truth);
  }

  Flow body(const Block &b, bool synthetic) {
    frames_.back().scopes.emplace_back();
    Flow f = Flow::Next;
    for (const auto &s : b.stmts) {
      f = stmt(*s, synthetic);
      if (f != Flow::Next)
        break;
    }
    frames_.back().scopes.pop_back();
    return f;
  }

  Flow stmt(const Stmt &s, bool) {
    bool synthetic = s.loc.synthetic;
    step();
    if (!synthetic)
      result_.visited.push_back(s.loc);
    try {
      return dispatch(s, synthetic);
    } catch (const RteSignal &rte) {
      result_.outcome = outcome::RuntimeError{rte.kind, rte.loc};
      return Flow::Stop;
    }
  }

  Slot store_slot(const Type &t, const ExprPtr &init, bool synthetic) {
    Slot slot;
    if (t.is_array())
      slot.array = std::make_shared<std::vector<Int>>(t.length, Int(0));
    else if (init)
      slot.scalar = rhs(*init, synthetic);
    return slot;
  }

  Int rhs(const Expr &e, bool synthetic) {
    if (const auto *c = e.as<CallExpr>())
      return call(*c, e.loc, synthetic);
    return eval(synthetic).value(e);
  }

  Int call(const CallExpr &c, Location loc, bool synthetic) {
    const FunctionDef *fn = prog_.find(c.callee);
    if (!fn)
      throw Error(ErrorKind::UnknownEntry, "no function '" + c.callee + "'",
                  loc);
    Frame callee;
    callee.scopes.emplace_back();
    for (std::size_t i = 0; i < fn->params.size() && i < c.args.size(); ++i) {
      Slot slot;
      if (fn->params[i].type.is_array()) {
        const auto *v = c.args[i]->as<VarRef>();
        Slot *src = v ? frames_.back().find(v->name) : nullptr;
        if (!src || !src->array)
          throw Error(ErrorKind::InputMissing, "array argument expected", loc);
        slot.array = src->array; // arrays are passed by reference
      } else {
        slot.scalar = eval(synthetic).value(*c.args[i]);
      }
      callee.scopes.back().emplace(fn->params[i].name, std::move(slot));
    }
    frames_.push_back(std::move(callee));
    ret_.reset();
    Flow f = body(fn->body, synthetic);
    frames_.pop_back();
    if (f == Flow::Stop)
      throw Halt{};
    Int v = ret_.value_or(0);
    ret_.reset();
    return v;
  }

  struct Halt {};

  Flow dispatch(const Stmt &s, bool synthetic) {
    try {
      return dispatch_inner(s, synthetic);
    } catch (const Halt &) {
      return Flow::Stop;
    }
  }

  Flow dispatch_inner(const Stmt &s, bool synthetic) {
    return std::visit(
        [&](const auto &n) -> Flow {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Decl>) {
            Slot slot = store_slot(n.type, n.init, synthetic);
            frames_.back().scopes.back()[n.name] = std::move(slot);
            return Flow::Next;
          } else if constexpr (std::is_same_v<T, Assign>) {
            Slot *slot = frames_.back().find(n.name);
            if (!slot)
              throw Error(ErrorKind::InputMissing,
                          "unbound variable '" + n.name + "'", s.loc);
            if (n.index) {
              Int idx = eval(synthetic).value(*n.index);
              Int v = rhs(*n.value, synthetic);
              if (idx < 0 || idx >= slot->array->size())
                throw RteSignal{RteKind::IndexOutOfBounds, n.index->loc};
              (*slot->array)[static_cast<std::size_t>(idx)] = v;
            } else {
              slot->scalar = rhs(*n.value, synthetic);
            }
            return Flow::Next;
          } else if constexpr (std::is_same_v<T, If>) {
            bool t;
            if (synthetic) {
              auto v = guarded(*n.cond);
              t = v && *v != 0;
            } else {
              t = eval(false).truth(*n.cond);
              result_.decisions.push_back({s.loc, t});
            }
            if (t)
              return body(n.then_block, synthetic);
            if (n.else_block)
              return body(*n.else_block, synthetic);
            return Flow::Next;
          } else if constexpr (std::is_same_v<T, While>) {
            for (;;) {
              Flow h = body(n.head, synthetic);
              if (h != Flow::Next)
                return h;
              step();
              bool t = eval(synthetic).truth(*n.cond);
              if (!synthetic)
                result_.decisions.push_back({s.loc, t});
              if (!t)
                return Flow::Next;
              Flow f = body(n.body, synthetic);
              if (f != Flow::Next)
                return f;
            }
          } else if constexpr (std::is_same_v<T, Return>) {
            ret_.reset();
            if (n.value)
              ret_ = eval(synthetic).value(*n.value);
            if (frames_.size() == 1) {
              result_.outcome = outcome::Returned{ret_};
              return Flow::Stop;
            }
            return Flow::Return;
          } else if constexpr (std::is_same_v<T, Block>) {
            return body(n, synthetic);
          } else if constexpr (std::is_same_v<T, LabelStmt>) {
            auto v = guarded(*n.predicate);
            label(n.id, v && *v != 0);
            return Flow::Next;
          } else if constexpr (std::is_same_v<T, Nop>) {
            return Flow::Next;
          } else if constexpr (std::is_same_v<T, Assert>) {
            auto v = guarded(*n.cond);
            if (v && *v == 0) {
              result_.outcome = outcome::AssertFailed{
                  s.loc, guards_.empty() ? 0 : guards_.back()};
              return Flow::Stop;
            }
            return Flow::Next;
          } else if constexpr (std::is_same_v<T, SilentExit>) {
            result_.outcome = outcome::SilentExited{};
            return Flow::Stop;
          } else if constexpr (std::is_same_v<T, NondetGuard>) {
            Int &visit = visits_[n.id];
            ++visit;
            if (scalar("nondet_" + std::to_string(n.id)) != visit)
              return Flow::Next;
            guards_.push_back(n.id);
            Flow f = body(n.body, true);
            guards_.pop_back();
            return f;
          } else if constexpr (std::is_same_v<T, CoveredGuard>) {
            // No store is attached to a plain run: nothing counts as covered.
            return body(n.body, true);
          } else if constexpr (std::is_same_v<T, SetCovered>) {
            label(n.id, true);
            return Flow::Next;
          }
        },
        s.node);
  }
};

} // namespace

ExecResult interpret(const Program &p, const Inputs &input,
                     const LabelHook &hook, std::size_t step_limit) {
  return Machine(p, input, hook, step_limit).run();
}

EvalResult evaluate(const Expr &e, const std::map<std::string, Value> &env) {
  MapEnv m{env};
  try {
    return {Evaluator<MapEnv>(m, nullptr).value(e), RteKind::DivByZero};
  } catch (const RteSignal &rte) {
    return {std::nullopt, rte.kind};
  }
}

bool guarded_truth(const Expr &e, const std::map<std::string, Value> &env) {
  EvalResult r = evaluate(e, env);
  return r.ok() && *r.value != 0;
}

} // namespace labelcov
