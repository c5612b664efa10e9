//===-- parser.cpp - MiniC lexer and recursive-descent parser -------------===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//

#include "labelcov/error.hpp"
#include "labelcov/minic.hpp"

#include <cctype>
#include <set>

namespace labelcov {

namespace {

enum class Tok {
  Int,
  Ident,
  Punct,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n')
        advance(1);
      continue;
    }
    Token t{Tok::Punct, "", line, col};
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      t.kind = Tok::Int;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) ||
              src[j] == '_'))
        ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else {
      static const char *two[] = {"<=", ">=", "==", "!=", "&&", "||"};
      bool matched = false;
      for (const char *op : two) {
        if (src.substr(i, 2) == op) {
          t.text = op;
          advance(2);
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view("(){}[];,=+-*/%<>!").find(c) ==
            std::string_view::npos)
          throw Error(ErrorKind::SyntaxError,
                      std::string("unexpected character '") + c + "'",
                      Location{line, col});
        t.text = std::string(1, c);
        advance(1);
      }
    }
    out.push_back(std::move(t));
  }
  out.push_back(Token{Tok::End, "<end of input>", line, col});
  return out;
}

const std::set<std::string> kKeywords = {
    "int",   "if",          "else",      "while",         "return",
    "abs",   "__nop",       "__assert",  "__silent_exit", "__covered",
    "__set_covered", "__head"};

bool is_nondet_name(const std::string &s) {
  constexpr std::string_view prefix = "__nondet_";
  if (s.size() <= prefix.size() || s.compare(0, prefix.size(), prefix) != 0)
    return false;
  for (std::size_t i = prefix.size(); i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      return false;
  return true;
}

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program(const std::string &entry) {
    Program p;
    std::set<std::string> names;
    while (peek().kind != Tok::End) {
      FunctionDef f = function();
      if (!names.insert(f.name).second)
        throw Error(ErrorKind::DuplicateFunction,
                    "function '" + f.name + "' defined twice", f.loc);
      p.functions.push_back(std::move(f));
    }
    if (p.functions.empty())
      throw Error(ErrorKind::SyntaxError, "no entry function",
                  Location{peek().line, peek().column});
    p.entry = entry.empty() ? p.functions.back().name : entry;
    if (!p.find(p.entry))
      throw Error(ErrorKind::UnknownEntry,
                  "entry function '" + p.entry + "' is not defined");
    return p;
  }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::uint32_t seq_ = 0;

  const Token &peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool is(const char *text, std::size_t k = 0) const {
    const auto &t = peek(k);
    return t.kind != Tok::End && t.kind != Tok::Int && t.text == text;
  }
  Location loc_here() { return Location{peek().line, peek().column, ++seq_}; }
  Location loc_of(const Token &t) { return Location{t.line, t.column, ++seq_}; }

  [[noreturn]] void fail(const std::string &msg) {
    throw Error(ErrorKind::SyntaxError,
                msg + " near '" + peek().text + "'",
                Location{peek().line, peek().column});
  }

  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1)
      ++pos_;
    return t;
  }
  void expect(const char *text) {
    if (!is(text))
      fail(std::string("expected '") + text + "'");
    next();
  }
  std::string ident() {
    if (peek().kind != Tok::Ident || kKeywords.count(peek().text))
      fail("expected identifier");
    return next().text;
  }
  Int int_literal() {
    if (peek().kind != Tok::Int)
      fail("expected integer literal");
    return Int(next().text);
  }
  int small_int() {
    Int v = int_literal();
    if (v > 1'000'000'000)
      fail("integer too large");
    return static_cast<int>(v);
  }

  FunctionDef function() {
    FunctionDef f;
    f.loc = loc_here();
    expect("int");
    f.name = ident();
    expect("(");
    if (!is(")")) {
      do {
        Param p;
        p.loc = loc_here();
        expect("int");
        p.name = ident();
        if (is("[")) {
          next();
          p.type = Type::array(array_length());
          expect("]");
        }
        f.params.push_back(std::move(p));
      } while (is(",") && (next(), true));
    }
    expect(")");
    f.body = block();
    return f;
  }

  std::size_t array_length() {
    Int v = int_literal();
    if (v > 1'000'000)
      fail("array length too large");
    return static_cast<std::size_t>(v);
  }

  Block block() {
    expect("{");
    Block b;
    while (!is("}")) {
      if (peek().kind == Tok::End)
        fail("unterminated block");
      if (is("__head"))
        fail("'__head' is only allowed first in a loop body");
      b.stmts.push_back(statement());
    }
    next();
    return b;
  }

  StmtPtr statement() {
    Location loc = loc_here();
    if (is("int")) {
      next();
      Decl d;
      d.name = ident();
      if (is("[")) {
        next();
        d.type = Type::array(array_length());
        expect("]");
      } else if (is("=")) {
        next();
        d.init = expr();
      }
      expect(";");
      return make_stmt(std::move(d), loc);
    }
    if (is("if"))
      return if_statement(loc);
    if (is("while")) {
      next();
      expect("(");
      While w;
      w.cond = expr();
      expect(")");
      expect("{");
      if (is("__head")) {
        next();
        w.head = block();
      }
      while (!is("}")) {
        if (peek().kind == Tok::End)
          fail("unterminated block");
        if (is("__head"))
          fail("'__head' is only allowed first in a loop body");
        w.body.stmts.push_back(statement());
      }
      next();
      return make_stmt(std::move(w), loc);
    }
    if (is("return")) {
      next();
      Return r;
      if (!is(";"))
        r.value = expr();
      expect(";");
      return make_stmt(std::move(r), loc);
    }
    if (is("{"))
      return make_stmt(block(), loc);
    if (is("__nop") || is("__silent_exit")) {
      bool nop = is("__nop");
      next();
      expect("(");
      expect(")");
      expect(";");
      loc.synthetic = true;
      return nop ? make_stmt(Nop{}, loc) : make_stmt(SilentExit{}, loc);
    }
    if (is("__assert")) {
      next();
      expect("(");
      Assert a{expr()};
      expect(")");
      expect(";");
      loc.synthetic = true;
      return make_stmt(std::move(a), loc);
    }
    if (is("__set_covered")) {
      next();
      expect("(");
      SetCovered s{small_int()};
      expect(")");
      expect(";");
      loc.synthetic = true;
      return make_stmt(s, loc);
    }
    if (peek().kind == Tok::Ident && !kKeywords.count(peek().text)) {
      Assign a;
      a.name = ident();
      if (is("[")) {
        next();
        a.index = expr();
        expect("]");
      }
      expect("=");
      a.value = expr();
      expect(";");
      return make_stmt(std::move(a), loc);
    }
    fail("expected statement");
  }

  StmtPtr if_statement(Location loc) {
    next(); // if
    expect("(");
    // Instrumentation guards have a fixed shape.
    if (peek().kind == Tok::Ident && is_nondet_name(peek().text) &&
        is(")", 1)) {
      int id = std::stoi(next().text.substr(9));
      next();
      loc.synthetic = true;
      return make_stmt(NondetGuard{id, block()}, loc);
    }
    if (is("!") && is("__covered", 1) && is("(", 2) &&
        peek(3).kind == Tok::Int && is(")", 4) && is(")", 5)) {
      next();
      next();
      next();
      int id = small_int();
      next();
      next();
      loc.synthetic = true;
      return make_stmt(CoveredGuard{id, block()}, loc);
    }
    If s;
    s.cond = expr();
    expect(")");
    s.then_block = block();
    if (is("else")) {
      next();
      if (is("if")) {
        Location inner = loc_here();
        Block b;
        b.stmts.push_back(if_statement(inner));
        s.else_block = std::move(b);
      } else {
        s.else_block = block();
      }
    }
    // `if (p) { __nop(); }` and `if (p) { __set_covered(n); }` are label
    // instrumentation, never user branches.
    if (!s.else_block && s.then_block.stmts.size() == 1) {
      const Stmt &only = *s.then_block.stmts.front();
      if (only.as<Nop>() || only.as<SetCovered>())
        loc.synthetic = true;
    }
    return make_stmt(std::move(s), loc);
  }

  // Precedence climbing, C levels.
  ExprPtr expr() { return binary(0); }

  static int precedence(const std::string &op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "/" || op == "%") return 6;
    return -1;
  }

  static BinOp to_binop(const std::string &op) {
    static const std::pair<const char *, BinOp> table[] = {
        {"+", BinOp::Add}, {"-", BinOp::Sub},  {"*", BinOp::Mul},
        {"/", BinOp::Div}, {"%", BinOp::Mod},  {"<", BinOp::Lt},
        {"<=", BinOp::Le}, {">", BinOp::Gt},   {">=", BinOp::Ge},
        {"==", BinOp::Eq}, {"!=", BinOp::Ne},  {"&&", BinOp::And},
        {"||", BinOp::Or}};
    for (const auto &[s, b] : table)
      if (op == s)
        return b;
    return BinOp::Add;
  }

  ExprPtr binary(int min_prec) {
    ExprPtr lhs = unary();
    for (;;) {
      const Token &t = peek();
      if (t.kind != Tok::Punct)
        return lhs;
      int prec = precedence(t.text);
      if (prec < 0 || prec < min_prec)
        return lhs;
      Location loc = loc_of(t);
      BinOp op = to_binop(next().text);
      ExprPtr rhs = binary(prec + 1);
      lhs = make_binary(op, std::move(lhs), std::move(rhs), loc);
    }
  }

  ExprPtr unary() {
    if (is("-") || is("!")) {
      Location loc = loc_here();
      bool neg = next().text == "-";
      // `-7` is a literal; `-(7)` stays a negation.
      if (neg && peek().kind == Tok::Int)
        return make_int(-int_literal(), loc);
      ExprPtr operand = unary();
      return make_unary(neg ? UnOp::Neg : UnOp::Not, std::move(operand), loc);
    }
    return primary();
  }

  ExprPtr primary() {
    Location loc = loc_here();
    if (peek().kind == Tok::Int)
      return make_int(int_literal(), loc);
    if (is("(")) {
      next();
      ExprPtr e = expr();
      expect(")");
      return e;
    }
    if (is("abs")) {
      next();
      expect("(");
      ExprPtr e = expr();
      expect(")");
      return make_abs(std::move(e), loc);
    }
    if (peek().kind == Tok::Ident && is_nondet_name(peek().text)) {
      std::string name = next().text.substr(2);
      return std::make_shared<const Expr>(Expr{loc, NondetRef{name}});
    }
    std::string name = ident();
    if (is("[")) {
      next();
      ExprPtr idx = expr();
      expect("]");
      return make_index(std::move(name), std::move(idx), loc);
    }
    if (is("(")) {
      next();
      std::vector<ExprPtr> args;
      if (!is(")")) {
        do {
          args.push_back(expr());
        } while (is(",") && (next(), true));
      }
      expect(")");
      return make_call(std::move(name), std::move(args), loc);
    }
    return make_var(std::move(name), loc);
  }
};

} // namespace

Program parse(std::string_view source, const std::string &entry) {
  Parser p(lex(source));
  return p.program(entry);
}

} // namespace labelcov
