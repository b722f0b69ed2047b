#include "vimflow/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <stdexcept>

namespace vimflow {

Expr num(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Num;
  n->num = v;
  return n;
}

Expr var(Var v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Variable;
  n->var = v;
  return n;
}

Expr neg(Expr e) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Unary;
  n->a = std::move(e);
  return n;
}

Expr bin(BinOp op, Expr a, Expr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Binary;
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

Expr call(Fn f, Expr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Call;
  n->fn = f;
  n->a = std::move(a);
  return n;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Token {
  enum class Kind { Number, Ident, Sym, End } kind = Kind::End;
  std::size_t offset = 0;
  std::string text;
  double value = 0.0;
  char sym = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : src_(s) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  std::optional<ParseError> error;

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace((unsigned char)src_[pos_])) ++pos_;
    tok_ = Token{};
    tok_.offset = pos_;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::Kind::End;
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit((unsigned char)c) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isdigit((unsigned char)src_[pos_]) || src_[pos_] == '.'))
        ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t mark = pos_;
        ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
        if (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) {
          while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) ++pos_;
        } else {
          pos_ = mark;  // bare 'e' belongs to the next token
        }
      }
      tok_.kind = Token::Kind::Number;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      try {
        tok_.value = std::stod(tok_.text);
      } catch (const std::exception&) {
        error = ParseError{start, "malformed number", tok_.text};
      }
      return;
    }
    if (std::isalpha((unsigned char)c) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_'))
        ++pos_;
      tok_.kind = Token::Kind::Ident;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    if (std::string("+-*/^()").find(c) != std::string::npos) {
      tok_.kind = Token::Kind::Sym;
      tok_.sym = c;
      tok_.text = std::string(1, c);
      ++pos_;
      return;
    }
    error = ParseError{pos_, "unexpected character", std::string(1, c)};
    tok_.kind = Token::Kind::End;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(std::string_view s) : lex_(s) {}

  ParseResult run() {
    Expr e = additive();
    if (err_) return *err_;
    if (lex_.error) return *lex_.error;
    if (lex_.peek().kind != Token::Kind::End)
      return ParseError{lex_.peek().offset, "trailing input", lex_.peek().text};
    return e;
  }

 private:
  Expr fail(std::size_t offset, std::string msg, std::string token) {
    if (!err_) err_ = ParseError{offset, std::move(msg), std::move(token)};
    return num(0.0);
  }

  bool at_sym(char c) {
    return lex_.peek().kind == Token::Kind::Sym && lex_.peek().sym == c;
  }

  Expr additive() {
    Expr lhs = multiplicative();
    while (!err_ && (at_sym('+') || at_sym('-'))) {
      const char op = lex_.take().sym;
      Expr rhs = multiplicative();
      lhs = bin(op == '+' ? BinOp::Add : BinOp::Sub, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr multiplicative() {
    Expr lhs = unary();
    while (!err_ && (at_sym('*') || at_sym('/'))) {
      const char op = lex_.take().sym;
      Expr rhs = unary();
      lhs = bin(op == '*' ? BinOp::Mul : BinOp::Div, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr unary() {
    if (at_sym('-')) {
      lex_.take();
      return neg(unary());
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!err_ && at_sym('^')) {
      lex_.take();
      Expr exp = unary();  // right-associative
      return bin(BinOp::Pow, std::move(base), std::move(exp));
    }
    return base;
  }

  Expr primary() {
    if (err_) return num(0.0);
    const Token t = lex_.take();
    switch (t.kind) {
      case Token::Kind::Number:
        return num(t.value);
      case Token::Kind::Ident: {
        if (t.text == "x1") return var(Var::X1);
        if (t.text == "x2") return var(Var::X2);
        if (t.text == "x3") return var(Var::X3);
        if (t.text == "t") return var(Var::T);
        Fn fn;
        if (t.text == "sin") fn = Fn::Sin;
        else if (t.text == "cos") fn = Fn::Cos;
        else if (t.text == "exp") fn = Fn::Exp;
        else if (t.text == "tanh") fn = Fn::Tanh;
        else if (t.text == "log") fn = Fn::Log;
        else return fail(t.offset, "unknown identifier", t.text);
        if (!at_sym('('))
          return fail(lex_.peek().offset, "expected '(' after function name",
                      lex_.peek().text);
        lex_.take();
        Expr arg = additive();
        if (!err_ && !at_sym(')'))
          return fail(lex_.peek().offset, "expected ')'", lex_.peek().text);
        if (!err_) lex_.take();
        return call(fn, std::move(arg));
      }
      case Token::Kind::Sym:
        if (t.sym == '(') {
          Expr e = additive();
          if (!err_ && !at_sym(')'))
            return fail(lex_.peek().offset, "expected ')'", lex_.peek().text);
          if (!err_) lex_.take();
          return e;
        }
        return fail(t.offset, "unexpected symbol", t.text);
      case Token::Kind::End:
        return fail(t.offset, "unexpected end of input", "");
    }
    return fail(t.offset, "unexpected token", t.text);
  }

  Lexer lex_;
  std::optional<ParseError> err_;
};

}  // namespace

ParseResult parse(std::string_view text) { return Parser(text).run(); }

Expr parse_or_throw(std::string_view text) {
  ParseResult r = parse(text);
  if (auto* err = std::get_if<ParseError>(&r))
    throw std::invalid_argument("parse error at offset " + std::to_string(err->offset) +
                                ": " + err->message + " ('" + err->token + "') in \"" +
                                std::string(text) + "\"");
  return std::get<Expr>(r);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Exp: return "exp";
    case Fn::Tanh: return "tanh";
    case Fn::Log: return "log";
  }
  return "?";
}

void print_rec(const Expr& e, std::string& out) {
  switch (e->kind) {
    case ExprNode::Kind::Num: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", e->num);
      out += buf;
      break;
    }
    case ExprNode::Kind::Variable:
      out += (e->var == Var::X1 ? "x1" : e->var == Var::X2 ? "x2"
                                        : e->var == Var::X3 ? "x3" : "t");
      break;
    case ExprNode::Kind::Unary:
      out += "(-";
      print_rec(e->a, out);
      out += ")";
      break;
    case ExprNode::Kind::Binary: {
      const char* op = e->op == BinOp::Add ? "+" : e->op == BinOp::Sub ? "-"
                       : e->op == BinOp::Mul ? "*" : e->op == BinOp::Div ? "/" : "^";
      out += "(";
      print_rec(e->a, out);
      out += op;
      print_rec(e->b, out);
      out += ")";
      break;
    }
    case ExprNode::Kind::Call:
      out += fn_name(e->fn);
      out += "(";
      print_rec(e->a, out);
      out += ")";
      break;
  }
}

bool is_const(const Expr& e, double v) {
  return e->kind == ExprNode::Kind::Num && e->num == v;
}

// Light folding only: keeps derivative trees from ballooning.
Expr s_add(Expr a, Expr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return add(std::move(a), std::move(b));
}

Expr s_sub(Expr a, Expr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(std::move(b));
  return sub(std::move(a), std::move(b));
}

Expr s_mul(Expr a, Expr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return num(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return mul(std::move(a), std::move(b));
}

}  // namespace

std::string print(const Expr& e) {
  std::string out;
  print_rec(e, out);
  return out;
}

Expr differentiate(const Expr& e, Var v) {
  switch (e->kind) {
    case ExprNode::Kind::Num:
      return num(0.0);
    case ExprNode::Kind::Variable:
      return num(e->var == v ? 1.0 : 0.0);
    case ExprNode::Kind::Unary:
      return neg(differentiate(e->a, v));
    case ExprNode::Kind::Binary: {
      Expr da = differentiate(e->a, v);
      Expr db = differentiate(e->b, v);
      switch (e->op) {
        case BinOp::Add:
          return s_add(std::move(da), std::move(db));
        case BinOp::Sub:
          return s_sub(std::move(da), std::move(db));
        case BinOp::Mul:
          return s_add(s_mul(da, e->b), s_mul(e->a, db));
        case BinOp::Div:
          return divide(s_sub(s_mul(da, e->b), s_mul(e->a, db)),
                        mul(e->b, e->b));
        case BinOp::Pow: {
          if (e->b->kind == ExprNode::Kind::Num) {
            // power rule for constant exponents
            const double c = e->b->num;
            if (c == 0.0) return num(0.0);
            return s_mul(s_mul(num(c), bin(BinOp::Pow, e->a, num(c - 1.0))),
                         std::move(da));
          }
          // general exponent via a^b = exp(b*log(a))
          Expr inner = s_add(s_mul(db, call(Fn::Log, e->a)),
                             s_mul(e->b, divide(da, e->a)));
          return s_mul(e, std::move(inner));
        }
      }
      return num(0.0);
    }
    case ExprNode::Kind::Call: {
      Expr da = differentiate(e->a, v);
      switch (e->fn) {
        case Fn::Sin:
          return s_mul(call(Fn::Cos, e->a), std::move(da));
        case Fn::Cos:
          return s_mul(neg(call(Fn::Sin, e->a)), std::move(da));
        case Fn::Exp:
          return s_mul(e, std::move(da));
        case Fn::Tanh:
          return s_mul(s_sub(num(1.0), mul(e, e)), std::move(da));
        case Fn::Log:
          return divide(std::move(da), e->a);
      }
      return num(0.0);
    }
  }
  return num(0.0);
}

double eval_point(const Expr& e, const std::array<double, 4>& x) {
  switch (e->kind) {
    case ExprNode::Kind::Num:
      return e->num;
    case ExprNode::Kind::Variable:
      return x[int(e->var)];
    case ExprNode::Kind::Unary:
      return -eval_point(e->a, x);
    case ExprNode::Kind::Binary: {
      const double a = eval_point(e->a, x);
      const double b = eval_point(e->b, x);
      switch (e->op) {
        case BinOp::Add: return a + b;
        case BinOp::Sub: return a - b;
        case BinOp::Mul: return a * b;
        case BinOp::Div: return a / b;
        case BinOp::Pow: return std::pow(a, b);
      }
      return 0.0;
    }
    case ExprNode::Kind::Call: {
      const double a = eval_point(e->a, x);
      switch (e->fn) {
        case Fn::Sin: return std::sin(a);
        case Fn::Cos: return std::cos(a);
        case Fn::Exp: return std::exp(a);
        case Fn::Tanh: return std::tanh(a);
        case Fn::Log: return std::log(a);
      }
      return 0.0;
    }
  }
  return 0.0;
}

double eval_point(const Expr& e, double x1, double x2, double x3, double t) {
  return eval_point(e, std::array<double, 4>{x1, x2, x3, t});
}

ScalarField eval_on_grid(const Expr& e, const GridSpec& g) {
  g.validate();
  ScalarField out(g);
  const std::int64_t n = std::int64_t(g.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out.values[std::size_t(i)] = eval_point(e, g.point(std::size_t(i)));
  ensure_finite(out, "eval_on_grid");
  return out;
}

}  // namespace vimflow
