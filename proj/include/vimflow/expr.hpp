#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "vimflow/grid.hpp"

namespace vimflow {

// Analytic expressions over {x1,x2,x3,t}: literals, + - * / ^, unary -,
// and sin/cos/exp/tanh/log. Immutable after construction.

enum class Var : int { X1 = 0, X2 = 1, X3 = 2, T = 3 };

enum class Fn { Sin, Cos, Exp, Tanh, Log };

enum class BinOp { Add, Sub, Mul, Div, Pow };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { Num, Variable, Unary, Binary, Call } kind;
  double num = 0.0;
  Var var = Var::X1;
  BinOp op = BinOp::Add;
  Fn fn = Fn::Sin;
  Expr a, b;
};

Expr num(double v);
Expr var(Var v);
Expr neg(Expr e);
Expr bin(BinOp op, Expr a, Expr b);
Expr call(Fn f, Expr a);

inline Expr add(Expr a, Expr b) { return bin(BinOp::Add, std::move(a), std::move(b)); }
inline Expr sub(Expr a, Expr b) { return bin(BinOp::Sub, std::move(a), std::move(b)); }
inline Expr mul(Expr a, Expr b) { return bin(BinOp::Mul, std::move(a), std::move(b)); }
inline Expr divide(Expr a, Expr b) { return bin(BinOp::Div, std::move(a), std::move(b)); }

struct ParseError {
  std::size_t offset = 0;
  std::string message;
  std::string token;
};

using ParseResult = std::variant<Expr, ParseError>;

ParseResult parse(std::string_view text);

// Convenience for trusted (programmatic) inputs; throws on error.
Expr parse_or_throw(std::string_view text);

std::string print(const Expr& e);

Expr differentiate(const Expr& e, Var v);

double eval_point(const Expr& e, double x1, double x2, double x3, double t);
double eval_point(const Expr& e, const std::array<double, 4>& x);

// Pointwise evaluation at node coordinates. Throws NonFiniteError naming the
// first offending node in traversal order.
ScalarField eval_on_grid(const Expr& e, const GridSpec& g);

}  // namespace vimflow
