#pragma once

// Rule mini-language for sequences indexed by a single variable `n`.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'n' | '(' expr ')'
//
// Binary + - * / associate to the left, ^ to the right. Numbers are
// unsigned integer or decimal literals; negative constants are Neg(Lit).

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "l1deriv/error.hpp"

namespace l1d::rule {

enum class Op { Lit, Var, Neg, Add, Sub, Mul, Div, Pow };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  Op op = Op::Lit;
  double value = 0.0;  // Lit only
  std::string text;    // Lit only: the lexeme, kept for printing
  ExprPtr lhs;         // Neg operand, or left operand
  ExprPtr rhs;
};

/// Division by zero, a non-integral exponent, or 0 raised to a negative power.
class EvaluationError : public Error {
 public:
  EvaluationError(double n, const std::string& what);
  double at() const noexcept { return n_; }

 private:
  double n_;
};

ExprPtr literal(double value);
ExprPtr literal(std::string text);
ExprPtr variable();
ExprPtr negate(ExprPtr operand);
ExprPtr binary(Op op, ExprPtr lhs, ExprPtr rhs);

ExprPtr parse(std::string_view text);

/// Canonical text with minimal parentheses; parse(print(e)) is structurally equal to e.
std::string print(const Expr& e);

/// Tree dump, e.g. `Div(Lit 1, Add(Var n, Lit 1))`.
std::string dump(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

double evaluate(const Expr& e, double n);

bool depends_on_variable(const Expr& e);

/// The expression with every occurrence of n replaced by (n + offset).
ExprPtr shift(const ExprPtr& e, std::int64_t offset);

/// Shortest fixed-notation text that parses back to `value` (value >= 0).
std::string format_literal(double value);

}  // namespace l1d::rule
