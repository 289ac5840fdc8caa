#include "l1deriv/rule.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

namespace l1d {

namespace {

std::string syntax_message(std::size_t position, const std::vector<std::string>& expected) {
  static const std::vector<std::string> kOperand = {"number", "'n'", "'('", "'-'"};
  std::string what;
  if (expected == kOperand) {
    what = "operand";
  } else {
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) what += (i + 1 == expected.size()) ? " or " : ", ";
      what += expected[i];
    }
  }
  return "SyntaxError at position " + std::to_string(position) + " (" + what + " expected)";
}

}  // namespace

SyntaxError::SyntaxError(std::size_t position, std::vector<std::string> expected)
    : Error(ErrorCode::Syntax, syntax_message(position, expected)),
      position_(position),
      expected_(std::move(expected)) {}

namespace rule {

EvaluationError::EvaluationError(double n, const std::string& what)
    : Error(ErrorCode::Evaluation, what), n_(n) {}

std::string format_literal(double value) {
  std::array<char, 512> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed);
  if (ec != std::errc{}) throw Error(ErrorCode::InvalidArgument, "literal not representable");
  return std::string(buf.data(), end);
}

ExprPtr literal(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    if (std::isfinite(value) && value < 0.0) return negate(literal(-value));
    throw Error(ErrorCode::InvalidArgument, "literal must be finite");
  }
  auto e = std::make_shared<Expr>();
  e->op = Op::Lit;
  e->value = value;
  e->text = format_literal(value);
  return e;
}

ExprPtr literal(std::string text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error(ErrorCode::InvalidArgument, "malformed literal '" + text + "'");
  auto e = std::make_shared<Expr>();
  e->op = Op::Lit;
  e->value = v;
  e->text = std::move(text);
  return e;
}

ExprPtr variable() {
  auto e = std::make_shared<Expr>();
  e->op = Op::Var;
  return e;
}

ExprPtr negate(ExprPtr operand) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Neg;
  e->lhs = std::move(operand);
  return e;
}

ExprPtr binary(Op op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

// ---------------------------------------------------------------- parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprPtr run() {
    ExprPtr e = expr();
    skip_ws();
    if (pos_ < src_.size()) fail({"operator", "end of input"});
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
      ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  [[noreturn]] void fail(std::vector<std::string> expected) { throw SyntaxError(pos_ + 1, std::move(expected)); }

  ExprPtr expr() {
    ExprPtr lhs = term();
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      lhs = binary(c == '+' ? Op::Add : Op::Sub, lhs, term());
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    for (char c = peek(); c == '*' || c == '/'; c = peek()) {
      ++pos_;
      lhs = binary(c == '*' ? Op::Mul : Op::Div, lhs, unary());
    }
    return lhs;
  }

  ExprPtr unary() {
    if (peek() == '-') {
      ++pos_;
      return negate(unary());
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (peek() == '^') {
      ++pos_;
      return binary(Op::Pow, base, unary());
    }
    return base;
  }

  ExprPtr primary() {
    char c = peek();
    if (c == 'n') {
      ++pos_;
      return variable();
    }
    if (c == '(') {
      ++pos_;
      ExprPtr inner = expr();
      if (peek() != ')') fail({"')'"});
      ++pos_;
      return inner;
    }
    if (c >= '0' && c <= '9') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
      if (pos_ < src_.size() && src_[pos_] == '.') {
        ++pos_;
        while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
      }
      return literal(std::string(src_.substr(start, pos_ - start)));
    }
    fail({"number", "'n'", "'('", "'-'"});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// Binding strength used by the printer: atoms > Pow > Neg > Mul/Div > Add/Sub.
int level(const Expr& e) {
  switch (e.op) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Pow:
      return 4;
    default:
      return 5;
  }
}

void print_into(std::ostringstream& out, const Expr& e);

void print_child(std::ostringstream& out, const Expr& child, bool parens) {
  if (parens) out << '(';
  print_into(out, child);
  if (parens) out << ')';
}

void print_into(std::ostringstream& out, const Expr& e) {
  switch (e.op) {
    case Op::Lit:
      out << e.text;
      return;
    case Op::Var:
      out << 'n';
      return;
    case Op::Neg:
      out << '-';
      print_child(out, *e.lhs, level(*e.lhs) < 3);
      return;
    case Op::Pow:
      print_child(out, *e.lhs, level(*e.lhs) < 5);
      out << " ^ ";
      print_child(out, *e.rhs, level(*e.rhs) < 3);
      return;
    default: {
      const int p = level(e);
      const char* sym = e.op == Op::Add ? " + " : e.op == Op::Sub ? " - " : e.op == Op::Mul ? " * " : " / ";
      print_child(out, *e.lhs, level(*e.lhs) < p);
      out << sym;
      print_child(out, *e.rhs, level(*e.rhs) <= p);
      return;
    }
  }
}

void dump_into(std::ostringstream& out, const Expr& e) {
  static constexpr std::array<const char*, 8> kNames = {"Lit", "Var", "Neg", "Add", "Sub", "Mul", "Div", "Pow"};
  switch (e.op) {
    case Op::Lit:
      out << "Lit " << e.text;
      return;
    case Op::Var:
      out << "Var n";
      return;
    case Op::Neg:
      out << "Neg(";
      dump_into(out, *e.lhs);
      out << ')';
      return;
    default:
      out << kNames[static_cast<std::size_t>(e.op)] << '(';
      dump_into(out, *e.lhs);
      out << ", ";
      dump_into(out, *e.rhs);
      out << ')';
  }
}

}  // namespace

ExprPtr parse(std::string_view text) { return Parser(text).run(); }

std::string print(const Expr& e) {
  std::ostringstream out;
  print_into(out, e);
  return out.str();
}

std::string dump(const Expr& e) {
  std::ostringstream out;
  dump_into(out, e);
  return out.str();
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::Lit:
      return a.text == b.text && a.value == b.value;
    case Op::Var:
      return true;
    case Op::Neg:
      return structurally_equal(*a.lhs, *b.lhs);
    default:
      return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
  }
}

double evaluate(const Expr& e, double n) {
  switch (e.op) {
    case Op::Lit:
      return e.value;
    case Op::Var:
      return n;
    case Op::Neg:
      return -evaluate(*e.lhs, n);
    case Op::Add:
      return evaluate(*e.lhs, n) + evaluate(*e.rhs, n);
    case Op::Sub:
      return evaluate(*e.lhs, n) - evaluate(*e.rhs, n);
    case Op::Mul:
      return evaluate(*e.lhs, n) * evaluate(*e.rhs, n);
    case Op::Div: {
      const double num = evaluate(*e.lhs, n);
      const double den = evaluate(*e.rhs, n);
      if (den == 0.0) throw EvaluationError(n, "division by zero at n = " + format_literal(n));
      return num / den;
    }
    case Op::Pow: {
      const double base = evaluate(*e.lhs, n);
      const double exponent = evaluate(*e.rhs, n);
      if (std::nearbyint(exponent) != exponent)
        throw EvaluationError(n, "non-integral exponent at n = " + format_literal(n));
      if (base == 0.0 && exponent < 0.0)
        throw EvaluationError(n, "zero raised to a negative power at n = " + format_literal(n));
      return std::pow(base, exponent);
    }
  }
  return 0.0;
}

bool depends_on_variable(const Expr& e) {
  switch (e.op) {
    case Op::Lit:
      return false;
    case Op::Var:
      return true;
    case Op::Neg:
      return depends_on_variable(*e.lhs);
    default:
      return depends_on_variable(*e.lhs) || depends_on_variable(*e.rhs);
  }
}

ExprPtr shift(const ExprPtr& e, std::int64_t offset) {
  if (offset == 0) return e;
  switch (e->op) {
    case Op::Lit:
      return e;
    case Op::Var: {
      const auto magnitude = static_cast<double>(offset < 0 ? -offset : offset);
      return binary(offset < 0 ? Op::Sub : Op::Add, variable(), literal(magnitude));
    }
    case Op::Neg:
      return negate(shift(e->lhs, offset));
    default:
      return binary(e->op, shift(e->lhs, offset), shift(e->rhs, offset));
  }
}

}  // namespace rule
}  // namespace l1d
