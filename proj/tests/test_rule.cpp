#include <doctest.h>

#include <random>

#include "l1deriv/rule.hpp"

using namespace l1d;
using namespace l1d::rule;

namespace {

ExprPtr random_tree(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
  switch (pick(rng)) {
    case 0: {
      static const char* lits[] = {"0", "1", "2", "3", "10", "0.5", "2.25", "1000", "0.125", "7"};
      return literal(std::string(lits[std::uniform_int_distribution<int>(0, 9)(rng)]));
    }
    case 1:
      return variable();
    case 2:
      return negate(random_tree(rng, depth - 1));
    case 3:
      return binary(Op::Add, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 4:
      return binary(Op::Sub, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 5:
      return binary(Op::Mul, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 6:
      return binary(Op::Div, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    default:
      return binary(Op::Pow, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
  }
}

std::string syntax_message(const std::string& text) {
  try {
    parse(text);
  } catch (const SyntaxError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("rule") {
  TEST_CASE("example parses dump byte-exact") {
    CHECK(dump(*parse("1/(n+1)")) == "Div(Lit 1, Add(Var n, Lit 1))");
    CHECK(dump(*parse("2^(-n)")) == "Pow(Lit 2, Neg(Var n))");
    CHECK(syntax_message("n*") == "SyntaxError at position 3 (operand expected)");
  }

  TEST_CASE("syntax error carries position and expected set") {
    try {
      parse("n*");
      FAIL("no error");
    } catch (const SyntaxError& e) {
      CHECK(e.position() == 3);
      CHECK(e.code() == ErrorCode::Syntax);
      CHECK(!e.expected().empty());
    }
    CHECK(syntax_message("(n+1").find("position 5") != std::string::npos);
    CHECK(syntax_message("n n").find("position 3") != std::string::npos);
    CHECK(syntax_message("").find("position 1") != std::string::npos);
    CHECK(syntax_message("1 $ 2").find("position 3") != std::string::npos);
  }

  TEST_CASE("precedence and associativity") {
    CHECK(dump(*parse("1-2-3")) == "Sub(Sub(Lit 1, Lit 2), Lit 3)");
    CHECK(dump(*parse("8/4/2")) == "Div(Div(Lit 8, Lit 4), Lit 2)");
    CHECK(dump(*parse("2^3^2")) == "Pow(Lit 2, Pow(Lit 3, Lit 2))");
    CHECK(dump(*parse("-n^2")) == "Neg(Pow(Var n, Lit 2))");
    CHECK(dump(*parse("1+2*n")) == "Add(Lit 1, Mul(Lit 2, Var n))");
    CHECK(dump(*parse("2^-n")) == "Pow(Lit 2, Neg(Var n))");
    CHECK(evaluate(*parse("2^3^2"), 0) == 512.0);
    CHECK(evaluate(*parse("-2^2"), 0) == -4.0);
    CHECK(evaluate(*parse("(n+1)*(n-1)"), 5) == 24.0);
  }

  TEST_CASE("evaluation errors are reported") {
    CHECK_THROWS_AS(evaluate(*parse("1/(n-3)"), 3), EvaluationError);
    CHECK_THROWS_AS(evaluate(*parse("2^0.5"), 1), EvaluationError);
    CHECK_THROWS_AS(evaluate(*parse("0^(-1)"), 1), EvaluationError);
    CHECK(evaluate(*parse("1/(n-3)"), 4) == 1.0);
    try {
      evaluate(*parse("1/(n-3)"), 3);
    } catch (const EvaluationError& e) {
      CHECK(e.at() == 3.0);
      CHECK(e.code() == ErrorCode::Evaluation);
    }
  }

  TEST_CASE("decimal literals keep their text") {
    auto e = parse("0.125*n");
    CHECK(print(*e) == "0.125 * n");
    CHECK(evaluate(*e, 8) == 1.0);
  }

  TEST_CASE("printer uses minimal parentheses") {
    CHECK(print(*parse("((n))")) == "n");
    CHECK(print(*parse("(1+n)+2")) == "1 + n + 2");
    CHECK(print(*parse("1+(n+2)")) == "1 + (n + 2)");
    CHECK(print(*parse("(2^3)^2")) == "(2 ^ 3) ^ 2");
    CHECK(print(*parse("(-n)^2")) == "(-n) ^ 2");
  }

  TEST_CASE("1000 random trees round-trip through print and parse") {
    std::mt19937_64 rng(20240101);
    for (int i = 0; i < 1000; ++i) {
      const ExprPtr t = random_tree(rng, 6);
      const std::string text = print(*t);
      const ExprPtr back = parse(text);
      INFO(text);
      REQUIRE(structurally_equal(*t, *back));
      CHECK(print(*back) == text);
    }
  }

  TEST_CASE("shift substitutes n + k") {
    auto e = shift(parse("1/(n+1)"), 2);
    CHECK(evaluate(*e, 0) == doctest::Approx(1.0 / 3.0));
    auto f = shift(parse("n*n"), -1);
    CHECK(evaluate(*f, 4) == 9.0);
    CHECK(depends_on_variable(*parse("n-n")));
    CHECK(!depends_on_variable(*parse("2^3")));
  }

  TEST_CASE("negative literals become negations") {
    CHECK(dump(*literal(-2.0)) == "Neg(Lit 2)");
    CHECK_THROWS_AS(literal(std::string("abc")), Error);
  }
}
