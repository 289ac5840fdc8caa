#include <doctest.h>

#include <cmath>

#include "l1deriv/asymptotics.hpp"

using namespace l1d;
using namespace l1d::asym;

namespace {

// Brute-force check of the tail bounds on a window past valid_from.
void check_bounds(const char* text, Index window = 4000) {
  INFO(text);
  const auto expr = rule::parse(text);
  const auto tb = TailBound::from_expr(*expr);
  REQUIRE(tb.has_value());
  const Index start = tb->valid_from();
  for (Index probe : {start, start + 1, start + 17, start + 500}) {
    double sup = 0.0, inf = INFINITY;
    for (Index n = probe; n < probe + window; ++n) {
      const double v = std::abs(rule::evaluate(*expr, static_cast<double>(n)));
      sup = std::max(sup, v);
      inf = std::min(inf, v);
    }
    CHECK(tb->upper(probe) >= sup * (1 - 1e-13));
    if (auto lo = tb->lower(probe)) CHECK(*lo <= inf * (1 + 1e-13));
  }
}

}  // namespace

TEST_SUITE("asymptotics") {
  TEST_CASE("limit kinds") {
    auto kind = [](const char* s) { return TailBound::from_expr(*rule::parse(s))->limit_kind(); };
    CHECK(kind("1/(n+1)") == LimitKind::Zero);
    CHECK(kind("2^(-n)") == LimitKind::Zero);
    CHECK(kind("n*2^(-(n-1))") == LimitKind::Zero);
    CHECK(kind("1") == LimitKind::Finite);
    CHECK(kind("n/(n+1)") == LimitKind::Finite);
    CHECK(kind("n") == LimitKind::Infinite);
    CHECK(kind("n^2/(n+1)") == LimitKind::Infinite);
    CHECK(kind("0*n") == LimitKind::Zero);
    CHECK(TailBound::from_expr(*rule::parse("n/(n+1)"))->limit() == doctest::Approx(1.0));
  }

  TEST_CASE("bounds dominate brute force") {
    for (const char* s : {"1/(n+1)", "2^(-n)", "n*2^(-(n-1))", "n/(n+1)", "(n-30)/(n+1)", "1-2^(-n)",
                          "(3*n^2-n+5)/(n^2+7)", "100*n^3*0.5^n", "1/(n-0.5)", "(n+2^(-n))/(2*n+1)"})
      check_bounds(s);
  }

  TEST_CASE("outside the analysable class") {
    CHECK(!analyze(*rule::parse("n^n")).has_value());
    CHECK(!analyze(*rule::parse("2^(n*n)")).has_value());
    CHECK(!analyze(*rule::parse("2^(1/n)")).has_value());
  }

  TEST_CASE("exact symbolic form agrees with evaluation") {
    for (const char* s : {"(n+1)^3 - n^3", "2^(n+1)/2^n", "(1+n)*(1-n)/(n+3)", "3^(-n)*9^n/n^2"}) {
      INFO(s);
      const auto e = rule::parse(s);
      const auto r = analyze(*e);
      REQUIRE(r.has_value());
      for (double n : {1.0, 2.0, 7.0, 19.0}) CHECK(r->evaluate(n) == doctest::Approx(rule::evaluate(*e, n)).epsilon(1e-12));
    }
  }

  TEST_CASE("monotone onset") {
    // n^q beta^n is non-increasing from the onset on
    for (auto [q, beta] : {std::pair{1, 0.5}, std::pair{3, 0.9}, std::pair{10, 0.99}}) {
      const Index n0 = monotone_onset(q, beta);
      for (Index n = n0; n < n0 + 200; ++n) {
        const double a = std::pow(double(n), q) * std::pow(beta, double(n));
        const double b = std::pow(double(n + 1), q) * std::pow(beta, double(n + 1));
        CHECK(b <= a * (1 + 1e-15));
      }
    }
  }
}
