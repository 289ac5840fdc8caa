#include <doctest.h>

#include <cmath>

#include "l1deriv/swiss_cheese.hpp"

using namespace l1d;
using namespace l1d::cheese;

TEST_SUITE("cheese") {
  TEST_CASE("interval geometry") {
    CHECK(interval_midpoint(1) == 0.125);
    CHECK(interval_left(1) == 0.0);
    CHECK(interval_right(1) == 0.25);
    for (std::size_t n = 1; n < 20; ++n)
      CHECK(interval_midpoint(n) == (interval_left(n) + interval_right(n)) / 2);
    CHECK(interval_index(0.0) == std::size_t{1});
    CHECK(interval_index(0.25) == std::size_t{2});
    CHECK(!interval_index(0.5).has_value());
    CHECK(!interval_index(-0.1).has_value());
  }

  TEST_CASE("first disc") {
    const Admissibility a = admissibility(1, 1.0 / 16);
    CHECK(a.ok());
    CHECK(a.near_value == doctest::Approx(1.0 / std::pow(15.0 / 16, 2)));
    CHECK(a.far_value < 0.25);
    CHECK(!admissibility(1, 0.125).ok());
    CHECK(!admissibility(1, 0.25).far_bound);
    CHECK(!admissibility(1, 0.5).near_bound);
    const CheeseSet c = build_cheese(1);
    CHECK(c.disc(1).x == 0.125);
    CHECK(c.disc(1).y == 0.0625);
    CHECK(c.disc(1).r == 0.0625 * 0.0625);
  }

  TEST_CASE("twelve discs") {
    const CheeseSet c = build_cheese(12);
    REQUIRE(c.discs.size() == 12);
    CHECK(c.disc(12).y == std::ldexp(1.0, -21));
    for (const Disc& d : c.discs) {
      CHECK(d.r == d.y * d.y);
      CHECK(std::log2(d.y) == std::floor(std::log2(d.y)));
    }
    const GeometryReport g = certify_geometry(c);
    CHECK(g.passed());
    CHECK(g.avoidance_margin == doctest::Approx(c.disc(12).y - c.disc(12).r));
    CHECK_THROWS_AS(build_cheese(0), Error);
  }

  TEST_CASE("largest admissible power of two is chosen") {
    const CheeseSet c = build_cheese(12);
    for (std::size_t n = 1; n <= 12; ++n) {
      CHECK(admissibility(n, c.disc(n).y).ok());
      CHECK(!admissibility(n, 2 * c.disc(n).y).ok());
    }
  }

  TEST_CASE("distances") {
    const CheeseSet c = build_cheese(12);
    CHECK(s_dist(c, 0.0, 0) == 1.0);
    CHECK(s_dist(c, c.disc(3).center(), 3) == 0.0);
    const Disc& d = c.disc(2);
    CHECK(s_dist(c, d.x, 2) == doctest::Approx(d.y - d.r).epsilon(1e-15));
    CHECK(s_dist(c, Complex(0.5, 0.0), 0) == 0.5);
    CHECK_THROWS_AS(s_dist(c, 0.0, 13), Error);
  }

  TEST_CASE("Feinstein sum") {
    const CheeseSet c = build_cheese(12);
    const double y = c.disc(1).y;
    CHECK(feinstein_term(c, c.disc(1).x, 1) == doctest::Approx(1.0 / ((1 - y) * (1 - y))));
    CHECK(feinstein_term(c, c.disc(1).x, 1) < 2.0);
    for (double x : uniform_grid(101)) CHECK(feinstein_term(c, x, 0) <= 4.0);
    const FeinsteinValue v = feinstein_sum(c, 0.3);
    CHECK(v.certified_lt == v.value + std::ldexp(1.0, -13));
    CHECK_THROWS_AS(feinstein_sum(c, c.disc(4).center()), Error);
    CHECK_THROWS_AS(feinstein_sum(c, Complex(1.0, 0.0)), Error);
  }

  TEST_CASE("grid sweep") {
    const CheeseSet c = build_cheese(12);
    const auto g = uniform_grid(2001);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 0.5);
    CHECK(verification_grid(c, 2001).size() >= 2001);
    const SweepReport s = verify(c, 2001);
    CHECK(s.passed());
    CHECK(s.max_certified < 6.5);
    for (const TermStats& t : s.terms) {
      CHECK(t.off_interval_max < t.bound + 1e-12);
      CHECK(t.on_interval_max < 2.0);
      CHECK(t.on_interval_max <= t.near_limit * (1 + 1e-12));
    }
  }

  TEST_CASE("probe functions") {
    const CheeseSet c = build_cheese(12);
    for (std::size_t n = 1; n <= 12; ++n) {
      const RationalFunction f = probe_function(c, n);
      CHECK(std::abs(f.derivative(c.disc(n).x)) == doctest::Approx(1.0).epsilon(1e-12));
      // on the boundary circle of D_n, |f_n| = 1
      CHECK(std::abs(f(c.disc(n).center() + Complex(0, c.disc(n).r))) == doctest::Approx(1.0));
    }
    const RationalFunction f = probe_function(c, 1) + probe_function(c, 2);
    CHECK(f.poles.size() == 2);
    const Complex z(0.2, 0.1);
    CHECK(std::abs(f(z) - probe_function(c, 1)(z) - probe_function(c, 2)(z)) < 1e-15);
  }

  TEST_CASE("derivative bound check") {
    const CheeseSet c = build_cheese(12);
    const DerivativeBoundReport one = derivative_bound_check(c, probe_function(c, 1), 2001);
    CHECK(one.passed);
    CHECK(one.sup_estimate == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(one.ratio <= 6.5);
    const DerivativeBoundReport k = derivative_bound_check(c, RationalFunction{2.0, {}, {}}, 101);
    CHECK(k.ratio == 0.0);
    CHECK(k.max_derivative == 0.0);
    const DerivativeBoundReport two = derivative_bound_check(c, probe_function(c, 1) + probe_function(c, 2), 2001);
    CHECK(two.sup_estimate <= 2.0 + 1e-12);
    CHECK(two.max_derivative <= 13.0);
    CHECK(two.passed);
    CHECK_THROWS_AS(derivative_bound_check(c, RationalFunction{0.0, {Complex(0.3, 0.3)}, {1.0}}, 101), Error);
    CHECK_NOTHROW(derivative_bound_check(c, RationalFunction{0.0, {Complex(2.0, 0.0)}, {1.0}}, 101));
  }

  TEST_CASE("non-compactness report") {
    const CheeseSet c = build_cheese(12);
    const NoncompactReport r = noncompact_report(c, 12, 2001);
    CHECK(r.diagonal_defect <= 1e-12);
    CHECK(r.min_separation >= 0.7);
    CHECK(r.floor >= 0.75);
    CHECK(r.passed);
    // fixed x, large n: |f_n'(x)| decreases
    CHECK(r.m[11][0] < r.m[1][0]);
  }

  TEST_CASE("JSON round trip") {
    const CheeseSet c = build_cheese(5);
    const CheeseSet back = cheese_from_json(to_json(c));
    REQUIRE(back.discs.size() == 5);
    for (std::size_t n = 1; n <= 5; ++n) {
      CHECK(back.disc(n).x == c.disc(n).x);
      CHECK(back.disc(n).r == c.disc(n).r);
    }
    CHECK_THROWS_AS(cheese_from_json(R"({"n_max": 2, "discs": [{"x": 0.1, "y": 0.1, "r": 0.01}]})"), Error);
    CHECK_THROWS_AS(cheese_from_json(R"({"n_max": 1, "discs": [{"x": 0.1, "y": 0.0, "r": 0.01}]})"), Error);
  }
}
