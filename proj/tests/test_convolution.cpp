#include <doctest.h>

#include <random>

#include "l1deriv/convolution.hpp"

using namespace l1d;

namespace {

// Direct Cauchy-product oracle.
std::vector<Complex> naive_product(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<Complex> c(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

std::vector<Complex> random_coeffs(std::mt19937_64& rng, std::size_t len) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Complex> c(len);
  for (auto& z : c) z = Complex(u(rng), u(rng));
  return c;
}

double max_diff(const L1Element& a, const L1Element& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < std::max(a.support(), b.support()); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

}  // namespace

TEST_SUITE("convolution") {
  TEST_CASE("products of monomials and small polynomials") {
    CHECK(convolve(L1Element::monomial(2), L1Element::monomial(3)) == L1Element::monomial(5));
    const L1Element p({1.0, 2.0}), q({3.0, 4.0});
    CHECK(convolve(p, q) == L1Element({3.0, 10.0, 8.0}));
    CHECK(convolve(p, L1Element()).is_zero());
    CHECK(l1_norm(L1Element({Complex(3, 4), -1.0})) == 6.0);
  }

  TEST_CASE("trailing zeros are trimmed") {
    const L1Element p({1.0, 0.0, 0.0});
    CHECK(p.support() == 1);
    CHECK(L1Element({0.0, 0.0}).is_zero());
    CHECK(p[7] == Complex{});
  }

  TEST_CASE("degree cap is enforced") {
    CHECK_THROWS_AS(L1Element::monomial(L1Element::kMaxDegree + 1), Error);
    const L1Element big = L1Element::monomial(L1Element::kMaxDegree / 2 + 1);
    CHECK_THROWS_AS(convolve(big, big), Error);
  }

  TEST_CASE("agrees with the direct product, exact path included") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = random_coeffs(rng, 1 + trial % 23), b = random_coeffs(rng, 1 + (trial * 7) % 31);
      CHECK(max_diff(convolve(L1Element(a), L1Element(b)), L1Element(naive_product(a, b))) < 1e-13);
    }
    std::vector<Complex> ia, ib;
    for (int i = 0; i < 40; ++i) {
      ia.emplace_back(i % 7 - 3, i % 3);
      ib.emplace_back(2 - i % 5, -(i % 4));
    }
    const L1Element ea(ia), eb(ib);
    CHECK(ea.gaussian_integral());
    CHECK(convolve(ea, eb) == L1Element(naive_product(ia, ib)));
  }

  TEST_CASE("algebra laws on random elements") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
      const L1Element a(random_coeffs(rng, 1 + trial % 9)), b(random_coeffs(rng, 1 + trial % 13)),
          c(random_coeffs(rng, 1 + trial % 5));
      CHECK(max_diff(convolve(a, b), convolve(b, a)) < 1e-14);
      CHECK(max_diff(convolve(convolve(a, b), c), convolve(a, convolve(b, c))) < 1e-12);
      CHECK(l1_norm(convolve(a, b)) <= l1_norm(a) * l1_norm(b) * (1 + 1e-12));
    }
  }

  TEST_CASE("dual action is compatible with the pairing") {
    // <a . psi, b> = <psi, a b>
    std::mt19937_64 rng(3);
    const DualSequence psi(rule::parse("1/(n+1)"));
    for (int trial = 0; trial < 50; ++trial) {
      const L1Element a(random_coeffs(rng, 1 + trial % 6)), b(random_coeffs(rng, 1 + trial % 11));
      const DualSequence apsi = act_on_dual(a, psi);
      CHECK(std::abs(pair(apsi, b) - pair(psi, convolve(a, b))) < 1e-12);
    }
  }

  TEST_CASE("tails of dual sequences") {
    const DualSequence z([](Index n) { return Complex(double(n)); }, DualSequence::ZeroTail{5});
    CHECK(z(4) == 4.0);
    CHECK(z(5) == 0.0);
    CHECK(z.describe_tail() == "zero:5");
    CHECK(DualSequence::table({1.0, 2.0}, false).describe_tail() == "none");
    CHECK(DualSequence::table({1.0, 2.0}, true)(2) == 0.0);
    const DualSequence c(rule::parse("2^(-n)"));
    CHECK(c.describe_tail() == "closed:2 ^ -n");
    REQUIRE(c.tail_bound().has_value());
    CHECK(c.tail_bound()->limit_kind() == asym::LimitKind::Zero);

    const L1Element a({1.0, 1.0});
    CHECK(std::holds_alternative<DualSequence::ZeroTail>(act_on_dual(a, z).tail()));
    CHECK(std::holds_alternative<DualSequence::ClosedForm>(act_on_dual(a, c).tail()));
    CHECK(std::holds_alternative<DualSequence::Undeclared>(act_on_dual(a, DualSequence::table({1.0}, false)).tail()));
  }

  TEST_CASE("computed range tracks evaluation") {
    const DualSequence s(rule::parse("n"));
    CHECK(!s.computed_range().has_value());
    s(10);
    s(3);
    CHECK(s.computed_range() == Index{10});
    CHECK(sup_norm_probe(s, 20) == 20.0);
  }
}
