#include <doctest.h>

#include <random>

#include "l1deriv/derivation.hpp"

using namespace l1d;

namespace {

Derivation phi_rule(const char* text, Index depth = 1000) {
  return Derivation::from_phi(DualSequence(rule::parse(text)), depth);
}

Derivation mu_rule(const char* text) { return Derivation::from_mu(DualSequence(rule::parse(text))); }

// D(f)(t^n) = sum_k k f_k phi(k+n-1), straight from the definition.
Complex oracle_apply(const DualSequence& phi, const L1Element& f, Index n) {
  Complex s{};
  for (Index k = 1; k < f.support(); ++k) s += static_cast<double>(k) * f[k] * phi(k + n - 1);
  return s;
}

// (f . psi)(t^n) = sum_j f_j psi(t^{n+j})
Complex oracle_act(const L1Element& f, const std::function<Complex(Index)>& psi, Index n) {
  Complex s{};
  for (Index j = 0; j < f.support(); ++j) s += f[j] * psi(n + j);
  return s;
}

L1Element random_poly(std::mt19937_64& rng, std::size_t degree) {
  std::uniform_real_distribution<double> r(0.0, 1.0), th(0.0, 6.283185307179586);
  std::vector<Complex> c(degree + 1);
  for (auto& z : c) z = std::polar(std::sqrt(r(rng)), th(rng));
  return L1Element(c);
}

}  // namespace

TEST_SUITE("derivation") {
  TEST_CASE("mu and phi describe the same derivation") {
    const Derivation d = phi_rule("1/(n+1)");
    for (Index n = 1; n < 50; ++n) CHECK(std::abs(d.mu()(n) - 1.0) < 1e-15);
    CHECK(d.mu()(0) == Complex{});
    const Derivation e = mu_rule("n*2^(-(n-1))");
    CHECK(std::abs(e.phi()(0) - 1.0) < 1e-15);
    CHECK(std::abs(e.phi()(2) - 0.25) < 1e-15);
    CHECK(std::abs(e.evaluate(2, 1) - 2.0 * e.phi()(2)) < 1e-15);
    CHECK(e.evaluate(0, 5) == Complex{});
  }

  TEST_CASE("norm examples") {
    const NormBound a = norm(phi_rule("1/(n+1)"), 1000);
    REQUIRE(a.exact.has_value());
    CHECK(*a.exact == 1.0);
    const NormBound b = norm(mu_rule("n*2^(-(n-1))"), 100);
    REQUIRE(b.exact.has_value());
    CHECK(*b.exact == doctest::Approx(1.0));
    const NormBound c = norm(mu_rule("n/(n+1)"), 100);
    CHECK(c.lower < 1.0);
    // sup is the limit 1, never attained
    CHECK(c.upper.has_value());
    CHECK(*c.upper >= 1.0 - 1e-15);
    const NormBound z = norm(Derivation::from_mu(DualSequence::table({0.0, 3.0, -5.0}, true)), 10);
    REQUIRE(z.exact.has_value());
    CHECK(*z.exact == 5.0);
    CHECK(z.attained_at == 2);
    const NormBound u = norm(Derivation::from_mu(DualSequence::table({0.0, 3.0, -5.0}, false)), 10);
    CHECK(!u.exact.has_value());
    CHECK(u.lower == 5.0);
  }

  TEST_CASE("unbounded rules are rejected") {
    CHECK_THROWS_AS(phi_rule("1"), Error);
    try {
      phi_rule("n");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnboundedDerivation);
    }
  }

  TEST_CASE("isometry: sequence sup equals monomial probes") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int t = 0; t < 10; ++t) {
      const double c = u(rng), b = 1.0 + u(rng);
      const std::string text = std::to_string(c) + "/(n+" + std::to_string(b) + ")";
      const Derivation d = phi_rule(text.c_str(), 2000);
      const NormBound nb = norm(d, 2000);
      double probe = 0.0;
      for (Index k = 1; k <= 2000; ++k) probe = std::max(probe, std::abs(apply(d, L1Element::monomial(k))(0)));
      CHECK(std::abs(nb.lower - probe) <= 1e-12 * std::max(1.0, probe));
    }
  }

  TEST_CASE("apply matches the defining formula and the derivation identity") {
    std::mt19937_64 rng(9);
    for (const char* r : {"1/(n+1)", "2^(-n)", "(n+2)/((n+1)*(n+3))"}) {
      const Derivation d = phi_rule(r);
      for (int t = 0; t < 20; ++t) {
        const L1Element f = random_poly(rng, t % 21), g = random_poly(rng, (3 * t) % 21);
        const L1Element fg = convolve(f, g);
        const DualSequence df = apply(d, f), dg = apply(d, g), dfg = apply(d, fg);
        const DualSequence fdg = act_on_dual(f, dg), gdf = act_on_dual(g, df);
        for (Index n = 0; n <= 100; n += 7) {
          CHECK(std::abs(df(n) - oracle_apply(d.phi(), f, n)) < 1e-12);
          // D(fg) = f.D(g) + g.D(f), right side built from the oracle
          const Complex rhs = oracle_act(f, [&](Index m) { return oracle_apply(d.phi(), g, m); }, n) +
                              oracle_act(g, [&](Index m) { return oracle_apply(d.phi(), f, m); }, n);
          CHECK(std::abs(dfg(n) - rhs) < 1e-10);
          CHECK(std::abs(dfg(n) - fdg(n) - gdf(n)) < 1e-10);
        }
      }
    }
  }

  TEST_CASE("compactness classification") {
    const auto c = classify_compact(mu_rule("n*2^(-(n-1))"), 1e-9, 1000);
    CHECK(c.verdict == Verdict::Compact);
    CHECK(recheck(mu_rule("n*2^(-(n-1))"), c));
    const auto& ev = std::get<CompactEvidence>(c.evidence);
    CHECK(ev.tail_upper < 1e-9);
    for (Index n = ev.onset; n < ev.onset + 200; ++n) CHECK(std::abs(double(n) * std::pow(2.0, -double(n - 1))) < 1e-9);

    const auto nc = classify_compact(mu_rule("1"), 1e-9, 1000);
    CHECK(nc.verdict == Verdict::NonCompact);
    CHECK(std::get<NonCompactEvidence>(nc.evidence).epsilon > 0.0);

    const auto table = Derivation::from_mu(DualSequence::table({0.0, 1.0, 0.5}, false));
    CHECK(classify_compact(table, 1e-9, 1000).verdict == Verdict::Inconclusive);
    const auto finite = Derivation::from_mu(DualSequence::table({0.0, 1.0, 0.5}, true));
    CHECK(classify_compact(finite, 1e-9, 1000).verdict == Verdict::Compact);
    CHECK(to_string(Verdict::NonCompact) == "NonCompact");
  }

  TEST_CASE("finite-rank truncation") {
    const Truncation t = finite_rank_truncate(mu_rule("2^(1-n)"), 3);
    CHECK(t.exact);
    CHECK(t.error == 0.125);
    CHECK(t.truncated.mu()(3) == 0.25);
    CHECK(t.truncated.mu()(4) == 0.0);
    CHECK_THROWS_AS(finite_rank_truncate(Derivation::from_mu(DualSequence::table({0.0, 1.0}, false)), 1), Error);
    const Truncation z = finite_rank_truncate(Derivation::from_mu(DualSequence::table({0.0, 1.0, 2.0, 3.0}, true)), 2);
    CHECK(z.exact);
    CHECK(z.error == 3.0);
  }

  TEST_CASE("witness for mu = 1") {
    const Derivation d = mu_rule("1");
    const WitnessReport w = noncompact_witness(d, 0.5, 4, 1000.0);
    REQUIRE(w.j.size() == 4);
    CHECK(w.j[0] == 1001);
    CHECK(w.l[0] == 1000);
    CHECK(w.gaps.size() == 6);
    for (const auto& g : w.gaps) CHECK(g.gap > 0.125);
    for (double v : w.diagonal) CHECK(v > 0.5 / 3.0);
    for (std::size_t k = 1; k < w.j.size(); ++k) CHECK(double(w.admissible[k]) > 1000.0 / 0.5 * double(w.j[k - 1]));
    CHECK(w.verified);
    CHECK(revalidate(d, w));
    CHECK(w.separation > 0.125);

    const WitnessReport one = noncompact_witness(d, 0.5, 1, 1000.0);
    CHECK(std::isinf(one.separation));
  }

  TEST_CASE("witness failures") {
    CHECK_THROWS_AS(noncompact_witness(mu_rule("2^(-n)"), 0.5, 2), Error);
    try {
      noncompact_witness(mu_rule("1"), 0.5, 40, 1000.0);
      FAIL("expected overflow");
    } catch (const IndexOverflowError& e) {
      CHECK(e.partial().j.size() >= 4);
      CHECK(!e.partial().complete);
    }
  }
}
