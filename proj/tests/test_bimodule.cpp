#include <doctest.h>

#include "l1deriv/bimodule.hpp"

using namespace l1d;
using namespace l1d::bimod;

namespace {

Vector vec(std::initializer_list<Complex> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (Complex c : v) x(i++) = c;
  return x;
}

// Naive polynomial product in C[t]/(t^k), the oracle for truncated_polynomials.
Vector trunc_product(const Vector& a, const Vector& b) {
  Vector c = Vector::Zero(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; i + j < a.size(); ++j) c(i + j) += a(i) * b(j);
  return c;
}

// E = A with left multiplication and zero right action: not symmetric.
FiniteBimodule left_only(const FiniteAlgebra& a) {
  FiniteBimodule e = regular_module(a);
  for (auto& m : e.right) m.setZero();
  e.symmetric = false;
  e.name = "left-only";
  return e;
}

}  // namespace

TEST_SUITE("bimodule") {
  TEST_CASE("catalog algebras") {
    const FiniteAlgebra t4 = truncated_polynomials(4);
    const Vector a = vec({1, 2, 0, -1}), b = vec({0, 1, 3, 1});
    CHECK((t4.multiply(a, b) - trunc_product(a, b)).norm() == 0.0);
    CHECK(t4.associativity_defect() == 0.0);
    CHECK(algebra_by_name("trunc3").dim() == 3);
    CHECK(algebra_by_name("zero2").multiply(vec({1, 2}), vec({3, 4})).norm() == 0.0);
    CHECK(algebra_by_name("scalar").multiply(vec({2}), vec({3}))(0) == Complex(6));
    CHECK(algebra_by_name("nil1").dim() == 1);
    CHECK_THROWS_AS(algebra_by_name("trunc0"), Error);
    CHECK_THROWS_AS(algebra_by_name("matrices"), Error);
  }

  TEST_CASE("structure constants are validated") {
    // e0 e1 = e0 but e1 e0 = 0
    std::vector<Complex> c(8);
    c[(0 * 2 + 1) * 2 + 0] = 1.0;
    CHECK_THROWS_AS(FiniteAlgebra(2, c), Error);
    // commutative but not associative: e0^2 = e1, e1^2 = e0
    std::vector<Complex> n(8);
    n[(0 * 2 + 0) * 2 + 1] = 1.0;
    n[(1 * 2 + 1) * 2 + 0] = 1.0;
    CHECK_THROWS_AS(FiniteAlgebra(2, n), Error);
    CHECK_THROWS_AS(FiniteAlgebra(2, std::vector<Complex>(7)), Error);
  }

  TEST_CASE("algebra from JSON") {
    const FiniteAlgebra a = algebra_from_json(R"({"dim": 2, "c": [[[1, 0], [0, 1]], [[0, 1], [0, 0]]], "name": "dual numbers"})");
    CHECK(a.dim() == 2);
    CHECK(a.name() == "dual numbers");
    CHECK(a.structure(0, 1, 1) == Complex(1));
    CHECK(a.gaussian_integral());
    const FiniteAlgebra z = algebra_from_json(R"({"dim": 1, "c": [[[[0, 1]]]]})");
    CHECK(z.structure(0, 0, 0) == Complex(0, 1));
    CHECK_THROWS_AS(algebra_from_json("{"), Error);
    CHECK_THROWS_AS(algebra_from_json(R"({"dim": 2, "c": [[[1]]]})"), Error);
  }

  TEST_CASE("modules and duals satisfy the axioms") {
    for (const char* name : {"zero2", "nil1", "scalar", "trunc4"}) {
      const FiniteAlgebra a = algebra_by_name(name);
      CHECK(bimodule_defect(a, regular_module(a)) == 0.0);
      CHECK(bimodule_defect(a, algebra_dual(a)) == 0.0);
      CHECK(bimodule_defect(a, left_only(a)) == 0.0);
      CHECK(bimodule_defect(a, dual_module(left_only(a))) == 0.0);
    }
    const FiniteAlgebra t4 = truncated_polynomials(4);
    CHECK(bimodule_defect(t4, truncated_quotient_module(4, 3)) == 0.0);
    CHECK(algebra_dual(t4).norm == NormKind::Linf);
  }

  TEST_CASE("dual action formula") {
    // (a.psi)(x) = psi(x.a)
    const FiniteAlgebra t3 = truncated_polynomials(3);
    const FiniteBimodule star = algebra_dual(t3);
    const Vector psi = vec({1, -2, 5}), x = vec({2, 1, 1});
    for (std::size_t i = 0; i < 3; ++i) {
      Vector ei = Vector::Zero(3);
      ei(static_cast<Eigen::Index>(i)) = 1.0;
      const Complex lhs = (star.left[i] * psi).transpose() * x;
      const Complex rhs = psi.transpose() * t3.multiply(x, ei);
      CHECK(std::abs(lhs - rhs) < 1e-15);
    }
  }

  TEST_CASE("square span and ranks") {
    CHECK(square_span(zero_product_algebra(2)).cols() == 0);
    CHECK(square_span(truncated_polynomials(4)).cols() == 4);
    CHECK(square_span(nilpotent_line()).cols() == 0);
    Matrix m(2, 2);
    m << 1, 2, 2, 4;
    CHECK(numerical_rank(m) == 1);
    CHECK(numerical_rank(Matrix::Zero(3, 3)) == 0);
    Matrix n(2, 2);
    n << 1, -2, 3, 4;
    CHECK(operator_norm(n, NormKind::L1, NormKind::L1) == 6.0);
    CHECK(operator_norm(n, NormKind::L1, NormKind::Linf) == 4.0);
    CHECK(operator_norm(n, NormKind::Linf, NormKind::Linf) == 7.0);
    CHECK(operator_norm(n, NormKind::Linf, NormKind::L1) == 10.0);
  }

  TEST_CASE("rank-one derivation on the zero-product algebra") {
    const FiniteAlgebra a = zero_product_algebra(2);
    const RankOneDerivation r = rank_one_derivation(a, vec({1, 0}));
    const Matrix& d = r.derivation.matrix;
    CHECK(numerical_rank(d) == 1);
    CHECK(derivation_defect(a, algebra_dual(a), d) == 0.0);
    CHECK(Complex((d * r.a0).transpose() * r.a0) == Complex(1));
    const InnerFit fit = is_inner(a, algebra_dual(a), d);
    CHECK(!fit.solution.has_value());
    const Matrix rest = d - inner_derivation(algebra_dual(a), fit.best);
    CHECK(std::abs(Complex((rest * r.a0).transpose() * r.a0)) == 1.0);
    CHECK_THROWS_AS(rank_one_derivation(truncated_polynomials(3), vec({0, 1, 0})), Error);
  }

  TEST_CASE("rank-one derivation with a nontrivial square") {
    // C[t]/(t^3) modulo nothing: span(A^2) = A, so use A = zero-product plus a nilpotent square
    // e0^2 = e1 (span(A^2) = span{e1}); a0 = e0 + e1
    std::vector<Complex> c(8);
    c[(0 * 2 + 0) * 2 + 1] = 1.0;
    const FiniteAlgebra a(2, c, "x^2=y");
    const Vector a0 = vec({1, 1});
    const RankOneDerivation r = rank_one_derivation(a, a0);
    CHECK(std::abs(Complex(r.lambda0.transpose() * a0) - 1.0) < 1e-15);
    CHECK(std::abs(r.lambda0(1)) < 1e-15);
    CHECK(derivation_defect(a, algebra_dual(a), r.derivation.matrix) < 1e-15);
  }

  TEST_CASE("inner derivations are recognised") {
    const FiniteAlgebra a = truncated_polynomials(3);
    const FiniteBimodule e = left_only(a);
    const Vector x = vec({1, -1, 2});
    const Matrix d = inner_derivation(e, x);
    CHECK(derivation_defect(a, e, d) < 1e-14);
    const InnerFit fit = is_inner(a, e, d);
    REQUIRE(fit.solution.has_value());
    CHECK(fit.residual < 1e-12);
    // symmetric module: inner derivations vanish
    CHECK(inner_derivation(regular_module(a), x).norm() == 0.0);
  }

  TEST_CASE("catalog derivations satisfy the identity") {
    const FiniteAlgebra a = truncated_polynomials(4);
    for (const char* name : {"ddt", "euler", "zero"}) {
      const CatalogDerivation cd = derivation_by_name(a, name);
      CHECK(derivation_defect(a, cd.module, cd.matrix) == 0.0);
    }
    // d/dt into A itself fails: t * t^2 = 0 but t * 2t + t^2 != 0
    Matrix bad = Matrix::Zero(4, 4);
    for (Eigen::Index i = 1; i < 4; ++i) bad(i - 1, i) = double(i);
    CHECK(derivation_defect(a, regular_module(a), bad) > 0.5);
    CHECK_THROWS_AS(derivation_by_name(zero_product_algebra(2), "ddt"), Error);
    CHECK_THROWS_AS(derivation_by_name(a, "curl"), Error);
  }

  TEST_CASE("transfer on C[t]/(t^4)") {
    const FiniteAlgebra a = truncated_polynomials(4);
    const CatalogDerivation cd = derivation_by_name(a, "ddt");
    CHECK(numerical_rank(cd.matrix) == 3);
    const TransferReport t = run_transfer(a, cd.module, cd.matrix);
    CHECK(t.derivation_defect < 1e-10);
    CHECK(t.homomorphism_defect < 1e-10);
    CHECK(std::abs(t.pairing - 1.0) < 1e-12);
    CHECK(t.rank_transferred <= 3);
    CHECK(t.rank_transferred == 2);
    CHECK(t.norm_transferred <= t.norm_r * t.norm_source * (1 + 1e-12));
    // D(a0^2) = 2 a0 D(a0) != 0 for a0 = t
    CHECK((t.a0 - vec({0, 1, 0, 0})).norm() == 0.0);

    const TransferReport u = run_transfer(a, regular_module(a), derivation_by_name(a, "euler").matrix);
    CHECK(u.derivation_defect < 1e-10);
    CHECK(std::abs(u.pairing - 1.0) < 1e-12);
  }

  TEST_CASE("find_lambda failure modes") {
    const FiniteAlgebra t3 = truncated_polynomials(3);
    CHECK_THROWS_AS(find_lambda(t3, regular_module(t3), Matrix::Zero(3, 3)), Error);
    try {
      find_lambda(t3, regular_module(t3), Matrix::Zero(3, 3));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoSuchElement);
    }
    const FiniteAlgebra z = zero_product_algebra(2);
    try {
      find_lambda(z, regular_module(z), Matrix::Zero(2, 2));
      FAIL("expected SquareDeficient");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SquareDeficient);
    }
    try {
      r_lambda(t3, left_only(t3), vec({1, 0, 0}));
      FAIL("expected NotSymmetric");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotSymmetric);
    }
  }

  TEST_CASE("find_lambda is deterministic for a fixed seed") {
    const FiniteAlgebra a = truncated_polynomials(4);
    const CatalogDerivation cd = derivation_by_name(a, "ddt");
    const LambdaChoice x = find_lambda(a, cd.module, cd.matrix, 42), y = find_lambda(a, cd.module, cd.matrix, 42);
    CHECK((x.lambda - y.lambda).norm() == 0.0);
    CHECK(x.probes == y.probes);
  }
}
