#pragma once

// Finite-dimensional commutative algebras given by structure constants,
// Banach bimodules over them, and the constructions that turn a derivation
// into a symmetric module into a derivation into the dual A*.
//
// Conventions: elements are coordinate vectors; a functional lambda acts by
// the bilinear pairing lambda(x) = sum_k lambda_k x_k. A map between spaces
// is stored column-wise: column i is the image of basis vector i.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "l1deriv/error.hpp"

namespace l1d::bimod {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kRankThreshold = 1e-9;

class FiniteAlgebra {
 public:
  /// structure[(i*d + j)*d + k] = coefficient of e_k in e_i e_j. Throws
  /// InvalidAlgebra unless commutative (exactly) and associative (to 1e-12).
  FiniteAlgebra(std::size_t dim, std::vector<Complex> structure, std::string name = "custom");

  std::size_t dim() const noexcept { return dim_; }
  const std::string& name() const noexcept { return name_; }
  Complex structure(std::size_t i, std::size_t j, std::size_t k) const { return c_[(i * dim_ + j) * dim_ + k]; }

  Vector multiply(const Vector& a, const Vector& b) const;
  /// Matrix of x -> e_i x.
  const Matrix& basis_multiplication(std::size_t i) const { return mult_[i]; }
  /// Matrix of x -> a x.
  Matrix multiplication(const Vector& a) const;

  double commutativity_defect() const;
  double associativity_defect() const;
  bool gaussian_integral() const;

 private:
  std::size_t dim_;
  std::vector<Complex> c_;
  std::string name_;
  std::vector<Matrix> mult_;
};

FiniteAlgebra zero_product_algebra(std::size_t dim);
/// span{x} with x^2 = 0
FiniteAlgebra nilpotent_line();
/// C[t]/(t^k) with basis 1, t, ..., t^{k-1}
FiniteAlgebra truncated_polynomials(std::size_t k);
/// C itself
FiniteAlgebra scalars();

/// "zero2", "nil1", "scalar", "trunc<k>" (k >= 1).
FiniteAlgebra algebra_by_name(std::string_view name);
/// {"dim": d, "c": [[[c_ij0, ...], ...], ...]} with entries numbers or [re, im].
FiniteAlgebra algebra_from_json(std::string_view text);

enum class NormKind { L1, Linf };

inline NormKind dual_norm(NormKind k) { return k == NormKind::L1 ? NormKind::Linf : NormKind::L1; }

struct FiniteBimodule {
  std::size_t algebra_dim = 0;
  std::size_t dim = 0;
  std::vector<Matrix> left;   // left[i]: x -> e_i . x
  std::vector<Matrix> right;  // right[i]: x -> x . e_i
  bool symmetric = false;
  NormKind norm = NormKind::L1;
  std::string name;
};

/// A acting on itself by multiplication.
FiniteBimodule regular_module(const FiniteAlgebra& a);
/// C[t]/(t^m) as a symmetric module over C[t]/(t^k), m <= k, via the quotient map.
FiniteBimodule truncated_quotient_module(std::size_t k, std::size_t m);

/// Max residual of a.(b.x) = (ab).x, (x.a).b = x.(ab), a.(x.b) = (a.x).b on basis triples.
double bimodule_defect(const FiniteAlgebra& a, const FiniteBimodule& e);

/// E* with (a.psi)(x) = psi(x.a) and (psi.a)(x) = psi(a.x).
FiniteBimodule dual_module(const FiniteBimodule& e);

/// A* = dual of the regular module.
FiniteBimodule algebra_dual(const FiniteAlgebra& a);

enum class Space { Algebra, AlgebraDual, Module, ModuleDual };

std::string to_string(Space s);

struct FiniteMap {
  Matrix matrix;
  Space source = Space::Algebra;
  Space target = Space::Module;
};

/// Orthonormal basis (columns) of span{e_i e_j}.
Matrix square_span(const FiniteAlgebra& a);

/// Rank by singular values, relative threshold against the largest.
std::size_t numerical_rank(const Matrix& m, double rel = kRankThreshold);

/// Norm of `m` between coordinate norms; exact except Linf -> L1, where the entrywise sum bound is returned.
double operator_norm(const Matrix& m, NormKind source, NormKind target);

/// Max residual of D(e_i e_j) = e_i . D(e_j) + D(e_i) . e_j for D : A -> E.
double derivation_defect(const FiniteAlgebra& a, const FiniteBimodule& e, const Matrix& d);

/// The inner derivation delta_x(a) = a.x - x.a as a matrix A -> E.
Matrix inner_derivation(const FiniteBimodule& e, const Vector& x);

struct RankOneDerivation {
  Vector a0;
  Vector lambda0;   // functional with lambda0|A^2 = 0, lambda0(a0) = 1 (minimum norm)
  FiniteMap derivation;  // a -> lambda0(a) lambda0, A -> A*
};

/// Throws NotOutsideSquare when a0 lies in span(A^2).
RankOneDerivation rank_one_derivation(const FiniteAlgebra& a, const Vector& a0);

/// Least-squares fit of D = delta_x; `solution` is set when the residual vanishes.
struct InnerFit {
  std::optional<Vector> solution;
  Vector best;
  double residual = 0.0;  // operator norm of D - delta_best from (A, l1) to E
};

InnerFit is_inner(const FiniteAlgebra& a, const FiniteBimodule& e, const Matrix& d);

/// R_lambda(x)(a) = lambda(a.x), a map E -> A*. Throws NotSymmetric.
FiniteMap r_lambda(const FiniteAlgebra& a, const FiniteBimodule& e, const Vector& lambda);

/// Max residual of R(a.x) = a.R(x) and R(x.a) = R(x).a on basis pairs.
double homomorphism_defect(const FiniteAlgebra& a, const FiniteBimodule& e, const Matrix& r);

struct LambdaChoice {
  Vector a0;
  Vector lambda;          // lambda(a0 . D(a0)) = 1
  std::size_t probes = 0; // candidates tried, including the successful one
};

/// Search order: basis vectors, sums of pairs, then 64 seeded random combinations.
LambdaChoice find_lambda(const FiniteAlgebra& a, const FiniteBimodule& e, const Matrix& d, std::uint64_t seed = 42);

/// D' = R_lambda o D : A -> A*.
FiniteMap transfer(const Matrix& d, const Vector& lambda, const FiniteAlgebra& a, const FiniteBimodule& e);

struct TransferReport {
  Vector a0;
  Vector lambda;
  FiniteMap transferred;
  double derivation_defect = 0.0;   // of D' into A*
  double homomorphism_defect = 0.0; // of R_lambda
  Complex pairing{};                // D'(a0)(a0)
  std::size_t rank_source = 0;
  std::size_t rank_transferred = 0;
  double norm_source = 0.0;
  double norm_r = 0.0;
  double norm_transferred = 0.0;
};

/// find_lambda, r_lambda and transfer in sequence, with every check evaluated.
TransferReport run_transfer(const FiniteAlgebra& a, const FiniteBimodule& e, const Matrix& d, std::uint64_t seed = 42);

struct CatalogDerivation {
  FiniteBimodule module;
  Matrix matrix;
  std::string description;
};

/// "ddt": d/dt from C[t]/(t^k) into C[t]/(t^{k-1}); "euler": t d/dt on C[t]/(t^k)
/// into itself; "zero": the zero derivation into A.
CatalogDerivation derivation_by_name(const FiniteAlgebra& a, std::string_view name);

}  // namespace l1d::bimod
