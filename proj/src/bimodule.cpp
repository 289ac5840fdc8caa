#include "l1deriv/bimodule.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include <json.hpp>

namespace l1d::bimod {

namespace {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Vector basis(std::size_t dim, std::size_t i) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(i)) = 1.0;
  return v;
}

std::optional<std::size_t> trunc_order(std::string_view name) {
  if (name.substr(0, 5) != "trunc") return std::nullopt;
  std::size_t k = 0;
  auto digits = name.substr(5);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || k < 1) return std::nullopt;
  return k;
}

Eigen::JacobiSVD<Matrix> svd_of(const Matrix& m, bool with_u) {
  return Eigen::JacobiSVD<Matrix>(m, with_u ? Eigen::ComputeThinU : 0);
}

std::size_t rank_from(const Eigen::VectorXd& sv, double rel) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel * sv(0)) ++r;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- algebras

FiniteAlgebra::FiniteAlgebra(std::size_t dim, std::vector<Complex> structure, std::string name)
    : dim_(dim), c_(std::move(structure)), name_(std::move(name)) {
  if (dim_ == 0) throw Error(ErrorCode::InvalidAlgebra, "algebra dimension must be positive");
  if (c_.size() != dim_ * dim_ * dim_)
    throw Error(ErrorCode::InvalidAlgebra, "structure tensor must have d^3 = " + std::to_string(dim_ * dim_ * dim_) +
                                               " entries, got " + std::to_string(c_.size()));
  const auto d = static_cast<Eigen::Index>(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    Matrix m = Matrix::Zero(d, d);
    for (std::size_t j = 0; j < dim_; ++j)
      for (std::size_t k = 0; k < dim_; ++k) m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = this->structure(i, j, k);
    mult_.push_back(std::move(m));
  }
  if (commutativity_defect() != 0.0) throw Error(ErrorCode::InvalidAlgebra, "structure constants are not commutative");
  if (associativity_defect() > 1e-12) throw Error(ErrorCode::InvalidAlgebra, "structure constants are not associative");
}

Vector FiniteAlgebra::multiply(const Vector& a, const Vector& b) const { return multiplication(a) * b; }

Matrix FiniteAlgebra::multiplication(const Vector& a) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < dim_; ++i) m += a(static_cast<Eigen::Index>(i)) * mult_[i];
  return m;
}

double FiniteAlgebra::commutativity_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      for (std::size_t k = 0; k < dim_; ++k) worst = std::max(worst, std::abs(structure(i, j, k) - structure(j, i, k)));
  return worst;
}

double FiniteAlgebra::associativity_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      for (std::size_t k = 0; k < dim_; ++k)
        for (std::size_t l = 0; l < dim_; ++l) {
          Complex lhs{}, rhs{};
          for (std::size_t m = 0; m < dim_; ++m) {
            lhs += structure(i, j, m) * structure(m, k, l);
            rhs += structure(j, k, m) * structure(i, m, l);
          }
          worst = std::max(worst, std::abs(lhs - rhs));
        }
  return worst;
}

bool FiniteAlgebra::gaussian_integral() const {
  return std::all_of(c_.begin(), c_.end(), [](Complex z) {
    return std::nearbyint(z.real()) == z.real() && std::nearbyint(z.imag()) == z.imag();
  });
}

FiniteAlgebra zero_product_algebra(std::size_t dim) {
  return FiniteAlgebra(dim, std::vector<Complex>(dim * dim * dim), "zero" + std::to_string(dim));
}

FiniteAlgebra nilpotent_line() { return FiniteAlgebra(1, {0.0}, "nil1"); }

FiniteAlgebra truncated_polynomials(std::size_t k) {
  std::vector<Complex> c(k * k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; i + j < k; ++j) c[(i * k + j) * k + i + j] = 1.0;
  return FiniteAlgebra(k, std::move(c), "trunc" + std::to_string(k));
}

FiniteAlgebra scalars() { return FiniteAlgebra(1, {1.0}, "scalar"); }

FiniteAlgebra algebra_by_name(std::string_view name) {
  if (name == "zero2") return zero_product_algebra(2);
  if (name == "nil1") return nilpotent_line();
  if (name == "scalar") return scalars();
  if (auto k = trunc_order(name)) return truncated_polynomials(*k);
  throw Error(ErrorCode::InvalidArgument, "unknown algebra '" + std::string(name) +
                                              "' (known: zero2, nil1, scalar, trunc<k>)");
}

FiniteAlgebra algebra_from_json(std::string_view text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("algebra JSON: ") + e.what());
  }
  auto entry = [](const json& v) -> Complex {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return {v[0].get<double>(), v[1].get<double>()};
    throw Error(ErrorCode::InvalidArgument, "algebra JSON: entries must be numbers or [re, im]");
  };
  if (!j.is_object() || !j.contains("dim") || !j.contains("c") || !j["dim"].is_number_unsigned())
    throw Error(ErrorCode::InvalidArgument, "algebra JSON needs {\"dim\": d, \"c\": [...]}");
  const auto d = j["dim"].get<std::size_t>();
  const json& c = j["c"];
  std::vector<Complex> flat;
  flat.reserve(d * d * d);
  if (!c.is_array() || c.size() != d) throw Error(ErrorCode::InvalidAlgebra, "algebra JSON: c must be d x d x d");
  for (const auto& row : c) {
    if (!row.is_array() || row.size() != d) throw Error(ErrorCode::InvalidAlgebra, "algebra JSON: c must be d x d x d");
    for (const auto& col : row) {
      if (!col.is_array() || col.size() != d)
        throw Error(ErrorCode::InvalidAlgebra, "algebra JSON: c must be d x d x d");
      for (const auto& v : col) flat.push_back(entry(v));
    }
  }
  std::string name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "custom";
  return FiniteAlgebra(d, std::move(flat), std::move(name));
}

// ---------------------------------------------------------------- modules

FiniteBimodule regular_module(const FiniteAlgebra& a) {
  FiniteBimodule e;
  e.algebra_dim = e.dim = a.dim();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    e.left.push_back(a.basis_multiplication(i));
    e.right.push_back(a.basis_multiplication(i));
  }
  e.symmetric = true;
  e.norm = NormKind::L1;
  e.name = a.name();
  return e;
}

FiniteBimodule truncated_quotient_module(std::size_t k, std::size_t m) {
  if (m == 0 || m > k) throw Error(ErrorCode::InvalidModule, "quotient order must satisfy 1 <= m <= k");
  FiniteBimodule e;
  e.algebra_dim = k;
  e.dim = m;
  const auto md = static_cast<Eigen::Index>(m);
  for (std::size_t i = 0; i < k; ++i) {
    Matrix l = Matrix::Zero(md, md);
    for (std::size_t j = 0; i + j < m; ++j) l(static_cast<Eigen::Index>(i + j), static_cast<Eigen::Index>(j)) = 1.0;
    e.left.push_back(l);
    e.right.push_back(l);
  }
  e.symmetric = true;
  e.norm = NormKind::L1;
  e.name = "trunc" + std::to_string(m) + " over trunc" + std::to_string(k);
  return e;
}

double bimodule_defect(const FiniteAlgebra& a, const FiniteBimodule& e) {
  if (e.algebra_dim != a.dim() || e.left.size() != a.dim() || e.right.size() != a.dim())
    throw Error(ErrorCode::InvalidModule, "module actions do not match the algebra dimension");
  const auto md = static_cast<Eigen::Index>(e.dim);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (e.left[i].rows() != md || e.left[i].cols() != md || e.right[i].rows() != md || e.right[i].cols() != md)
      throw Error(ErrorCode::InvalidModule, "action matrices must be dim x dim");
    if (e.symmetric) worst = std::max(worst, max_abs(e.left[i] - e.right[i]));
    for (std::size_t j = 0; j < a.dim(); ++j) {
      Matrix lprod = Matrix::Zero(md, md), rprod = Matrix::Zero(md, md);
      for (std::size_t k = 0; k < a.dim(); ++k) {
        lprod += a.structure(i, j, k) * e.left[k];
        rprod += a.structure(i, j, k) * e.right[k];
      }
      worst = std::max(worst, max_abs(e.left[i] * e.left[j] - lprod));
      worst = std::max(worst, max_abs(e.right[j] * e.right[i] - rprod));
      worst = std::max(worst, max_abs(e.left[i] * e.right[j] - e.right[j] * e.left[i]));
    }
  }
  return worst;
}

FiniteBimodule dual_module(const FiniteBimodule& e) {
  FiniteBimodule d;
  d.algebra_dim = e.algebra_dim;
  d.dim = e.dim;
  for (std::size_t i = 0; i < e.algebra_dim; ++i) {
    d.left.push_back(e.right[i].transpose());
    d.right.push_back(e.left[i].transpose());
  }
  d.symmetric = e.symmetric;
  d.norm = dual_norm(e.norm);
  d.name = "dual(" + e.name + ")";
  return d;
}

FiniteBimodule algebra_dual(const FiniteAlgebra& a) { return dual_module(regular_module(a)); }

std::string to_string(Space s) {
  switch (s) {
    case Space::Algebra:
      return "A";
    case Space::AlgebraDual:
      return "A*";
    case Space::Module:
      return "E";
    case Space::ModuleDual:
      return "E*";
  }
  return "?";
}

// ---------------------------------------------------------------- linear algebra

Matrix square_span(const FiniteAlgebra& a) {
  const auto d = static_cast<Eigen::Index>(a.dim());
  Matrix products(d, d * d);
  for (std::size_t i = 0; i < a.dim(); ++i) products.middleCols(static_cast<Eigen::Index>(i) * d, d) = a.basis_multiplication(i);
  auto svd = svd_of(products, true);
  const auto r = static_cast<Eigen::Index>(rank_from(svd.singularValues(), kRankThreshold));
  return svd.matrixU().leftCols(r);
}

std::size_t numerical_rank(const Matrix& m, double rel) {
  if (m.size() == 0) return 0;
  return rank_from(svd_of(m, false).singularValues(), rel);
}

double operator_norm(const Matrix& m, NormKind source, NormKind target) {
  if (m.size() == 0) return 0.0;
  if (source == NormKind::L1) {
    return target == NormKind::L1 ? m.cwiseAbs().colwise().sum().maxCoeff() : m.cwiseAbs().maxCoeff();
  }
  return target == NormKind::Linf ? m.cwiseAbs().rowwise().sum().maxCoeff() : m.cwiseAbs().sum();
}

double derivation_defect(const FiniteAlgebra& a, const FiniteBimodule& e, const Matrix& d) {
  if (d.rows() != static_cast<Eigen::Index>(e.dim) || d.cols() != static_cast<Eigen::Index>(a.dim()))
    throw Error(ErrorCode::InvalidArgument, "derivation matrix must be dim(E) x dim(A)");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) {
      Vector lhs = Vector::Zero(d.rows());
      for (std::size_t k = 0; k < a.dim(); ++k) lhs += a.structure(i, j, k) * d.col(static_cast<Eigen::Index>(k));
      Vector rhs = e.left[i] * d.col(static_cast<Eigen::Index>(j)) + e.right[j] * d.col(static_cast<Eigen::Index>(i));
      worst = std::max(worst, max_abs(lhs - rhs));
    }
  return worst;
}

Matrix inner_derivation(const FiniteBimodule& e, const Vector& x) {
  Matrix m(static_cast<Eigen::Index>(e.dim), static_cast<Eigen::Index>(e.algebra_dim));
  for (std::size_t i = 0; i < e.algebra_dim; ++i) m.col(static_cast<Eigen::Index>(i)) = (e.left[i] - e.right[i]) * x;
  return m;
}

RankOneDerivation rank_one_derivation(const FiniteAlgebra& a, const Vector& a0) {
  if (a0.size() != static_cast<Eigen::Index>(a.dim()))
    throw Error(ErrorCode::InvalidArgument, "a0 must have dim(A) coordinates");
  const Matrix b = square_span(a);
  // lambda0 is the minimum-norm solution of {lambda0(v) = 0 on A^2, lambda0(a0) = 1}:
  // the component of conj(a0) orthogonal to conj(A^2), rescaled.
  const Vector target = a0.conjugate();
  const Vector u = target - b.conjugate() * (b.transpose() * target);
  const double nu = u.squaredNorm();
  if (!(std::sqrt(nu) > kRankThreshold * std::max(a0.norm(), 1e-300)))
    throw Error(ErrorCode::NotOutsideSquare, "a0 lies in span(A^2); no rank-one construction exists");
  RankOneDerivation r;
  r.a0 = a0;
  r.lambda0 = u / nu;
  r.derivation = FiniteMap{r.lambda0 * r.lambda0.transpose(), Space::Algebra, Space::AlgebraDual};
  return r;
}

InnerFit is_inner(const FiniteAlgebra& a, const FiniteBimodule& e, const Matrix& d) {
  const auto m = static_cast<Eigen::Index>(e.dim);
  const auto n = static_cast<Eigen::Index>(a.dim());
  if (d.rows() != m || d.cols() != n) throw Error(ErrorCode::InvalidArgument, "derivation matrix must be dim(E) x dim(A)");
  Matrix k(m * n, m);
  Vector rhs(m * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k.middleRows(i * m, m) = e.left[static_cast<std::size_t>(i)] - e.right[static_cast<std::size_t>(i)];
    rhs.segment(i * m, m) = d.col(i);
  }
  InnerFit fit;
  fit.best = max_abs(k) == 0.0 ? Vector::Zero(m) : Vector(k.completeOrthogonalDecomposition().solve(rhs));
  fit.residual = operator_norm(d - inner_derivation(e, fit.best), NormKind::L1, e.norm);
  if (fit.residual <= 1e-10 * std::max(1.0, operator_norm(d, NormKind::L1, e.norm))) fit.solution = fit.best;
  return fit;
}

FiniteMap r_lambda(const FiniteAlgebra& a, const FiniteBimodule& e, const Vector& lambda) {
  if (!e.symmetric) throw Error(ErrorCode::NotSymmetric, "R_lambda needs a symmetric module");
  if (lambda.size() != static_cast<Eigen::Index>(e.dim))
    throw Error(ErrorCode::InvalidArgument, "lambda must have dim(E) coordinates");
  Matrix r(static_cast<Eigen::Index>(a.dim()), static_cast<Eigen::Index>(e.dim));
  for (std::size_t i = 0; i < a.dim(); ++i) r.row(static_cast<Eigen::Index>(i)) = lambda.transpose() * e.left[i];
  return FiniteMap{r, Space::Module, Space::AlgebraDual};
}

double homomorphism_defect(const FiniteAlgebra& a, const FiniteBimodule& e, const Matrix& r) {
  const FiniteBimodule star = algebra_dual(a);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    worst = std::max(worst, max_abs(r * e.left[i] - star.left[i] * r));
    worst = std::max(worst, max_abs(r * e.right[i] - star.right[i] * r));
  }
  return worst;
}

LambdaChoice find_lambda(const FiniteAlgebra& a, const FiniteBimodule& e, const Matrix& d, std::uint64_t seed) {
  if (!e.symmetric) throw Error(ErrorCode::NotSymmetric, "find_lambda needs a symmetric module");
  if (static_cast<std::size_t>(square_span(a).cols()) < a.dim())
    throw Error(ErrorCode::SquareDeficient, "span(A^2) is a proper subspace of A");

  const std::size_t dim = a.dim();
  std::vector<Vector> candidates;
  for (std::size_t i = 0; i < dim; ++i) candidates.push_back(basis(dim, i));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j) candidates.push_back(basis(dim, i) + basis(dim, j));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int r = 0; r < 64; ++r) {
    Vector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      const double re = unit(rng);
      v(k) = Complex(re, unit(rng));
    }
    candidates.push_back(v);
  }

  const double scale = max_abs(d);
  std::size_t probes = 0;
  for (const Vector& a0 : candidates) {
    ++probes;
    const double size = a0.cwiseAbs().sum();
    const Vector dsq = d * a.multiply(a0, a0);
    if (!(max_abs(dsq) > 1e-10 * scale * size * size)) continue;
    Matrix left_a0 = Matrix::Zero(static_cast<Eigen::Index>(e.dim), static_cast<Eigen::Index>(e.dim));
    for (std::size_t i = 0; i < dim; ++i) left_a0 += a0(static_cast<Eigen::Index>(i)) * e.left[i];
    const Vector w = left_a0 * (d * a0);
    const double nw = w.squaredNorm();
    if (!(nw > 0.0)) continue;
    return LambdaChoice{a0, w.conjugate() / nw, probes};
  }
  throw Error(ErrorCode::NoSuchElement,
              "D(a0^2) = 0 for all " + std::to_string(probes) + " candidates probed; D vanishes on squares");
}

FiniteMap transfer(const Matrix& d, const Vector& lambda, const FiniteAlgebra& a, const FiniteBimodule& e) {
  const FiniteMap r = r_lambda(a, e, lambda);
  return FiniteMap{r.matrix * d, Space::Algebra, Space::AlgebraDual};
}

TransferReport run_transfer(const FiniteAlgebra& a, const FiniteBimodule& e, const Matrix& d, std::uint64_t seed) {
  const LambdaChoice choice = find_lambda(a, e, d, seed);
  const FiniteMap r = r_lambda(a, e, choice.lambda);
  TransferReport rep;
  rep.a0 = choice.a0;
  rep.lambda = choice.lambda;
  rep.transferred = transfer(d, choice.lambda, a, e);
  rep.derivation_defect = derivation_defect(a, algebra_dual(a), rep.transferred.matrix);
  rep.homomorphism_defect = homomorphism_defect(a, e, r.matrix);
  rep.pairing = (rep.transferred.matrix * choice.a0).transpose() * choice.a0;
  rep.rank_source = numerical_rank(d);
  rep.rank_transferred = numerical_rank(rep.transferred.matrix);
  rep.norm_source = operator_norm(d, NormKind::L1, e.norm);
  rep.norm_r = operator_norm(r.matrix, e.norm, NormKind::Linf);
  rep.norm_transferred = operator_norm(rep.transferred.matrix, NormKind::L1, NormKind::Linf);
  return rep;
}

CatalogDerivation derivation_by_name(const FiniteAlgebra& a, std::string_view name) {
  const auto k = trunc_order(a.name());
  if (name == "zero")
    return {regular_module(a), Matrix::Zero(static_cast<Eigen::Index>(a.dim()), static_cast<Eigen::Index>(a.dim())),
            "zero derivation into A"};
  if (!k) throw Error(ErrorCode::InvalidArgument, "derivation '" + std::string(name) + "' needs a trunc<k> algebra");
  const auto kd = static_cast<Eigen::Index>(*k);
  if (name == "ddt") {
    if (*k < 2) throw Error(ErrorCode::InvalidArgument, "ddt needs k >= 2");
    Matrix m = Matrix::Zero(kd - 1, kd);
    for (Eigen::Index i = 1; i < kd; ++i) m(i - 1, i) = static_cast<double>(i);
    return {truncated_quotient_module(*k, *k - 1), m, "d/dt from C[t]/(t^k) into C[t]/(t^(k-1))"};
  }
  if (name == "euler") {
    Matrix m = Matrix::Zero(kd, kd);
    for (Eigen::Index i = 0; i < kd; ++i) m(i, i) = static_cast<double>(i);
    return {regular_module(a), m, "t d/dt on C[t]/(t^k)"};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown derivation '" + std::string(name) + "' (known: ddt, euler, zero)");
}

}  // namespace l1d::bimod
