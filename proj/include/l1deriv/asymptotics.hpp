#pragma once

// Tail certificates for closed-form rules.
//
// Every expression of the rule language whose exponents are constant
// integers, or affine in n over a constant base, is exactly a quotient
// P(n)/Q(n) of exponential polynomials  sum_i c_i n^{p_i} b_i^n.  Writing
// each sum as its dominant term times (1 + rest), with every ratio
// rest_i(n) = |c_i/c_L| n^{p_i-p_L} |b_i/b_L|^n eventually non-increasing,
// gives explicit bounds on sup_{m>=N} |f(m)| and inf_{m>=N} |f(m)| that hold
// for all N past a computed onset.

#include <optional>
#include <vector>

#include "l1deriv/error.hpp"
#include "l1deriv/rule.hpp"

namespace l1d::asym {

struct Term {
  double coeff = 0.0;
  int power = 0;
  double base = 1.0;
};

class ExpPoly {
 public:
  ExpPoly() = default;
  explicit ExpPoly(std::vector<Term> terms);

  static ExpPoly constant(double c);
  static ExpPoly identity();

  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::optional<double> as_constant() const;
  double evaluate(double n) const;

  friend ExpPoly operator+(const ExpPoly& a, const ExpPoly& b);
  friend ExpPoly operator*(const ExpPoly& a, const ExpPoly& b);
  ExpPoly operator-() const;

 private:
  void normalize();
  std::vector<Term> terms_;
};

struct Rational {
  ExpPoly num;
  ExpPoly den = ExpPoly::constant(1.0);
  double evaluate(double n) const { return num.evaluate(n) / den.evaluate(n); }
};

/// Exact symbolic form, or nullopt when the expression leaves the analyzable class.
std::optional<Rational> analyze(const rule::Expr& e);

enum class LimitKind { Zero, Finite, Infinite, Unknown };

class TailBound {
 public:
  static std::optional<TailBound> from_rational(const Rational& r);
  static std::optional<TailBound> from_expr(const rule::Expr& e);

  LimitKind limit_kind() const noexcept { return kind_; }
  /// lim |f(n)| when limit_kind() is Zero or Finite.
  double limit() const noexcept { return limit_; }
  /// Both bounds below hold for every N >= valid_from().
  Index valid_from() const noexcept { return valid_from_; }

  double upper(Index n) const;
  /// Lower bound on inf_{m>=n} |f(m)|; nullopt when the dominant part of P is not a single term.
  std::optional<double> lower(Index n) const;

 private:
  struct Side {
    double lead = 0.0;  // |c_L| (sum over the dominant group for an ambiguous numerator)
    bool unique = true;
    std::vector<Term> rest;  // coeff = |c_i/c_L|, power = p_i - p_L, base = |b_i/b_L|
  };
  static std::optional<Side> split(const ExpPoly& e);
  static double rest_sum(const Side& s, Index n);
  double growth(Index n) const;

  Side num_, den_;
  bool zero_ = false;
  int power_ = 0;      // dominant power p_P - p_Q
  double ratio_ = 1;   // |b_P| / |b_Q|
  LimitKind kind_ = LimitKind::Unknown;
  double limit_ = 0.0;
  Index valid_from_ = 1;
};

/// Least n >= 1 from which n^power * ratio^n is non-increasing (ratio <= 1).
Index monotone_onset(int power, double ratio);

}  // namespace l1d::asym
