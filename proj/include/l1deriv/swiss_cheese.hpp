#pragma once

// The Swiss-cheese set X = closed unit disc minus open discs D_n = B(a_n, r_n),
// a_n = x_n + i y_n, r_n = y_n^2, with x_n the midpoint of
// I_n = [1/2 - 2^-n, 1/2 - 2^-(n+1)). Everything here concerns the segment
// I = [0, 1/2] and the derivative bound |f'(z)| <= sum_j r_j / s_j(z)^2 |f|_X.

#include <optional>
#include <string>
#include <vector>

#include "l1deriv/error.hpp"

namespace l1d::cheese {

struct Disc {
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;
  Complex center() const { return {x, y}; }
};

struct CheeseSet {
  std::size_t n_max = 0;
  std::vector<Disc> discs;  // discs[n - 1] is D_n
  static constexpr double r0 = 1.0;
  static constexpr double interval_lo = 0.0;
  static constexpr double interval_hi = 0.5;

  const Disc& disc(std::size_t n) const { return discs.at(n - 1); }
};

/// 1/2 - 3 * 2^-(n+2)
double interval_midpoint(std::size_t n);
/// Endpoints of I_n (left closed, right open).
double interval_left(std::size_t n);
double interval_right(std::size_t n);
/// n with x in I_n, or nullopt (x = 1/2 or outside I).
std::optional<std::size_t> interval_index(double x);

/// Admissibility of y for disc n: (a) x_n + iy_n with its radius fits inside
/// the open unit disc; (b) 1/(1-y)^2 < 2; (c) y^2 / den^2 < 2^-(n+1), den the
/// smallest of the three distance expressions below.
struct Admissibility {
  bool containment = false;
  bool near_bound = false;
  bool far_bound = false;
  double near_value = 0.0;      // 1/(1-y)^2
  double far_value = 0.0;       // y^2 / den^2
  double den_minus = 0.0;       // sqrt(2^-2(n+1) - y^2) + y^2  (NaN when y^2 >= 2^-2(n+1))
  double den_plus = 0.0;        // sqrt(2^-2(n+1) + y^2) - y^2
  double den_exact = 0.0;       // sqrt(2^-2(n+2) + y^2) - y^2
  bool ok() const { return containment && near_bound && far_bound; }
};

Admissibility admissibility(std::size_t n, double y);

inline constexpr int kPrecisionFloorExponent = 40;

/// y_n = largest 2^-m (m = 1..40) passing admissibility. Throws ConstructionFailed.
CheeseSet build_cheese(std::size_t n_max);

struct GeometryReport {
  double containment_margin = 0.0;   // min_n 1 - |a_n| - r_n
  double disjointness_margin = 0.0;  // min_{n<m} |a_n - a_m| - r_n - r_m (inf for one disc)
  double avoidance_margin = 0.0;     // min_n dist(D_n, I) = y_n - r_n
  bool radius_exact = false;         // r_n == y_n * y_n for every n
  bool passed() const {
    return containment_margin > 0.0 && disjointness_margin > 0.0 && avoidance_margin > 0.0 && radius_exact;
  }
};

GeometryReport certify_geometry(const CheeseSet& x);

/// j = 0: 1 - |z|; j >= 1: max(0, |z - a_j| - r_j).
double s_dist(const CheeseSet& x, Complex z, std::size_t j);

/// r_j / s_j(z)^2 for real z = x
double feinstein_term(const CheeseSet& x, double t, std::size_t j);

struct FeinsteinValue {
  double value = 0.0;
  double certified_lt = 0.0;  // value + 2^-(n_max+1)
};

/// Throws OnBoundary when some s_j(z) = 0.
FeinsteinValue feinstein_sum(const CheeseSet& x, Complex z);

/// c + sum_k residue_k / (z - pole_k)
struct RationalFunction {
  Complex constant{};
  std::vector<Complex> poles;
  std::vector<Complex> residues;

  Complex operator()(Complex z) const;
  Complex derivative(Complex z) const;
};

/// f_n(z) = r_n / (z - a_n)
RationalFunction probe_function(const CheeseSet& x, std::size_t n);
RationalFunction operator+(const RationalFunction& f, const RationalFunction& g);

/// `points` equally spaced points of I including both endpoints (points >= 2).
std::vector<double> uniform_grid(std::size_t points);
/// uniform_grid(points) with the midpoints x_n added, sorted.
std::vector<double> verification_grid(const CheeseSet& x, std::size_t points);

struct GridRow {
  double x = 0.0;
  double sum = 0.0;
  double certified_lt = 0.0;
};

struct TermStats {
  std::size_t n = 0;
  double bound = 0.0;               // 2^-(n+1)
  double off_interval_max = 0.0;    // max over grid points outside I_n
  double on_interval_max = 0.0;     // max over grid points inside I_n (0 when none)
  double near_limit = 0.0;          // 1/(1-y_n)^2, the supremum over I_n
  std::size_t on_interval_points = 0;
  std::size_t literal_violations = 0;  // grid points with term >= bound + 1e-12
  bool passed = false;              // off max < bound + 1e-12 and on max < 2
};

struct SweepReport {
  std::vector<GridRow> rows;
  std::vector<TermStats> terms;
  double max_certified = 0.0;
  double argmax = 0.0;
  double bound = 6.5;
  bool per_term_passed = false;
  bool passed() const { return per_term_passed && max_certified < bound; }
};

/// Feinstein sum and per-term certificates over verification_grid(x, points).
SweepReport verify(const CheeseSet& x, std::size_t points);

struct DerivativeBoundReport {
  double max_derivative = 0.0;  // over the I-grid
  double argmax = 0.0;
  double sup_estimate = 0.0;    // sampled |f|_X
  double ratio = 0.0;
  double constant = 0.0;        // max certified Feinstein sum over the grid
  double tolerance = 1e-9;
  bool passed = false;
};

/// Throws PoleInX when a pole of f is not strictly inside a removed disc or outside the closed unit disc.
DerivativeBoundReport derivative_bound_check(const CheeseSet& x, const RationalFunction& f, std::size_t points);

struct NoncompactReport {
  std::size_t n_hi = 0;
  std::vector<std::vector<double>> m;   // m[n-1][k-1] = |f_n'(x_k)|
  double diagonal_defect = 0.0;         // max_n |m[n][n] - 1|
  std::vector<std::vector<double>> separation;  // L_ij = max_grid |f_i' - f_j'|, i != j
  double min_separation = 0.0;
  double floor = 0.0;                   // min_{i<j} max(1 - m[i][j], 1 - m[j][i])
  bool passed = false;                  // defect <= 1e-12, min sep >= 0.7, floor >= 3/4
};

NoncompactReport noncompact_report(const CheeseSet& x, std::size_t n_hi, std::size_t points);

std::string to_json(const CheeseSet& x);
CheeseSet cheese_from_json(const std::string& text);

}  // namespace l1d::cheese
