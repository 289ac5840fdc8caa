#include "l1deriv/swiss_cheese.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

namespace l1d::cheese {

namespace {

constexpr double kTermSlack = 1e-12;

double pow2(int e) { return std::ldexp(1.0, e); }

void require_n(const CheeseSet& x, std::size_t n) {
  if (n < 1 || n > x.n_max)
    throw Error(ErrorCode::InvalidArgument, "disc index " + std::to_string(n) + " outside 1.." + std::to_string(x.n_max));
}

}  // namespace

double interval_midpoint(std::size_t n) { return 0.5 - 3.0 * pow2(-static_cast<int>(n) - 2); }
double interval_left(std::size_t n) { return 0.5 - pow2(-static_cast<int>(n)); }
double interval_right(std::size_t n) { return 0.5 - pow2(-static_cast<int>(n) - 1); }

std::optional<std::size_t> interval_index(double x) {
  if (!(x >= 0.0) || !(x < 0.5)) return std::nullopt;
  for (std::size_t n = 1; n < 1100; ++n)
    if (x < interval_right(n)) return n;
  return std::nullopt;
}

Admissibility admissibility(std::size_t n, double y) {
  Admissibility a;
  const int e = static_cast<int>(n);
  const double x = interval_midpoint(n);
  const double r = y * y;
  a.containment = std::abs(Complex(x, y)) + r < 1.0;
  a.near_value = 1.0 / ((1.0 - y) * (1.0 - y));
  a.near_bound = a.near_value < 2.0;
  const double w2 = pow2(-2 * (e + 1));
  a.den_minus = r < w2 ? std::sqrt(w2 - r) + r : std::numeric_limits<double>::quiet_NaN();
  a.den_plus = std::sqrt(w2 + r) - r;
  a.den_exact = std::sqrt(pow2(-2 * (e + 2)) + r) - r;
  if (r < w2 && a.den_exact > 0.0) {
    const double den = std::min({a.den_minus, a.den_plus, a.den_exact});
    a.far_value = r / (den * den);
    a.far_bound = a.far_value < pow2(-(e + 1));
  } else {
    a.far_value = std::numeric_limits<double>::infinity();
  }
  return a;
}

CheeseSet build_cheese(std::size_t n_max) {
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be at least 1");
  if (n_max > 64) throw Error(ErrorCode::InvalidArgument, "n_max must be at most 64");
  CheeseSet c;
  c.n_max = n_max;
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::optional<double> chosen;
    for (int m = 1; m <= kPrecisionFloorExponent && !chosen; ++m) {
      const double y = pow2(-m);
      if (admissibility(n, y).ok()) chosen = y;
    }
    if (!chosen)
      throw Error(ErrorCode::ConstructionFailed,
                  "no admissible y_" + std::to_string(n) + " above 2^-" + std::to_string(kPrecisionFloorExponent));
    c.discs.push_back(Disc{interval_midpoint(n), *chosen, *chosen * *chosen});
  }
  const GeometryReport g = certify_geometry(c);
  if (!g.passed()) throw Error(ErrorCode::ConstructionFailed, "constructed discs fail the geometry certificate");
  return c;
}

GeometryReport certify_geometry(const CheeseSet& x) {
  GeometryReport g;
  g.containment_margin = std::numeric_limits<double>::infinity();
  g.disjointness_margin = std::numeric_limits<double>::infinity();
  g.avoidance_margin = std::numeric_limits<double>::infinity();
  g.radius_exact = true;
  for (std::size_t i = 0; i < x.discs.size(); ++i) {
    const Disc& d = x.discs[i];
    g.radius_exact = g.radius_exact && d.r > 0.0 && d.r == d.y * d.y;
    g.containment_margin = std::min(g.containment_margin, 1.0 - std::abs(d.center()) - d.r);
    // distance from the centre to the segment [0, 1/2] on the real axis
    const double cx = std::clamp(d.x, CheeseSet::interval_lo, CheeseSet::interval_hi);
    g.avoidance_margin = std::min(g.avoidance_margin, std::abs(d.center() - Complex(cx, 0.0)) - d.r);
    for (std::size_t j = i + 1; j < x.discs.size(); ++j) {
      const Disc& e = x.discs[j];
      g.disjointness_margin = std::min(g.disjointness_margin, std::abs(d.center() - e.center()) - d.r - e.r);
    }
  }
  return g;
}

double s_dist(const CheeseSet& x, Complex z, std::size_t j) {
  if (j == 0) return 1.0 - std::abs(z);
  require_n(x, j);
  const Disc& d = x.disc(j);
  return std::max(0.0, std::abs(z - d.center()) - d.r);
}

double feinstein_term(const CheeseSet& x, double t, std::size_t j) {
  const double s = s_dist(x, Complex(t, 0.0), j);
  const double r = j == 0 ? CheeseSet::r0 : x.disc(j).r;
  return r / (s * s);
}

FeinsteinValue feinstein_sum(const CheeseSet& x, Complex z) {
  FeinsteinValue v;
  for (std::size_t j = 0; j <= x.n_max; ++j) {
    const double s = s_dist(x, z, j);
    if (!(s > 0.0))
      throw Error(ErrorCode::OnBoundary, "s_" + std::to_string(j) + "(z) = 0; z is not in the interior of X");
    const double r = j == 0 ? CheeseSet::r0 : x.disc(j).r;
    v.value += r / (s * s);
  }
  v.certified_lt = v.value + pow2(-static_cast<int>(x.n_max) - 1);
  return v;
}

Complex RationalFunction::operator()(Complex z) const {
  Complex v = constant;
  for (std::size_t k = 0; k < poles.size(); ++k) v += residues[k] / (z - poles[k]);
  return v;
}

Complex RationalFunction::derivative(Complex z) const {
  Complex v{};
  for (std::size_t k = 0; k < poles.size(); ++k) {
    const Complex d = z - poles[k];
    v -= residues[k] / (d * d);
  }
  return v;
}

RationalFunction probe_function(const CheeseSet& x, std::size_t n) {
  require_n(x, n);
  const Disc& d = x.disc(n);
  return RationalFunction{0.0, {d.center()}, {d.r}};
}

RationalFunction operator+(const RationalFunction& f, const RationalFunction& g) {
  RationalFunction h = f;
  h.constant += g.constant;
  h.poles.insert(h.poles.end(), g.poles.begin(), g.poles.end());
  h.residues.insert(h.residues.end(), g.residues.begin(), g.residues.end());
  return h;
}

std::vector<double> uniform_grid(std::size_t points) {
  if (points < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 points");
  std::vector<double> g(points);
  const double step = (CheeseSet::interval_hi - CheeseSet::interval_lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = CheeseSet::interval_lo + step * static_cast<double>(i);
  g.back() = CheeseSet::interval_hi;
  return g;
}

std::vector<double> verification_grid(const CheeseSet& x, std::size_t points) {
  std::vector<double> g = uniform_grid(points);
  for (const Disc& d : x.discs) g.push_back(d.x);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

SweepReport verify(const CheeseSet& x, std::size_t points) {
  SweepReport rep;
  const std::vector<double> grid = verification_grid(x, points);
  rep.rows.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const FeinsteinValue v = feinstein_sum(x, Complex(grid[i], 0.0));
    rep.rows[i] = GridRow{grid[i], v.value, v.certified_lt};
    if (v.certified_lt > rep.max_certified) {
      rep.max_certified = v.certified_lt;
      rep.argmax = grid[i];
    }
  }
  rep.per_term_passed = true;
  for (std::size_t n = 1; n <= x.n_max; ++n) {
    TermStats t;
    t.n = n;
    t.bound = pow2(-static_cast<int>(n) - 1);
    const double y = x.disc(n).y;
    t.near_limit = 1.0 / ((1.0 - y) * (1.0 - y));
    for (double p : grid) {
      const double term = feinstein_term(x, p, n);
      if (term >= t.bound + kTermSlack) ++t.literal_violations;
      if (interval_index(p) == n) {
        ++t.on_interval_points;
        t.on_interval_max = std::max(t.on_interval_max, term);
      } else {
        t.off_interval_max = std::max(t.off_interval_max, term);
      }
    }
    t.passed = t.off_interval_max < t.bound + kTermSlack && t.on_interval_max < 2.0;
    rep.per_term_passed = rep.per_term_passed && t.passed;
    rep.terms.push_back(t);
  }
  return rep;
}

DerivativeBoundReport derivative_bound_check(const CheeseSet& x, const RationalFunction& f, std::size_t points) {
  if (f.poles.size() != f.residues.size())
    throw Error(ErrorCode::InvalidArgument, "rational function needs one residue per pole");
  for (const Complex& p : f.poles) {
    bool removed = std::abs(p) > 1.0;
    for (const Disc& d : x.discs) removed = removed || std::abs(p - d.center()) < d.r;
    if (!removed)
      throw Error(ErrorCode::PoleInX, "pole (" + std::to_string(p.real()) + ", " + std::to_string(p.imag()) +
                                          ") lies in X");
  }
  DerivativeBoundReport rep;
  const std::vector<double> grid = verification_grid(x, points);
  for (double t : grid) {
    const double d = std::abs(f.derivative(Complex(t, 0.0)));
    if (d > rep.max_derivative) {
      rep.max_derivative = d;
      rep.argmax = t;
    }
    rep.sup_estimate = std::max(rep.sup_estimate, std::abs(f(Complex(t, 0.0))));
    rep.constant = std::max(rep.constant, feinstein_sum(x, Complex(t, 0.0)).certified_lt);
  }
  auto circle = [&](Complex c, double radius, int samples) {
    for (int k = 0; k < samples; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / samples;
      rep.sup_estimate = std::max(rep.sup_estimate, std::abs(f(c + std::polar(radius, theta))));
    }
  };
  circle(0.0, 1.0, 4096);
  for (const Disc& d : x.discs) circle(d.center(), d.r, 256);
  rep.ratio = rep.sup_estimate > 0.0 ? rep.max_derivative / rep.sup_estimate : 0.0;
  rep.passed = rep.ratio <= rep.constant + rep.tolerance;
  return rep;
}

NoncompactReport noncompact_report(const CheeseSet& x, std::size_t n_hi, std::size_t points) {
  if (n_hi < 2 || n_hi > x.n_max) throw Error(ErrorCode::InvalidArgument, "n_hi must satisfy 2 <= n_hi <= n_max");
  NoncompactReport rep;
  rep.n_hi = n_hi;
  rep.m.assign(n_hi, std::vector<double>(n_hi));
  for (std::size_t n = 1; n <= n_hi; ++n) {
    const Disc& d = x.disc(n);
    for (std::size_t k = 1; k <= n_hi; ++k) {
      // |x_k - a_n|^2 = (x_k - x_n)^2 + y_n^2, exact on the diagonal
      const double dx = x.disc(k).x - d.x;
      rep.m[n - 1][k - 1] = d.r / (dx * dx + d.y * d.y);
    }
    rep.diagonal_defect = std::max(rep.diagonal_defect, std::abs(rep.m[n - 1][n - 1] - 1.0));
  }

  const std::vector<double> grid = verification_grid(x, points);
  std::vector<std::vector<Complex>> deriv(n_hi, std::vector<Complex>(grid.size()));
  for (std::size_t n = 1; n <= n_hi; ++n) {
    const RationalFunction f = probe_function(x, n);
    for (std::size_t g = 0; g < grid.size(); ++g) deriv[n - 1][g] = f.derivative(Complex(grid[g], 0.0));
  }
  rep.separation.assign(n_hi, std::vector<double>(n_hi, 0.0));
  rep.min_separation = std::numeric_limits<double>::infinity();
  rep.floor = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_hi; ++i)
    for (std::size_t j = i + 1; j < n_hi; ++j) {
      double l = 0.0;
      for (std::size_t g = 0; g < grid.size(); ++g) l = std::max(l, std::abs(deriv[i][g] - deriv[j][g]));
      rep.separation[i][j] = rep.separation[j][i] = l;
      rep.min_separation = std::min(rep.min_separation, l);
      rep.floor = std::min(rep.floor, std::max(1.0 - rep.m[i][j], 1.0 - rep.m[j][i]));
    }
  rep.passed = rep.diagonal_defect <= 1e-12 && rep.min_separation >= 0.7 && rep.floor >= 0.75;
  return rep;
}

std::string to_json(const CheeseSet& x) {
  nlohmann::ordered_json j;
  j["n_max"] = x.n_max;
  j["discs"] = nlohmann::ordered_json::array();
  for (const Disc& d : x.discs) j["discs"].push_back({{"x", d.x}, {"y", d.y}, {"r", d.r}});
  return j.dump();
}

CheeseSet cheese_from_json(const std::string& text) {
  CheeseSet c;
  try {
    const auto j = nlohmann::json::parse(text);
    c.n_max = j.at("n_max").get<std::size_t>();
    for (const auto& d : j.at("discs"))
      c.discs.push_back(Disc{d.at("x").get<double>(), d.at("y").get<double>(), d.at("r").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("cheese JSON: ") + e.what());
  }
  if (c.n_max < 1 || c.discs.size() != c.n_max)
    throw Error(ErrorCode::InvalidArgument, "cheese JSON: n_max must equal the number of discs");
  if (!certify_geometry(c).passed())
    throw Error(ErrorCode::ConstructionFailed, "cheese JSON: discs fail the geometry certificate");
  return c;
}

}  // namespace l1d::cheese
