#include "l1deriv/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace l1d::asym {

namespace {

constexpr std::size_t kMaxTerms = 512;
constexpr int kMaxIntegerPower = 32;
constexpr double kBaseTol = 1e-13;

bool same_base(double a, double b) { return std::abs(a - b) <= kBaseTol * std::max(std::abs(a), std::abs(b)); }

// Term ordering: dominant first (larger |b|, then larger p).
bool dominates(const Term& a, const Term& b) {
  const double ma = std::abs(a.base), mb = std::abs(b.base);
  if (!same_base(ma, mb)) return ma > mb;
  if (a.power != b.power) return a.power > b.power;
  return a.base > b.base;
}

std::optional<ExpPoly> integer_power(const ExpPoly& base, int k) {
  ExpPoly acc = ExpPoly::constant(1.0);
  for (int i = 0; i < k; ++i) {
    acc = acc * base;
    if (acc.terms().size() > kMaxTerms) return std::nullopt;
  }
  return acc;
}

std::optional<Rational> combine(std::optional<Rational> a, std::optional<Rational> b, rule::Op op) {
  if (!a || !b) return std::nullopt;
  Rational r;
  switch (op) {
    case rule::Op::Add:
    case rule::Op::Sub: {
      ExpPoly rhs = op == rule::Op::Add ? b->num : -b->num;
      auto ca = a->den.as_constant(), cb = b->den.as_constant();
      if (ca && cb && *ca == *cb) {
        r.num = a->num + rhs;
        r.den = a->den;
      } else {
        r.num = a->num * b->den + rhs * a->den;
        r.den = a->den * b->den;
      }
      break;
    }
    case rule::Op::Mul:
      r.num = a->num * b->num;
      r.den = a->den * b->den;
      break;
    case rule::Op::Div:
      if (b->num.is_zero()) return std::nullopt;
      r.num = a->num * b->den;
      r.den = a->den * b->num;
      break;
    default:
      return std::nullopt;
  }
  if (r.num.terms().size() > kMaxTerms || r.den.terms().size() > kMaxTerms) return std::nullopt;
  return r;
}

// Exponent of the form alpha*n + beta.
std::optional<std::pair<double, double>> affine_exponent(const Rational& r) {
  auto d = r.den.as_constant();
  if (!d) return std::nullopt;
  double alpha = 0.0, beta = 0.0;
  for (const Term& t : r.num.terms()) {
    if (t.base != 1.0) return std::nullopt;
    if (t.power == 0)
      beta += t.coeff / *d;
    else if (t.power == 1)
      alpha += t.coeff / *d;
    else
      return std::nullopt;
  }
  return std::make_pair(alpha, beta);
}

std::optional<Rational> analyze_pow(const rule::Expr& e) {
  auto base = analyze(*e.lhs);
  auto exponent = analyze(*e.rhs);
  if (!base || !exponent) return std::nullopt;
  auto affine = affine_exponent(*exponent);
  if (!affine) return std::nullopt;
  auto [alpha, beta] = *affine;

  if (alpha == 0.0) {
    if (std::nearbyint(beta) != beta || std::abs(beta) > kMaxIntegerPower) return std::nullopt;
    const int k = static_cast<int>(beta);
    auto num = integer_power(base->num, std::abs(k));
    auto den = integer_power(base->den, std::abs(k));
    if (!num || !den) return std::nullopt;
    if (k < 0) std::swap(num, den);
    if (den->is_zero()) return std::nullopt;
    return Rational{*num, *den};
  }

  // Variable exponent: only a constant base is in the class.
  auto bn = base->num.as_constant();
  auto bd = base->den.as_constant();
  if (!bn || !bd || *bn == 0.0) return std::nullopt;
  const double b = *bn / *bd;
  if (b < 0.0 && (std::nearbyint(alpha) != alpha || std::nearbyint(beta) != beta)) return std::nullopt;
  const double scale = std::pow(b, beta);
  const double step = std::pow(b, alpha);
  if (!std::isfinite(scale) || !std::isfinite(step) || scale == 0.0 || step == 0.0) return std::nullopt;
  return Rational{ExpPoly({Term{scale, 0, step}}), ExpPoly::constant(1.0)};
}

double log_rest(const Term& t, Index n) {
  return std::log(t.coeff) + t.power * std::log(static_cast<double>(n)) + static_cast<double>(n) * std::log(t.base);
}

}  // namespace

// ---------------------------------------------------------------- ExpPoly

ExpPoly::ExpPoly(std::vector<Term> terms) : terms_(std::move(terms)) { normalize(); }

ExpPoly ExpPoly::constant(double c) { return ExpPoly({Term{c, 0, 1.0}}); }

ExpPoly ExpPoly::identity() { return ExpPoly({Term{1.0, 1, 1.0}}); }

std::optional<double> ExpPoly::as_constant() const {
  if (terms_.empty()) return 0.0;
  if (terms_.size() == 1 && terms_[0].power == 0 && terms_[0].base == 1.0) return terms_[0].coeff;
  return std::nullopt;
}

double ExpPoly::evaluate(double n) const {
  double s = 0.0;
  for (const Term& t : terms_) s += t.coeff * std::pow(n, t.power) * std::pow(t.base, n);
  return s;
}

void ExpPoly::normalize() {
  std::sort(terms_.begin(), terms_.end(), dominates);
  std::vector<Term> merged;
  std::vector<double> scale;
  for (const Term& t : terms_) {
    if (!merged.empty() && merged.back().power == t.power && same_base(merged.back().base, t.base)) {
      merged.back().coeff += t.coeff;
      scale.back() += std::abs(t.coeff);
    } else {
      merged.push_back(t);
      scale.push_back(std::abs(t.coeff));
    }
  }
  terms_.clear();
  for (std::size_t i = 0; i < merged.size(); ++i)
    if (std::abs(merged[i].coeff) > 1e-14 * scale[i]) terms_.push_back(merged[i]);
}

ExpPoly operator+(const ExpPoly& a, const ExpPoly& b) {
  std::vector<Term> t = a.terms_;
  t.insert(t.end(), b.terms_.begin(), b.terms_.end());
  return ExpPoly(std::move(t));
}

ExpPoly operator*(const ExpPoly& a, const ExpPoly& b) {
  std::vector<Term> t;
  t.reserve(a.terms_.size() * b.terms_.size());
  for (const Term& x : a.terms_)
    for (const Term& y : b.terms_) t.push_back(Term{x.coeff * y.coeff, x.power + y.power, x.base * y.base});
  return ExpPoly(std::move(t));
}

ExpPoly ExpPoly::operator-() const {
  ExpPoly r = *this;
  for (Term& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

std::optional<Rational> analyze(const rule::Expr& e) {
  switch (e.op) {
    case rule::Op::Lit:
      return Rational{ExpPoly::constant(e.value), ExpPoly::constant(1.0)};
    case rule::Op::Var:
      return Rational{ExpPoly::identity(), ExpPoly::constant(1.0)};
    case rule::Op::Neg: {
      auto inner = analyze(*e.lhs);
      if (!inner) return std::nullopt;
      return Rational{-inner->num, inner->den};
    }
    case rule::Op::Pow:
      return analyze_pow(e);
    default:
      return combine(analyze(*e.lhs), analyze(*e.rhs), e.op);
  }
}

// ---------------------------------------------------------------- TailBound

Index monotone_onset(int power, double ratio) {
  if (ratio > 1.0 || (ratio == 1.0 && power > 0)) return kIndexCap;
  if (power <= 0) return 1;
  // (1 + 1/n)^p * ratio <= 1  <=>  n >= 1 / expm1(-log(ratio) / p)
  const double threshold = 1.0 / std::expm1(-std::log(ratio) / power);
  if (!(threshold < static_cast<double>(kIndexCap) / 2)) return kIndexCap;
  return static_cast<Index>(std::ceil(threshold)) + 1;
}

std::optional<TailBound::Side> TailBound::split(const ExpPoly& e) {
  const auto& t = e.terms();
  if (t.empty()) return std::nullopt;
  Side s;
  const double lead_mag = std::abs(t[0].base);
  std::size_t group = 0;
  while (group < t.size() && t[group].power == t[0].power && same_base(std::abs(t[group].base), lead_mag)) ++group;
  s.unique = group == 1;
  for (std::size_t i = 0; i < group; ++i) s.lead += std::abs(t[i].coeff);
  for (std::size_t i = group; i < t.size(); ++i) {
    s.rest.push_back(Term{std::abs(t[i].coeff) / s.lead, t[i].power - t[0].power, std::abs(t[i].base) / lead_mag});
    if (s.rest.back().base >= 1.0) s.rest.back().base = std::min(s.rest.back().base, 1.0);
  }
  return s;
}

double TailBound::rest_sum(const Side& s, Index n) {
  double sum = 0.0;
  for (const Term& r : s.rest) sum += std::exp(log_rest(r, n));
  return sum;
}

std::optional<TailBound> TailBound::from_expr(const rule::Expr& e) {
  auto r = analyze(e);
  if (!r) return std::nullopt;
  return from_rational(*r);
}

std::optional<TailBound> TailBound::from_rational(const Rational& r) {
  auto den = split(r.den);
  if (!den || !den->unique) return std::nullopt;
  TailBound tb;
  tb.den_ = *den;

  Index onset = 1;
  for (const Term& t : den->rest) onset = std::max(onset, monotone_onset(t.power, t.base));

  if (r.num.is_zero()) {
    tb.zero_ = true;
    tb.kind_ = LimitKind::Zero;
  } else {
    tb.num_ = *split(r.num);
    for (const Term& t : tb.num_.rest) onset = std::max(onset, monotone_onset(t.power, t.base));
    const Term& p = r.num.terms().front();
    const Term& q = r.den.terms().front();
    tb.power_ = p.power - q.power;
    tb.ratio_ = std::abs(p.base) / std::abs(q.base);
    if (same_base(tb.ratio_, 1.0)) tb.ratio_ = 1.0;
    const double scale = tb.num_.lead / tb.den_.lead;
    if (tb.ratio_ < 1.0 || (tb.ratio_ == 1.0 && tb.power_ < 0)) {
      tb.kind_ = LimitKind::Zero;
      onset = std::max(onset, monotone_onset(tb.power_, tb.ratio_));
    } else if (tb.ratio_ == 1.0 && tb.power_ == 0) {
      tb.kind_ = tb.num_.unique ? LimitKind::Finite : LimitKind::Unknown;
      tb.limit_ = scale;
    } else {
      tb.kind_ = tb.num_.unique ? LimitKind::Infinite : LimitKind::Unknown;
      tb.limit_ = std::numeric_limits<double>::infinity();
    }
  }
  if (onset >= kIndexCap) return std::nullopt;

  // The denominator must stay away from zero: rest sum at most 1/2.
  Index n = onset;
  while (rest_sum(tb.den_, n) > 0.5) {
    if (n >= kIndexCap / 2) return std::nullopt;
    n *= 2;
  }
  tb.valid_from_ = n;
  return tb;
}

double TailBound::growth(Index n) const {
  const double scale = num_.lead / den_.lead;
  if (ratio_ == 1.0 && power_ == 0) return scale;
  return std::exp(std::log(scale) + power_ * std::log(static_cast<double>(n)) + static_cast<double>(n) * std::log(ratio_));
}

double TailBound::upper(Index n) const {
  n = std::max(n, valid_from_);
  if (zero_) return 0.0;
  if (kind_ == LimitKind::Infinite || (kind_ == LimitKind::Unknown && !(ratio_ < 1.0 || (ratio_ == 1.0 && power_ <= 0))))
    return std::numeric_limits<double>::infinity();
  const double sp = rest_sum(num_, n);
  const double sq = rest_sum(den_, n);
  return growth(n) * (1.0 + sp) / (1.0 - sq);
}

std::optional<double> TailBound::lower(Index n) const {
  n = std::max(n, valid_from_);
  if (zero_) return 0.0;
  if (!num_.unique) return std::nullopt;
  if (kind_ == LimitKind::Zero) return 0.0;
  const double sp = rest_sum(num_, n);
  const double sq = rest_sum(den_, n);
  if (sp >= 1.0) return 0.0;
  if (kind_ == LimitKind::Finite) return limit_ * (1.0 - sp) / (1.0 + sq);
  // Growing dominant part: non-decreasing once past its own onset, so the
  // value at n is a valid infimum only from there; report 0 before that.
  Index rising = 1;
  if (power_ < 0 && ratio_ > 1.0) {
    const double threshold = 1.0 / std::expm1(std::log(ratio_) / -power_);
    rising = static_cast<Index>(std::min(std::ceil(threshold) + 1, static_cast<double>(kIndexCap)));
  }
  if (n < rising) return 0.0;
  return growth(n) * (1.0 - sp) / (1.0 + sq);
}

}  // namespace l1d::asym
