#include "l1deriv/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace l1d {

namespace {

constexpr double kExactLimit = double(1 << 20);

bool small_integer(double x) { return std::nearbyint(x) == x && std::abs(x) <= kExactLimit; }

std::shared_ptr<const std::optional<asym::TailBound>> no_bound() {
  static const auto empty = std::make_shared<const std::optional<asym::TailBound>>();
  return empty;
}

}  // namespace

// ---------------------------------------------------------------- L1Element

L1Element::L1Element(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back() == Complex{}) coeffs_.pop_back();
  if (coeffs_.size() > kMaxDegree + 1)
    throw Error(ErrorCode::DegreeOverflow, "degree " + std::to_string(coeffs_.size() - 1) + " exceeds cap " +
                                               std::to_string(kMaxDegree));
}

L1Element L1Element::monomial(Index k, Complex c) {
  if (k > kMaxDegree) throw Error(ErrorCode::DegreeOverflow, "monomial degree exceeds cap");
  std::vector<Complex> v(static_cast<std::size_t>(k) + 1);
  v.back() = c;
  return L1Element(std::move(v));
}

bool L1Element::gaussian_integral() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](Complex c) { return small_integer(c.real()) && small_integer(c.imag()); });
}

L1Element convolve(const L1Element& a, const L1Element& b) {
  if (a.is_zero() || b.is_zero()) return {};
  const std::size_t na = a.support(), nb = b.support();
  if (na + nb - 1 > L1Element::kMaxDegree + 1)
    throw Error(ErrorCode::DegreeOverflow, "product degree exceeds cap");
  std::vector<Complex> out(na + nb - 1);
  const auto& ca = a.coeffs();
  const auto& cb = b.coeffs();

  if (a.gaussian_integral() && b.gaussian_integral()) {
    // |re|,|im| <= 2^20 and at most 2^16+1 terms per sum keep every partial sum below 2^58.
    std::vector<std::int64_t> re(out.size()), im(out.size());
    for (std::size_t i = 0; i < na; ++i) {
      const auto ar = static_cast<std::int64_t>(ca[i].real()), ai = static_cast<std::int64_t>(ca[i].imag());
      for (std::size_t j = 0; j < nb; ++j) {
        const auto br = static_cast<std::int64_t>(cb[j].real()), bi = static_cast<std::int64_t>(cb[j].imag());
        re[i + j] += ar * br - ai * bi;
        im[i + j] += ar * bi + ai * br;
      }
    }
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = Complex(static_cast<double>(re[k]), static_cast<double>(im[k]));
  } else {
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t j = 0; j < nb; ++j) out[i + j] += ca[i] * cb[j];
  }
  return L1Element(std::move(out));
}

double l1_norm(const L1Element& a) {
  double s = 0.0;
  for (Complex c : a.coeffs()) s += std::abs(c);
  return s;
}

// ---------------------------------------------------------------- DualSequence

DualSequence::DualSequence(Rule rule, ZeroTail tail) : tail_(tail), bound_(no_bound()) {
  const Index from = tail.from;
  rule_ = [inner = std::move(rule), from](Index n) { return n >= from ? Complex{} : inner(n); };
}

DualSequence::DualSequence(Rule rule, Undeclared tail) : rule_(std::move(rule)), tail_(tail), bound_(no_bound()) {}

DualSequence::DualSequence(rule::ExprPtr expr)
    : DualSequence([expr](Index n) { return Complex(rule::evaluate(*expr, static_cast<double>(n)), 0.0); }, expr) {}

DualSequence::DualSequence(Rule rule, rule::ExprPtr expr)
    : rule_(std::move(rule)),
      tail_(ClosedForm{expr}),
      bound_(std::make_shared<const std::optional<asym::TailBound>>(asym::TailBound::from_expr(*expr))) {}

DualSequence DualSequence::zero() {
  return DualSequence([](Index) { return Complex{}; }, ZeroTail{0});
}

DualSequence DualSequence::table(std::vector<Complex> values, bool zero_tail) {
  const Index size = values.size();
  auto shared = std::make_shared<const std::vector<Complex>>(std::move(values));
  Rule rule = [shared](Index n) { return n < shared->size() ? (*shared)[n] : Complex{}; };
  if (zero_tail) return DualSequence(std::move(rule), ZeroTail{size});
  return DualSequence(std::move(rule), Undeclared{});
}

Complex DualSequence::operator()(Index n) const {
  Complex v = rule_(n);
  Index seen = range_->next.load(std::memory_order_relaxed);
  while (n + 1 > seen && !range_->next.compare_exchange_weak(seen, n + 1, std::memory_order_relaxed)) {
  }
  return v;
}

std::optional<Index> DualSequence::computed_range() const noexcept {
  const Index next = range_->next.load(std::memory_order_relaxed);
  if (next == 0) return std::nullopt;
  return next - 1;
}

std::string DualSequence::describe_tail() const {
  if (auto* z = std::get_if<ZeroTail>(&tail_)) return "zero:" + std::to_string(z->from);
  if (auto* c = std::get_if<ClosedForm>(&tail_)) return "closed:" + rule::print(*c->expr);
  return "none";
}

// ---------------------------------------------------------------- pairing and actions

Complex pair(const DualSequence& phi, const L1Element& a) {
  Complex s{};
  const auto& c = a.coeffs();
  for (std::size_t n = 0; n < c.size(); ++n)
    if (c[n] != Complex{}) s += phi(n) * c[n];
  return s;
}

DualSequence act_on_dual(const L1Element& a, const DualSequence& psi) {
  auto rule = [a, psi](Index n) {
    Complex s{};
    const auto& c = a.coeffs();
    for (std::size_t k = 0; k < c.size(); ++k)
      if (c[k] != Complex{}) s += c[k] * psi(n + k);
    return s;
  };

  if (auto* z = std::get_if<DualSequence::ZeroTail>(&psi.tail())) return DualSequence(rule, *z);

  if (auto* cf = std::get_if<DualSequence::ClosedForm>(&psi.tail())) {
    const auto& c = a.coeffs();
    const bool real = std::all_of(c.begin(), c.end(), [](Complex x) { return x.imag() == 0.0; });
    if (real) {
      if (a.is_zero()) return DualSequence::zero();
      rule::ExprPtr sum;
      for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k] == Complex{}) continue;
        rule::ExprPtr term = rule::shift(cf->expr, static_cast<std::int64_t>(k));
        if (c[k].real() != 1.0) term = rule::binary(rule::Op::Mul, rule::literal(c[k].real()), term);
        sum = sum ? rule::binary(rule::Op::Add, sum, term) : term;
      }
      return DualSequence(rule, sum);
    }
  }
  return DualSequence(rule, DualSequence::Undeclared{});
}

double sup_norm_probe(const DualSequence& phi, Index last) {
  double m = 0.0;
  for (Index n = 0;; ++n) {
    m = std::max(m, std::abs(phi(n)));
    if (n == last) break;
  }
  return m;
}

}  // namespace l1d
