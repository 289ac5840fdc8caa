#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "l1deriv/asymptotics.hpp"
#include "l1deriv/error.hpp"
#include "l1deriv/rule.hpp"

namespace l1d {

/// Finitely supported element sum_n a_n t^n of l1(Z+). Trailing zeros are trimmed.
class L1Element {
 public:
  static constexpr std::size_t kMaxDegree = std::size_t{1} << 16;

  L1Element() = default;
  explicit L1Element(std::vector<Complex> coeffs);

  static L1Element monomial(Index k, Complex c = 1.0);

  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  Complex operator[](Index n) const noexcept { return n < coeffs_.size() ? coeffs_[n] : Complex{}; }
  /// Number of stored coefficients (degree + 1, or 0 for the zero element).
  std::size_t support() const noexcept { return coeffs_.size(); }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  /// True when every coefficient is a Gaussian integer small enough for exact int64 products.
  bool gaussian_integral() const noexcept;

  friend bool operator==(const L1Element&, const L1Element&) = default;

 private:
  std::vector<Complex> coeffs_;
};

/// An element of l-infinity = A*, given by its values phi(t^n), together
/// with what is known about its tail.
class DualSequence {
 public:
  using Rule = std::function<Complex(Index)>;

  /// rule(n) = 0 for all n >= from; enforced by the sequence itself.
  struct ZeroTail {
    Index from = 0;
  };
  /// rule is the (real) closed-form expression; tail certificates come from analysing it.
  struct ClosedForm {
    rule::ExprPtr expr;
  };
  struct Undeclared {};
  using Tail = std::variant<ZeroTail, ClosedForm, Undeclared>;

  DualSequence(Rule rule, ZeroTail tail);
  DualSequence(Rule rule, Undeclared tail = {});
  /// A closed form evaluated through its expression.
  explicit DualSequence(rule::ExprPtr expr);
  /// A closed form whose evaluation is supplied separately; `rule` must agree with `expr`.
  DualSequence(Rule rule, rule::ExprPtr expr);

  static DualSequence zero();
  /// values[n] for n < size, zero beyond; tail is ZeroTail(size) when `zero_tail`, else Undeclared.
  static DualSequence table(std::vector<Complex> values, bool zero_tail);

  Complex operator()(Index n) const;

  const Tail& tail() const noexcept { return tail_; }
  /// Tail analysis of a closed form, when it falls in the analysable class.
  const std::optional<asym::TailBound>& tail_bound() const noexcept { return *bound_; }
  /// Largest index evaluated so far, or nullopt before the first evaluation.
  std::optional<Index> computed_range() const noexcept;

  std::string describe_tail() const;

 private:
  struct Range {
    std::atomic<Index> next{0};  // one past the largest evaluated index
  };

  Rule rule_;
  Tail tail_;
  std::shared_ptr<const std::optional<asym::TailBound>> bound_;
  std::shared_ptr<Range> range_ = std::make_shared<Range>();
};

L1Element convolve(const L1Element& a, const L1Element& b);

double l1_norm(const L1Element& a);

/// sum_n phi(t^n) a_n
Complex pair(const DualSequence& phi, const L1Element& a);

/// The module action (a . psi)(t^n) = psi(t^n a); left and right actions coincide.
DualSequence act_on_dual(const L1Element& a, const DualSequence& psi);

/// max_{0 <= n <= last} |phi(t^n)|
double sup_norm_probe(const DualSequence& phi, Index last);

}  // namespace l1d
