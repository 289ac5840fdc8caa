#pragma once

// Bounded derivations D : l1(Z+) -> l-infinity, identified with the
// sequence mu_n = D(t^n)(1). D(t) = phi with mu_n = n phi(t^{n-1}), and
// D(t^k)(t^l) = k phi(t^{k+l-1}) = k/(k+l) mu_{k+l}; ||D|| = sup_n |mu_n|.

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "l1deriv/convolution.hpp"

namespace l1d {

struct NormBound {
  double lower = 0.0;            // max_{1<=n<=depth} |mu_n|
  std::optional<double> exact;   // set when the tail certifies the supremum
  std::optional<double> upper;   // certified upper bound, when one is available
  Index attained_at = 0;         // an index where `lower` is attained
  Index depth = 0;
};

class Derivation;

NormBound norm(const Derivation& d, Index probe_depth);

class Derivation {
 public:
  /// D with D(t) = phi. Throws UnboundedDerivation when the tail of
  /// n phi(t^{n-1}) is certified to grow without bound.
  static Derivation from_phi(DualSequence phi, Index probe_depth);
  /// D with D(t^n)(1) = mu(n) for n >= 1; mu(0) is ignored (D(1) = 0).
  static Derivation from_mu(DualSequence mu);

  const DualSequence& mu() const noexcept { return mu_; }
  const DualSequence& phi() const noexcept { return phi_; }

  /// D(t^k)(t^l)
  Complex evaluate(Index k, Index l) const;

  std::optional<double> cached_norm() const noexcept;

 private:
  friend NormBound norm(const Derivation&, Index);

  struct Cache {
    std::atomic<double> norm{-1.0};
  };

  Derivation(DualSequence mu, DualSequence phi) : mu_(std::move(mu)), phi_(std::move(phi)) {}
  void store_norm(double value) const noexcept { cache_->norm.store(value, std::memory_order_relaxed); }

  DualSequence mu_;
  DualSequence phi_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

/// D(f) as an element of l-infinity: n -> sum_k k a_k phi(t^{k+n-1}).
DualSequence apply(const Derivation& d, const L1Element& f);

enum class Verdict { Compact, NonCompact, Inconclusive };

std::string to_string(Verdict v);

struct CompactEvidence {
  Index onset = 0;                 // |mu_n| < tolerance for all n >= onset
  double tolerance = 0.0;
  double tail_upper = 0.0;         // certified sup_{n>=onset} |mu_n|
  std::string tail;                // the tail declaration that certifies it
  std::vector<Index> sample;       // indices to re-check
};

struct NonCompactEvidence {
  double epsilon = 0.0;            // |mu_n| >= epsilon for all n >= onset
  Index onset = 0;
  std::string tail;
  std::vector<Index> indices;      // indices to re-check
};

struct InconclusiveEvidence {
  std::string reason;
};

struct CompactnessVerdict {
  Verdict verdict = Verdict::Inconclusive;
  std::variant<CompactEvidence, NonCompactEvidence, InconclusiveEvidence> evidence;
};

CompactnessVerdict classify_compact(const Derivation& d, double tol, Index probe_depth);

/// Re-evaluates mu at the indices a verdict cites.
bool recheck(const Derivation& d, const CompactnessVerdict& v);

struct Truncation {
  Derivation truncated;            // mu'_n = mu_n for n <= k, 0 beyond
  double error = 0.0;              // sup_{n>k} |mu_n| = ||D - D_k||
  bool exact = false;              // false: `error` is a lower bound and `error_upper` bounds it above
  std::optional<double> error_upper;
};

Truncation finite_rank_truncate(const Derivation& d, Index k);

struct PairGap {
  std::size_t earlier = 0;  // i
  std::size_t later = 0;    // k, with i < k
  double gap = 0.0;         // |D(t^{j_i})(t^{l_k}) - D(t^{j_k})(t^{l_k})|
};

struct WitnessReport {
  double epsilon = 0.0;
  double growth_constant = 1000.0;
  std::vector<Index> admissible;   // N_k, with |mu_{N_k}| > epsilon
  std::vector<Index> j;            // j_k = N_k - l_k, strictly increasing
  std::vector<Index> l;            // l_k = floor(N_k / 2)
  std::vector<double> diagonal;    // |D(t^{j_k})(t^{l_k})|
  std::vector<PairGap> gaps;
  double separation = 0.0;         // min over gaps; lower bound on ||D(t^{j_i}) - D(t^{j_k})||
  bool verified = false;           // every diagonal > eps/3 and every gap > eps/4
  bool complete = true;
};

class IndexOverflowError : public Error {
 public:
  IndexOverflowError(const std::string& what, WitnessReport partial)
      : Error(ErrorCode::IndexOverflow, what), partial_(std::move(partial)) {}
  const WitnessReport& partial() const noexcept { return partial_; }

 private:
  WitnessReport partial_;
};

WitnessReport noncompact_witness(const Derivation& d, double epsilon, std::size_t max_terms,
                                 double growth_constant = 1000.0);

/// Recomputes every probe of a report; true when all of them still pass.
bool revalidate(const Derivation& d, const WitnessReport& report);

}  // namespace l1d
