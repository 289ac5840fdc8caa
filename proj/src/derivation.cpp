#include "l1deriv/derivation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace l1d {

namespace {

constexpr Index kExtendedScan = Index{1} << 20;
constexpr double kSlack = 1e-14;

using ZeroTail = DualSequence::ZeroTail;
using ClosedForm = DualSequence::ClosedForm;

const asym::TailBound* closed_bound(const DualSequence& s) {
  if (!std::holds_alternative<ClosedForm>(s.tail())) return nullptr;
  const auto& b = s.tail_bound();
  return b ? &*b : nullptr;
}

bool unbounded(const DualSequence& mu) {
  const auto* tb = closed_bound(mu);
  return tb && tb->limit_kind() == asym::LimitKind::Infinite;
}

}  // namespace

// ---------------------------------------------------------------- construction

Derivation Derivation::from_phi(DualSequence phi, Index probe_depth) {
  DualSequence::Rule rule = [phi](Index n) {
    return n == 0 ? Complex{} : static_cast<double>(n) * phi(n - 1);
  };
  std::optional<DualSequence> mu;
  if (auto* z = std::get_if<ZeroTail>(&phi.tail())) {
    mu.emplace(rule, ZeroTail{z->from + 1});
  } else if (auto* c = std::get_if<ClosedForm>(&phi.tail())) {
    mu.emplace(rule, rule::binary(rule::Op::Mul, rule::variable(), rule::shift(c->expr, -1)));
  } else {
    mu.emplace(rule, DualSequence::Undeclared{});
  }
  if (unbounded(*mu))
    throw Error(ErrorCode::UnboundedDerivation,
                "n phi(t^(n-1)) is certified to grow without bound; no bounded derivation has D(t) = phi");

  Derivation d(std::move(*mu), std::move(phi));
  const NormBound nb = norm(d, std::max<Index>(probe_depth, 1));
  if (!std::isfinite(nb.lower))
    throw Error(ErrorCode::UnboundedDerivation, "n phi(t^(n-1)) is not finite at n = " + std::to_string(nb.attained_at));
  return d;
}

Derivation Derivation::from_mu(DualSequence mu) {
  DualSequence::Rule mu_rule = [mu](Index n) { return n == 0 ? Complex{} : mu(n); };
  DualSequence::Rule phi_rule = [mu](Index n) { return mu(n + 1) / static_cast<double>(n + 1); };

  if (auto* z = std::get_if<ZeroTail>(&mu.tail())) {
    const Index from = z->from;
    return Derivation(DualSequence(mu_rule, ZeroTail{from}), DualSequence(phi_rule, ZeroTail{from > 0 ? from - 1 : 0}));
  }
  if (auto* c = std::get_if<ClosedForm>(&mu.tail())) {
    auto phi_expr = rule::binary(rule::Op::Div, rule::shift(c->expr, 1),
                                 rule::binary(rule::Op::Add, rule::variable(), rule::literal(1.0)));
    return Derivation(DualSequence(mu_rule, c->expr), DualSequence(phi_rule, phi_expr));
  }
  return Derivation(DualSequence(mu_rule), DualSequence(phi_rule));
}

Complex Derivation::evaluate(Index k, Index l) const {
  if (k == 0) return {};
  return static_cast<double>(k) * phi_(k + l - 1);
}

std::optional<double> Derivation::cached_norm() const noexcept {
  const double v = cache_->norm.load(std::memory_order_relaxed);
  if (v < 0.0) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------- norm

NormBound norm(const Derivation& d, Index probe_depth) {
  if (probe_depth < 1) throw Error(ErrorCode::InvalidArgument, "probe depth must be at least 1");
  NormBound nb;
  nb.depth = probe_depth;
  nb.attained_at = 1;
  for (Index n = 1; n <= probe_depth; ++n) {
    const double v = std::abs(d.mu()(n));
    if (v > nb.lower || std::isnan(v)) {
      nb.lower = v;
      nb.attained_at = n;
    }
  }

  if (auto* z = std::get_if<ZeroTail>(&d.mu().tail())) {
    if (z->from <= probe_depth + 1) {
      nb.exact = nb.lower;
      nb.upper = nb.lower;
    }
  } else if (const auto* tb = closed_bound(d.mu())) {
    if (tb->limit_kind() == asym::LimitKind::Infinite) {
      nb.upper = std::numeric_limits<double>::infinity();
    } else {
      double seen = nb.lower;
      Index next = probe_depth + 1;
      bool covered = true;
      if (tb->valid_from() > next) {
        if (tb->valid_from() - next > kExtendedScan) {
          covered = false;
        } else {
          for (; next < tb->valid_from(); ++next) seen = std::max(seen, std::abs(d.mu()(next)));
        }
      }
      if (covered) {
        const double tail = tb->upper(next);
        nb.upper = std::max(seen, tail);
        if (tail <= seen * (1.0 + kSlack)) nb.exact = seen;
      }
    }
  }
  if (nb.exact) d.store_norm(*nb.exact);
  return nb;
}

// ---------------------------------------------------------------- apply

DualSequence apply(const Derivation& d, const L1Element& f) {
  const DualSequence& phi = d.phi();
  auto rule = [f, phi](Index n) {
    Complex s{};
    const auto& c = f.coeffs();
    for (std::size_t k = 1; k < c.size(); ++k)
      if (c[k] != Complex{}) s += static_cast<double>(k) * c[k] * phi(k + n - 1);
    return s;
  };
  if (f.support() <= 1) return DualSequence::zero();
  if (auto* z = std::get_if<ZeroTail>(&phi.tail())) return DualSequence(rule, *z);
  if (auto* cf = std::get_if<ClosedForm>(&phi.tail())) {
    const auto& c = f.coeffs();
    if (std::all_of(c.begin(), c.end(), [](Complex x) { return x.imag() == 0.0; })) {
      rule::ExprPtr sum;
      for (std::size_t k = 1; k < c.size(); ++k) {
        if (c[k] == Complex{}) continue;
        const double w = static_cast<double>(k) * c[k].real();
        rule::ExprPtr term = rule::shift(cf->expr, static_cast<std::int64_t>(k) - 1);
        if (w != 1.0) term = rule::binary(rule::Op::Mul, rule::literal(w), term);
        sum = sum ? rule::binary(rule::Op::Add, sum, term) : term;
      }
      if (!sum) return DualSequence::zero();
      return DualSequence(rule, sum);
    }
  }
  return DualSequence(rule, DualSequence::Undeclared{});
}

// ---------------------------------------------------------------- compactness

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Compact:
      return "Compact";
    case Verdict::NonCompact:
      return "NonCompact";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

namespace {

CompactnessVerdict inconclusive(std::string reason) {
  return {Verdict::Inconclusive, InconclusiveEvidence{std::move(reason)}};
}

std::vector<Index> run_of(Index from, std::size_t count) {
  std::vector<Index> v;
  for (std::size_t i = 0; i < count && from + i < kIndexCap; ++i) v.push_back(from + i);
  return v;
}

}  // namespace

CompactnessVerdict classify_compact(const Derivation& d, double tol, Index probe_depth) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const DualSequence& mu = d.mu();

  if (auto* z = std::get_if<ZeroTail>(&mu.tail())) {
    CompactEvidence ev{z->from, tol, 0.0, mu.describe_tail(), run_of(std::max<Index>(z->from, 1), 8)};
    return {Verdict::Compact, ev};
  }
  if (std::holds_alternative<DualSequence::Undeclared>(mu.tail()))
    return inconclusive("tail undeclared: a finite probe cannot decide membership in c0");

  const auto* tb = closed_bound(mu);
  if (!tb) return inconclusive("closed form outside the analysable class");

  switch (tb->limit_kind()) {
    case asym::LimitKind::Infinite:
      return inconclusive("derivation is unbounded");
    case asym::LimitKind::Unknown:
      return inconclusive("dominant part of the closed form oscillates; limit not certified");
    case asym::LimitKind::Zero: {
      // upper() is non-increasing past valid_from: double, then bisect.
      Index hi = std::max<Index>(tb->valid_from(), 1);
      while (tb->upper(hi) >= tol) {
        if (hi >= kIndexCap / 2) return inconclusive("decay below tolerance not certified before index 2^62");
        hi *= 2;
      }
      Index lo = std::max<Index>(tb->valid_from(), 1);
      if (lo < hi) {
        // invariant: upper(hi) < tol; search least such index in [lo, hi]
        while (lo < hi) {
          Index mid = lo + (hi - lo) / 2;
          if (tb->upper(mid) < tol)
            hi = mid;
          else
            lo = mid + 1;
        }
      }
      CompactEvidence ev{hi, tol, tb->upper(hi), mu.describe_tail(), run_of(hi, 8)};
      return {Verdict::Compact, ev};
    }
    case asym::LimitKind::Finite: {
      Index n = std::max<Index>(tb->valid_from(), 1);
      auto lower = tb->lower(n);
      while (!lower || *lower < tb->limit() / 2) {
        if (n >= kIndexCap / 2 || !lower) return inconclusive("positive limit not certified from below");
        n *= 2;
        lower = tb->lower(n);
      }
      NonCompactEvidence ev{*lower, n, mu.describe_tail(), {}};
      for (Index m = 1; m <= probe_depth && ev.indices.size() < 8; ++m)
        if (std::abs(mu(m)) >= ev.epsilon) ev.indices.push_back(m);
      for (Index m : run_of(n, 8))
        if (std::find(ev.indices.begin(), ev.indices.end(), m) == ev.indices.end()) ev.indices.push_back(m);
      return {Verdict::NonCompact, ev};
    }
  }
  return inconclusive("unreachable");
}

bool recheck(const Derivation& d, const CompactnessVerdict& v) {
  if (auto* c = std::get_if<CompactEvidence>(&v.evidence))
    return std::all_of(c->sample.begin(), c->sample.end(),
                       [&](Index n) { return std::abs(d.mu()(n)) < c->tolerance; });
  if (auto* nc = std::get_if<NonCompactEvidence>(&v.evidence))
    return std::all_of(nc->indices.begin(), nc->indices.end(),
                       [&](Index n) { return std::abs(d.mu()(n)) >= nc->epsilon; });
  return true;
}

// ---------------------------------------------------------------- truncation

Truncation finite_rank_truncate(const Derivation& d, Index k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "truncation index must be at least 1");
  const DualSequence& mu = d.mu();
  DualSequence kept([mu, k](Index n) { return n <= k ? mu(n) : Complex{}; }, ZeroTail{k + 1});
  Truncation t{Derivation::from_mu(std::move(kept)), 0.0, false, std::nullopt};

  if (auto* z = std::get_if<ZeroTail>(&mu.tail())) {
    for (Index n = k + 1; n < z->from; ++n) t.error = std::max(t.error, std::abs(mu(n)));
    t.exact = true;
    t.error_upper = t.error;
    return t;
  }
  const auto* tb = closed_bound(mu);
  if (!tb) throw Error(ErrorCode::TailUnknown, "truncation error needs a declared tail (" + mu.describe_tail() + ")");
  if (tb->limit_kind() == asym::LimitKind::Infinite)
    throw Error(ErrorCode::UnboundedDerivation, "derivation is unbounded; truncation error is infinite");

  double seen = 0.0;
  Index n = k + 1;
  for (Index steps = 0; steps < kExtendedScan; ++steps, ++n) {
    seen = std::max(seen, std::abs(mu(n)));
    if (n + 1 >= tb->valid_from()) {
      const double tail = tb->upper(n + 1);
      if (tail <= seen * (1.0 + kSlack)) {
        t.error = seen;
        t.exact = true;
        t.error_upper = seen;
        return t;
      }
      t.error_upper = std::max(seen, tail);
    }
  }
  t.error = seen;
  if (tb->limit_kind() == asym::LimitKind::Finite) t.error = std::max(seen, tb->limit());
  return t;
}

// ---------------------------------------------------------------- witness

namespace {

std::optional<Index> find_admissible(const Derivation& d, Index start, double epsilon) {
  if (auto* z = std::get_if<ZeroTail>(&d.mu().tail()))
    if (start >= z->from) return std::nullopt;
  auto admissible = [&](Index n) { return std::abs(d.mu()(n)) > epsilon; };
  for (Index off = 0; off < 64; ++off) {
    if (start + off >= kIndexCap) return std::nullopt;
    if (admissible(start + off)) return start + off;
  }
  for (Index off = 64; start + off < kIndexCap; off *= 2)
    if (admissible(start + off)) return start + off;
  return std::nullopt;
}

void verify(const Derivation& d, WitnessReport& r) {
  r.diagonal.clear();
  r.gaps.clear();
  r.verified = true;
  r.separation = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < r.j.size(); ++k) {
    const Complex diag = d.evaluate(r.j[k], r.l[k]);
    r.diagonal.push_back(std::abs(diag));
    if (!(r.diagonal.back() > r.epsilon / 3.0)) r.verified = false;
    for (std::size_t i = 0; i < k; ++i) {
      const double gap = std::abs(d.evaluate(r.j[i], r.l[k]) - diag);
      r.gaps.push_back(PairGap{i, k, gap});
      r.separation = std::min(r.separation, gap);
      if (!(gap > r.epsilon / 4.0)) r.verified = false;
    }
  }
}

}  // namespace

WitnessReport noncompact_witness(const Derivation& d, double epsilon, std::size_t max_terms, double growth_constant) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (!(growth_constant > 0.0)) throw Error(ErrorCode::InvalidArgument, "growth constant must be positive");
  if (max_terms < 1) throw Error(ErrorCode::InvalidArgument, "at least one term is required");

  WitnessReport r;
  r.epsilon = epsilon;
  r.growth_constant = growth_constant;
  double previous = 1.0;  // j_0
  for (std::size_t step = 0; step < max_terms; ++step) {
    const double bound = growth_constant / epsilon * previous;
    if (!(bound < static_cast<double>(kIndexCap))) {
      r.complete = false;
      verify(d, r);
      throw IndexOverflowError("witness index would exceed 2^62 at term " + std::to_string(step + 1), r);
    }
    const Index start = static_cast<Index>(std::floor(bound)) + 1;
    auto admissible = find_admissible(d, start, epsilon);
    if (!admissible)
      throw Error(ErrorCode::NoAdmissibleIndex, "no index N >= " + std::to_string(start) + " with |mu_N| > " +
                                                    rule::format_literal(epsilon) + " (" + d.mu().describe_tail() + ")");
    const Index N = *admissible;
    const Index l = N / 2;
    r.admissible.push_back(N);
    r.l.push_back(l);
    r.j.push_back(N - l);
    previous = static_cast<double>(N - l);
  }
  verify(d, r);
  return r;
}

bool revalidate(const Derivation& d, const WitnessReport& report) {
  if (report.j.size() != report.l.size()) return false;
  for (std::size_t k = 1; k < report.j.size(); ++k)
    if (report.j[k] <= report.j[k - 1]) return false;
  WitnessReport again = report;
  verify(d, again);
  return again.verified;
}

}  // namespace l1d
