#include "l1deriv.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "l1deriv/bimodule.hpp"
#include "l1deriv/convolution.hpp"
#include "l1deriv/derivation.hpp"
#include "l1deriv/rule.hpp"
#include "l1deriv/swiss_cheese.hpp"
#include "l1deriv/version.hpp"

using json = nlohmann::ordered_json;

struct l1d_rule {
  l1d::rule::ExprPtr expr;
};
struct l1d_derivation {
  l1d::Derivation d;
};
struct l1d_cheese {
  l1d::cheese::CheeseSet c;
};
struct l1d_algebra {
  l1d::bimod::FiniteAlgebra a;
};

namespace {

using l1d::Complex;
using l1d::Index;
namespace bimod = l1d::bimod;
namespace cheese = l1d::cheese;

thread_local std::string g_last_error;
thread_local std::string g_syntax_expected;
thread_local std::size_t g_syntax_position = 0;

template <class F>
l1d_status guard(F&& f) {
  try {
    g_last_error.clear();
    g_syntax_position = 0;
    g_syntax_expected.clear();
    f();
    return L1D_OK;
  } catch (const l1d::SyntaxError& e) {
    g_last_error = e.what();
    g_syntax_position = e.position();
    for (const auto& s : e.expected()) g_syntax_expected += (g_syntax_expected.empty() ? "" : ",") + s;
    return L1D_E_SYNTAX;
  } catch (const l1d::Error& e) {
    g_last_error = e.what();
    return static_cast<l1d_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return L1D_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return L1D_E_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw l1d::Error(l1d::ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json jnum(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json jcomplex(Complex z) {
  if (z.imag() == 0.0) return jnum(z.real());
  return json::array({jnum(z.real()), jnum(z.imag())});
}

json jopt(const std::optional<double>& v) { return v ? jnum(*v) : json(nullptr); }

json jvector(const bimod::Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(jcomplex(v(i)));
  return a;
}

json jmatrix(const bimod::Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(jcomplex(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

class Report {
 public:
  json result = json::object();

  void certificate(const std::string& name, bool passed, json detail = json::object()) {
    json c;
    c["name"] = name;
    c["passed"] = passed;
    for (auto& [k, v] : detail.items()) c[k] = v;
    certs_.push_back(std::move(c));
    passed_ = passed_ && passed;
  }

  std::string dump() const {
    json out;
    out["result"] = result;
    out["certificates"] = certs_;
    out["passed"] = passed_;
    return out.dump();
  }

 private:
  json certs_ = json::array();
  bool passed_ = true;
};

void emit(char** out, const Report& r) { *out = dup_string(r.dump()); }

std::vector<Complex> coefficients(const double* re, const double* im, std::size_t len) {
  if (len > 0) require(re, "coefficient array");
  std::vector<Complex> c(len);
  for (std::size_t i = 0; i < len; ++i) c[i] = Complex(re[i], im ? im[i] : 0.0);
  return c;
}

l1d::DualSequence sequence_from(const l1d::rule::ExprPtr& e, l1d_tail tail, uint64_t zero_from) {
  auto rule = [e](Index n) { return Complex(l1d::rule::evaluate(*e, static_cast<double>(n)), 0.0); };
  switch (tail) {
    case L1D_TAIL_CLOSED:
      return l1d::DualSequence(e);
    case L1D_TAIL_ZERO:
      return l1d::DualSequence(rule, l1d::DualSequence::ZeroTail{zero_from});
    case L1D_TAIL_NONE:
      return l1d::DualSequence(rule, l1d::DualSequence::Undeclared{});
    case L1D_TAIL_DECAY: {
      l1d::DualSequence s(e);
      const auto& b = s.tail_bound();
      if (!b || b->limit_kind() != l1d::asym::LimitKind::Zero)
        throw l1d::Error(l1d::ErrorCode::TailUnknown,
                         "declared decay of '" + l1d::rule::print(*e) + "' is not confirmed by tail analysis");
      return s;
    }
  }
  throw l1d::Error(l1d::ErrorCode::InvalidArgument, "unknown tail kind");
}

json index_list(const std::vector<Index>& v) {
  json a = json::array();
  for (Index i : v) a.push_back(i);
  return a;
}

bimod::Vector to_vector(const std::vector<Complex>& c) {
  bimod::Vector v(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) v(static_cast<Eigen::Index>(i)) = c[i];
  return v;
}

json geometry_json(const cheese::GeometryReport& g) {
  return json{{"containment_margin", jnum(g.containment_margin)},
              {"disjointness_margin", jnum(g.disjointness_margin)},
              {"avoidance_margin", jnum(g.avoidance_margin)},
              {"radius_exact", g.radius_exact}};
}

void geometry_certificates(Report& r, const cheese::GeometryReport& g) {
  r.certificate("containment", g.containment_margin > 0.0, {{"margin", jnum(g.containment_margin)}});
  r.certificate("disjointness", g.disjointness_margin > 0.0, {{"margin", jnum(g.disjointness_margin)}});
  r.certificate("interval_avoidance", g.avoidance_margin > 0.0, {{"margin", jnum(g.avoidance_margin)}});
  r.certificate("radius_exact", g.radius_exact);
}

json disc_list(const cheese::CheeseSet& c) { return json::parse(cheese::to_json(c)); }

}  // namespace

extern "C" {

const char* l1d_version(void) { return L1DERIV_VERSION_STRING; }

const char* l1d_status_name(l1d_status status) {
  switch (status) {
    case L1D_OK: return "ok";
    case L1D_E_INVALID_ARGUMENT: return "InvalidArgument";
    case L1D_E_SYNTAX: return "SyntaxError";
    case L1D_E_EVALUATION: return "EvaluationError";
    case L1D_E_DEGREE_OVERFLOW: return "DegreeOverflow";
    case L1D_E_UNBOUNDED_DERIVATION: return "UnboundedDerivation";
    case L1D_E_TAIL_UNKNOWN: return "TailUnknown";
    case L1D_E_NO_ADMISSIBLE_INDEX: return "NoAdmissibleIndex";
    case L1D_E_INDEX_OVERFLOW: return "IndexOverflow";
    case L1D_E_INVALID_ALGEBRA: return "InvalidAlgebra";
    case L1D_E_INVALID_MODULE: return "InvalidModule";
    case L1D_E_NOT_OUTSIDE_SQUARE: return "NotOutsideSquare";
    case L1D_E_NOT_SYMMETRIC: return "NotSymmetric";
    case L1D_E_SQUARE_DEFICIENT: return "SquareDeficient";
    case L1D_E_NO_SUCH_ELEMENT: return "NoSuchElement";
    case L1D_E_CONSTRUCTION_FAILED: return "ConstructionFailed";
    case L1D_E_ON_BOUNDARY: return "OnBoundary";
    case L1D_E_POLE_IN_X: return "PoleInX";
    case L1D_E_NULL_ARGUMENT: return "NullArgument";
    case L1D_E_INTERNAL: return "Internal";
  }
  return "unknown";
}

const char* l1d_last_error(void) { return g_last_error.c_str(); }
size_t l1d_last_syntax_position(void) { return g_syntax_position; }
const char* l1d_last_syntax_expected(void) { return g_syntax_expected.c_str(); }
void l1d_string_free(char* s) { std::free(s); }

// ---------------------------------------------------------------- rules

l1d_status l1d_rule_parse(const char* text, l1d_rule** out) {
  if (!text || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] { *out = new l1d_rule{l1d::rule::parse(text)}; });
}

void l1d_rule_free(l1d_rule* rule) { delete rule; }

l1d_status l1d_rule_print(const l1d_rule* rule, char** out) {
  if (!rule || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] { *out = dup_string(l1d::rule::print(*rule->expr)); });
}

l1d_status l1d_rule_dump(const l1d_rule* rule, char** out) {
  if (!rule || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] { *out = dup_string(l1d::rule::dump(*rule->expr)); });
}

l1d_status l1d_rule_eval(const l1d_rule* rule, double n, double* out) {
  if (!rule || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] { *out = l1d::rule::evaluate(*rule->expr, n); });
}

// ---------------------------------------------------------------- convolution

l1d_status l1d_conv_json(const double* a_re, const double* a_im, size_t a_len, const double* b_re, const double* b_im,
                         size_t b_len, char** out) {
  if (!out) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    const l1d::L1Element a(coefficients(a_re, a_im, a_len));
    const l1d::L1Element b(coefficients(b_re, b_im, b_len));
    const l1d::L1Element ab = l1d::convolve(a, b);
    Report r;
    json coeffs = json::array();
    for (Complex c : ab.coeffs()) coeffs.push_back(jcomplex(c));
    const double na = l1d::l1_norm(a), nb = l1d::l1_norm(b), nab = l1d::l1_norm(ab);
    r.result["product"] = coeffs;
    r.result["norm_a"] = jnum(na);
    r.result["norm_b"] = jnum(nb);
    r.result["norm_product"] = jnum(nab);
    r.result["exact"] = a.gaussian_integral() && b.gaussian_integral();
    r.certificate("submultiplicative", nab <= na * nb * (1.0 + 1e-12),
                  {{"lhs", jnum(nab)}, {"rhs", jnum(na * nb)}});
    emit(out, r);
  });
}

// ---------------------------------------------------------------- derivations

l1d_status l1d_derivation_from_phi(const l1d_rule* phi, l1d_tail tail, uint64_t zero_from, uint64_t depth,
                                   l1d_derivation** out) {
  if (!phi || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    *out = new l1d_derivation{l1d::Derivation::from_phi(sequence_from(phi->expr, tail, zero_from), depth)};
  });
}

l1d_status l1d_derivation_from_mu(const l1d_rule* mu, l1d_tail tail, uint64_t zero_from, l1d_derivation** out) {
  if (!mu || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] { *out = new l1d_derivation{l1d::Derivation::from_mu(sequence_from(mu->expr, tail, zero_from))}; });
}

void l1d_derivation_free(l1d_derivation* d) { delete d; }

l1d_status l1d_derivation_mu(const l1d_derivation* d, uint64_t n, double* re, double* im) {
  if (!d || !re) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    const Complex v = n == 0 ? Complex{} : d->d.mu()(n);
    *re = v.real();
    if (im) *im = v.imag();
  });
}

l1d_status l1d_derivation_evaluate(const l1d_derivation* d, uint64_t k, uint64_t l, double* re, double* im) {
  if (!d || !re) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    const Complex v = d->d.evaluate(k, l);
    *re = v.real();
    if (im) *im = v.imag();
  });
}

l1d_status l1d_derivation_norm_json(const l1d_derivation* d, uint64_t depth, char** out) {
  if (!d || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    const l1d::NormBound nb = l1d::norm(d->d, depth);
    Report r;
    r.result["norm"] = jopt(nb.exact);
    r.result["lower"] = jnum(nb.lower);
    r.result["upper"] = jopt(nb.upper);
    r.result["exact"] = nb.exact.has_value();
    r.result["attained_at"] = nb.attained_at;
    r.result["depth"] = nb.depth;
    r.result["tail"] = d->d.mu().describe_tail();
    const double again = std::abs(d->d.mu()(nb.attained_at));
    r.certificate("attained", again == nb.lower, {{"index", nb.attained_at}, {"value", jnum(again)}});
    if (nb.exact && nb.upper)
      r.certificate("tail_bound", *nb.upper <= *nb.exact * (1.0 + 1e-14),
                    {{"upper", jnum(*nb.upper)}, {"norm", jnum(*nb.exact)}});
    emit(out, r);
  });
}

l1d_status l1d_derivation_classify_json(const l1d_derivation* d, double tol, uint64_t depth, char** out) {
  if (!d || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    const l1d::CompactnessVerdict v = l1d::classify_compact(d->d, tol, depth);
    Report r;
    r.result["verdict"] = l1d::to_string(v.verdict);
    r.result["tolerance"] = jnum(tol);
    r.result["depth"] = depth;
    json ev;
    if (auto* c = std::get_if<l1d::CompactEvidence>(&v.evidence)) {
      ev = {{"onset", c->onset}, {"tolerance", jnum(c->tolerance)}, {"tail_upper", jnum(c->tail_upper)},
            {"tail", c->tail}, {"sample", index_list(c->sample)}};
    } else if (auto* n = std::get_if<l1d::NonCompactEvidence>(&v.evidence)) {
      ev = {{"epsilon", jnum(n->epsilon)}, {"onset", n->onset}, {"tail", n->tail}, {"indices", index_list(n->indices)}};
    } else {
      ev = {{"reason", std::get<l1d::InconclusiveEvidence>(v.evidence).reason}};
    }
    r.result["evidence"] = ev;
    r.certificate("recheck", l1d::recheck(d->d, v));
    emit(out, r);
  });
}

l1d_status l1d_derivation_truncate_json(const l1d_derivation* d, uint64_t k, char** out) {
  if (!d || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    const l1d::Truncation t = l1d::finite_rank_truncate(d->d, k);
    Report r;
    r.result["k"] = k;
    r.result["error"] = jnum(t.error);
    r.result["exact"] = t.exact;
    r.result["error_upper"] = jopt(t.error_upper);
    r.result["rank"] = k;
    bool agrees = true;
    for (Index n = 1; n <= k + 16; ++n) {
      const Complex want = n <= k ? d->d.mu()(n) : Complex{};
      agrees = agrees && t.truncated.mu()(n) == want;
    }
    r.certificate("truncated_coefficients", agrees, {{"checked_through", k + 16}});
    if (t.exact) {
      bool attained = t.error == 0.0;
      for (Index n = k + 1; !attained && n <= k + (Index{1} << 20); ++n) attained = std::abs(d->d.mu()(n)) == t.error;
      r.certificate("error_attained", attained, {{"error", jnum(t.error)}});
    }
    emit(out, r);
  });
}

l1d_status l1d_derivation_witness_json(const l1d_derivation* d, double eps, size_t terms, double growth, char** out) {
  if (!d || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    const l1d::WitnessReport w = l1d::noncompact_witness(d->d, eps, terms, growth);
    Report r;
    r.result["epsilon"] = jnum(w.epsilon);
    r.result["growth_constant"] = jnum(w.growth_constant);
    r.result["terms"] = w.j.size();
    r.result["admissible"] = index_list(w.admissible);
    r.result["j"] = index_list(w.j);
    r.result["l"] = index_list(w.l);
    json diag = json::array();
    for (double v : w.diagonal) diag.push_back(jnum(v));
    r.result["diagonal"] = diag;
    json gaps = json::array();
    for (const auto& g : w.gaps) gaps.push_back({{"i", g.earlier + 1}, {"k", g.later + 1}, {"gap", jnum(g.gap)}});
    r.result["gaps"] = gaps;
    r.result["separation"] = std::isfinite(w.separation) ? json(w.separation) : json(nullptr);
    r.result["complete"] = w.complete;
    bool diag_ok = true, gaps_ok = true;
    for (double v : w.diagonal) diag_ok = diag_ok && v > eps / 3.0;
    for (const auto& g : w.gaps) gaps_ok = gaps_ok && g.gap > eps / 4.0;
    r.certificate("diagonal", diag_ok, {{"threshold", jnum(eps / 3.0)}});
    r.certificate("gaps", gaps_ok, {{"threshold", jnum(eps / 4.0)}, {"pairs", w.gaps.size()}});
    r.certificate("revalidate", l1d::revalidate(d->d, w));
    emit(out, r);
  });
}

l1d_status l1d_derivation_apply_json(const l1d_derivation* d, const double* f_re, const double* f_im, size_t f_len,
                                     uint64_t count, char** out) {
  if (!d || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    const l1d::L1Element f(coefficients(f_re, f_im, f_len));
    const l1d::DualSequence df = l1d::apply(d->d, f);
    Report r;
    json values = json::array();
    bool finite = true;
    for (Index n = 0; n < count; ++n) {
      const Complex v = df(n);
      finite = finite && std::isfinite(v.real()) && std::isfinite(v.imag());
      values.push_back(jcomplex(v));
    }
    r.result["values"] = values;
    r.result["tail"] = df.describe_tail();
    // D(f)(t^n) summed directly from D(t^k)(t^n) = k phi(t^{k+n-1})
    bool agrees = true;
    for (Index n = 0; n < std::min<Index>(count, 8); ++n) {
      Complex direct{};
      for (std::size_t k = 0; k < f.support(); ++k) direct += f[k] * d->d.evaluate(k, n);
      agrees = agrees && std::abs(direct - df(n)) <= 1e-12 * std::max(1.0, std::abs(direct));
    }
    r.certificate("finite", finite);
    r.certificate("monomial_expansion", agrees);
    emit(out, r);
  });
}

// ---------------------------------------------------------------- Swiss cheese

l1d_status l1d_cheese_build(size_t n_max, l1d_cheese** out) {
  if (!out) return L1D_E_NULL_ARGUMENT;
  return guard([&] { *out = new l1d_cheese{cheese::build_cheese(n_max)}; });
}

l1d_status l1d_cheese_from_json(const char* text, l1d_cheese** out) {
  if (!text || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] { *out = new l1d_cheese{cheese::cheese_from_json(text)}; });
}

void l1d_cheese_free(l1d_cheese* c) { delete c; }

l1d_status l1d_cheese_json(const l1d_cheese* c, char** out) {
  if (!c || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] { *out = dup_string(cheese::to_json(c->c)); });
}

l1d_status l1d_cheese_feinstein(const l1d_cheese* c, double re, double im, double* value, double* certified_lt) {
  if (!c || !value) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    const cheese::FeinsteinValue v = cheese::feinstein_sum(c->c, Complex(re, im));
    *value = v.value;
    if (certified_lt) *certified_lt = v.certified_lt;
  });
}

l1d_status l1d_cheese_build_json(const l1d_cheese* c, char** out) {
  if (!c || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    const cheese::GeometryReport g = cheese::certify_geometry(c->c);
    Report r;
    r.result["cheese"] = disc_list(c->c);
    r.result["geometry"] = geometry_json(g);
    geometry_certificates(r, g);
    emit(out, r);
  });
}

l1d_status l1d_cheese_verify_json(const l1d_cheese* c, size_t grid, char** out, char** csv) {
  if (!c || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    const cheese::GeometryReport g = cheese::certify_geometry(c->c);
    const cheese::SweepReport s = cheese::verify(c->c, grid);
    Report r;
    r.result["n_max"] = c->c.n_max;
    r.result["grid"] = grid;
    r.result["points"] = s.rows.size();
    r.result["max_certified"] = jnum(s.max_certified);
    r.result["argmax"] = jnum(s.argmax);
    r.result["bound"] = jnum(s.bound);
    json terms = json::array();
    for (const auto& t : s.terms)
      terms.push_back({{"n", t.n},
                       {"bound", jnum(t.bound)},
                       {"off_interval_max", jnum(t.off_interval_max)},
                       {"on_interval_max", jnum(t.on_interval_max)},
                       {"on_interval_limit", jnum(t.near_limit)},
                       {"on_interval_points", t.on_interval_points},
                       {"points_above_bound", t.literal_violations}});
    r.result["terms"] = terms;
    r.result["geometry"] = geometry_json(g);
    geometry_certificates(r, g);
    r.certificate("feinstein_bound", s.max_certified < s.bound,
                  {{"max_certified", jnum(s.max_certified)}, {"bound", jnum(s.bound)}});
    bool off_ok = true, on_ok = true;
    for (const auto& t : s.terms) {
      off_ok = off_ok && t.off_interval_max < t.bound + 1e-12;
      on_ok = on_ok && t.on_interval_max < 2.0;
    }
    r.certificate("per_term_off_interval", off_ok, {{"slack", 1e-12}});
    r.certificate("per_term_on_interval", on_ok, {{"bound", 2.0}});
    emit(out, r);
    if (csv) {
      std::ostringstream os;
      os.precision(17);
      os << "x,sum,certified_lt\n";
      for (const auto& row : s.rows) os << row.x << ',' << row.sum << ',' << row.certified_lt << '\n';
      *csv = dup_string(os.str());
    }
  });
}

l1d_status l1d_cheese_demo_json(const l1d_cheese* c, size_t n_hi, size_t grid, char** out, char** csv) {
  if (!c || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    const std::size_t hi = n_hi == 0 ? c->c.n_max : n_hi;
    const cheese::NoncompactReport nc = cheese::noncompact_report(c->c, hi, grid);
    const cheese::DerivativeBoundReport db =
        cheese::derivative_bound_check(c->c, cheese::probe_function(c->c, 1), grid);
    Report r;
    r.result["n_hi"] = hi;
    r.result["grid"] = grid;
    json m = json::array(), sep = json::array();
    for (std::size_t i = 0; i < hi; ++i) {
      json row = json::array(), srow = json::array();
      for (std::size_t j = 0; j < hi; ++j) {
        row.push_back(jnum(nc.m[i][j]));
        srow.push_back(jnum(nc.separation[i][j]));
      }
      m.push_back(std::move(row));
      sep.push_back(std::move(srow));
    }
    r.result["M"] = m;
    r.result["separation"] = sep;
    r.result["diagonal_defect"] = jnum(nc.diagonal_defect);
    r.result["min_separation"] = jnum(nc.min_separation);
    r.result["floor"] = jnum(nc.floor);
    r.result["derivative_bound"] = {{"function", "f_1"},
                                    {"max_derivative", jnum(db.max_derivative)},
                                    {"argmax", jnum(db.argmax)},
                                    {"sup_estimate", jnum(db.sup_estimate)},
                                    {"ratio", jnum(db.ratio)},
                                    {"constant", jnum(db.constant)}};
    r.certificate("diagonal", nc.diagonal_defect <= 1e-12, {{"defect", jnum(nc.diagonal_defect)}});
    r.certificate("separation", nc.min_separation >= 0.7, {{"min", jnum(nc.min_separation)}, {"bound", 0.7}});
    r.certificate("separation_floor", nc.floor >= 0.75, {{"floor", jnum(nc.floor)}, {"bound", 0.75}});
    r.certificate("derivative_bound", db.passed,
                  {{"ratio", jnum(db.ratio)}, {"constant", jnum(db.constant)}, {"tolerance", db.tolerance}});
    emit(out, r);
    if (csv) {
      std::ostringstream os;
      os.precision(17);
      os << "n,m,M_nm\n";
      for (std::size_t i = 0; i < hi; ++i)
        for (std::size_t j = 0; j < hi; ++j) os << i + 1 << ',' << j + 1 << ',' << nc.m[i][j] << '\n';
      *csv = dup_string(os.str());
    }
  });
}

// ---------------------------------------------------------------- bimodules

l1d_status l1d_algebra_by_name(const char* name, l1d_algebra** out) {
  if (!name || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] { *out = new l1d_algebra{bimod::algebra_by_name(name)}; });
}

l1d_status l1d_algebra_from_json(const char* text, l1d_algebra** out) {
  if (!text || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] { *out = new l1d_algebra{bimod::algebra_from_json(text)}; });
}

void l1d_algebra_free(l1d_algebra* a) { delete a; }

size_t l1d_algebra_dim(const l1d_algebra* a) { return a ? a->a.dim() : 0; }

l1d_status l1d_bimodule_check_json(const l1d_algebra* alg, const char* derivation, char** out) {
  if (!alg || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    const bimod::FiniteAlgebra& a = alg->a;
    Report r;
    const double comm = a.commutativity_defect(), assoc = a.associativity_defect();
    const std::size_t sq = static_cast<std::size_t>(bimod::square_span(a).cols());
    r.result["algebra"] = {{"name", a.name()},
                           {"dim", a.dim()},
                           {"commutativity_defect", jnum(comm)},
                           {"associativity_defect", jnum(assoc)},
                           {"square_rank", sq}};
    r.certificate("commutative", comm == 0.0, {{"defect", jnum(comm)}});
    r.certificate("associative", assoc <= 1e-12, {{"defect", jnum(assoc)}});
    const bimod::FiniteBimodule star = bimod::algebra_dual(a);
    const double star_defect = bimod::bimodule_defect(a, star);
    r.certificate("dual_module", star_defect <= 1e-12, {{"defect", jnum(star_defect)}});
    if (derivation) {
      const bimod::CatalogDerivation cd = bimod::derivation_by_name(a, derivation);
      const double mod = bimod::bimodule_defect(a, cd.module);
      const double der = bimod::derivation_defect(a, cd.module, cd.matrix);
      const bimod::InnerFit fit = bimod::is_inner(a, cd.module, cd.matrix);
      r.result["derivation"] = {{"name", derivation},
                                {"description", cd.description},
                                {"module", cd.module.name},
                                {"module_dim", cd.module.dim},
                                {"matrix", jmatrix(cd.matrix)},
                                {"rank", bimod::numerical_rank(cd.matrix)},
                                {"norm", jnum(bimod::operator_norm(cd.matrix, bimod::NormKind::L1, cd.module.norm))},
                                {"bimodule_defect", jnum(mod)},
                                {"derivation_defect", jnum(der)},
                                {"inner", fit.solution.has_value()},
                                {"inner_residual", jnum(fit.residual)}};
      r.certificate("module_axioms", mod <= 1e-12, {{"defect", jnum(mod)}});
      r.certificate("derivation_identity", der <= 1e-10, {{"defect", jnum(der)}});
    }
    emit(out, r);
  });
}

l1d_status l1d_bimodule_rank1_json(const l1d_algebra* alg, const double* a0_re, const double* a0_im, size_t len,
                                   char** out) {
  if (!alg || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    const bimod::FiniteAlgebra& a = alg->a;
    bimod::Vector a0;
    if (len == 0) {
      const bimod::Matrix b = bimod::square_span(a);
      for (std::size_t i = 0; i < a.dim() && a0.size() == 0; ++i) {
        bimod::Vector e = bimod::Vector::Zero(static_cast<Eigen::Index>(a.dim()));
        e(static_cast<Eigen::Index>(i)) = 1.0;
        if ((e - b * (b.adjoint() * e)).norm() > bimod::kRankThreshold) a0 = e;
      }
      if (a0.size() == 0)
        throw l1d::Error(l1d::ErrorCode::NotOutsideSquare, "every basis vector lies in span(A^2)");
    } else {
      if (len != a.dim()) throw l1d::Error(l1d::ErrorCode::InvalidArgument, "a0 must have dim(A) coordinates");
      a0 = to_vector(coefficients(a0_re, a0_im, len));
    }
    const bimod::RankOneDerivation rd = bimod::rank_one_derivation(a, a0);
    const bimod::FiniteBimodule star = bimod::algebra_dual(a);
    const bimod::Matrix& dm = rd.derivation.matrix;
    const double defect = bimod::derivation_defect(a, star, dm);
    const std::size_t rank = bimod::numerical_rank(dm);
    const Complex pairing = (dm * a0).transpose() * a0;
    const bimod::InnerFit fit = bimod::is_inner(a, star, dm);
    const bimod::Matrix rest = dm - bimod::inner_derivation(star, fit.best);
    const double probe = std::abs(Complex((rest * a0).transpose() * a0));
    bool integral = a.gaussian_integral();
    for (Eigen::Index i = 0; i < a0.size(); ++i)
      integral = integral && std::nearbyint(a0(i).real()) == a0(i).real() && a0(i).imag() == 0.0;
    Report r;
    r.result["algebra"] = a.name();
    r.result["a0"] = jvector(a0);
    r.result["lambda0"] = jvector(rd.lambda0);
    r.result["matrix"] = jmatrix(dm);
    r.result["source"] = bimod::to_string(rd.derivation.source);
    r.result["target"] = bimod::to_string(rd.derivation.target);
    r.result["rank"] = rank;
    r.result["derivation_defect"] = jnum(defect);
    r.result["exact_mode"] = integral;
    r.result["pairing"] = jcomplex(pairing);
    r.result["inner"] = fit.solution.has_value();
    r.result["inner_residual"] = jnum(fit.residual);
    r.result["probe_residual"] = jnum(probe);
    r.certificate("rank_one", rank == 1, {{"rank", rank}});
    r.certificate("derivation_identity", integral ? defect == 0.0 : defect <= 1e-12, {{"defect", jnum(defect)}});
    r.certificate("pairing", std::abs(pairing - 1.0) <= 1e-12, {{"value", jcomplex(pairing)}});
    r.certificate("not_inner", std::abs(probe - 1.0) <= 1e-12, {{"probe_residual", jnum(probe)}});
    emit(out, r);
  });
}

l1d_status l1d_bimodule_transfer_json(const l1d_algebra* alg, const char* derivation, uint64_t seed, char** out) {
  if (!alg || !out) return L1D_E_NULL_ARGUMENT;
  return guard([&] {
    const bimod::FiniteAlgebra& a = alg->a;
    const bimod::CatalogDerivation cd = bimod::derivation_by_name(a, derivation ? derivation : "ddt");
    const bimod::TransferReport t = bimod::run_transfer(a, cd.module, cd.matrix, seed);
    Report r;
    r.result["algebra"] = a.name();
    r.result["derivation"] = cd.description;
    r.result["module"] = cd.module.name;
    r.result["a0"] = jvector(t.a0);
    r.result["lambda"] = jvector(t.lambda);
    r.result["transferred"] = jmatrix(t.transferred.matrix);
    r.result["derivation_defect"] = jnum(t.derivation_defect);
    r.result["homomorphism_defect"] = jnum(t.homomorphism_defect);
    r.result["pairing"] = jcomplex(t.pairing);
    r.result["rank_source"] = t.rank_source;
    r.result["rank_transferred"] = t.rank_transferred;
    r.result["norm_source"] = jnum(t.norm_source);
    r.result["norm_r"] = jnum(t.norm_r);
    r.result["norm_transferred"] = jnum(t.norm_transferred);
    r.result["seed"] = seed;
    r.certificate("derivation_identity", t.derivation_defect < 1e-10, {{"defect", jnum(t.derivation_defect)}});
    r.certificate("module_map", t.homomorphism_defect < 1e-10, {{"defect", jnum(t.homomorphism_defect)}});
    r.certificate("pairing", std::abs(t.pairing - 1.0) <= 1e-12, {{"value", jcomplex(t.pairing)}});
    r.certificate("rank", t.rank_transferred <= t.rank_source,
                  {{"rank_source", t.rank_source}, {"rank_transferred", t.rank_transferred}});
    r.certificate("norm", t.norm_transferred <= t.norm_r * t.norm_source * (1.0 + 1e-12),
                  {{"lhs", jnum(t.norm_transferred)}, {"rhs", jnum(t.norm_r * t.norm_source)}});
    emit(out, r);
  });
}

}  // extern "C"
