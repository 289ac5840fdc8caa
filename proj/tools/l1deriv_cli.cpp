// l1deriv command-line front end. Links only the C interface.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "l1deriv.h"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct Freer {
  void operator()(char* s) const { l1d_string_free(s); }
};
using OwnedString = std::unique_ptr<char, Freer>;

struct RuleDeleter {
  void operator()(l1d_rule* r) const { l1d_rule_free(r); }
};
struct DerivationDeleter {
  void operator()(l1d_derivation* d) const { l1d_derivation_free(d); }
};
struct CheeseDeleter {
  void operator()(l1d_cheese* c) const { l1d_cheese_free(c); }
};
struct AlgebraDeleter {
  void operator()(l1d_algebra* a) const { l1d_algebra_free(a); }
};

/// Raised to unwind with a specific exit code after printing a diagnostic.
struct Exit {
  int code;
};

[[noreturn]] void fail(l1d_status s) {
  std::cerr << "l1deriv: " << l1d_status_name(s) << ": " << l1d_last_error() << '\n';
  throw Exit{s == L1D_E_SYNTAX ? kExitUsage : kExitFailed};
}

void check(l1d_status s) {
  if (s != L1D_OK) fail(s);
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "l1deriv: cannot write " << path << '\n';
    throw Exit{kExitUsage};
  }
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "l1deriv: cannot read " << path << '\n';
    throw Exit{kExitUsage};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Options {
  std::vector<std::string> argv;
  std::string out;
  std::string csv;

  // sequences
  std::string phi, mu, tail = "closed";
  std::uint64_t depth = 1000;
  double tol = 1e-9;
  double eps = 0.0;
  std::size_t terms = 4;
  double growth = 1000.0;
  std::uint64_t k = 1;
  std::uint64_t count = 10;
  std::vector<double> f, a, b;

  // cheese
  std::size_t nmax = 12;
  std::size_t grid = 2001;
  std::size_t nhi = 0;
  std::string cheese_in;

  // bimodule
  std::string algebra;
  std::string derivation;
  std::vector<double> a0;
  std::uint64_t seed = 42;
};

int emit(const Options& o, const std::string& command, char* payload_raw) {
  OwnedString payload(payload_raw);
  json body = json::parse(payload.get());
  // the digest covers inputs only; destinations of output files are left out
  std::string joined;
  for (std::size_t i = 0; i < o.argv.size(); ++i) {
    const std::string& s = o.argv[i];
    if (s == "--out" || s == "--csv") {
      ++i;
      continue;
    }
    if (s.rfind("--out=", 0) == 0 || s.rfind("--csv=", 0) == 0) continue;
    joined += s + '\x1f';
  }
  json report;
  report["tool"] = "l1deriv";
  report["version"] = l1d_version();
  report["command"] = command;
  report["argv"] = o.argv;
  report["input_digest"] = "fnv1a64:" + fnv1a_hex(joined);
  report["result"] = body["result"];
  report["certificates"] = body["certificates"];
  report["passed"] = body["passed"];
  report["timestamp"] = utc_timestamp();
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!o.out.empty()) write_file(o.out, text);
  const bool passed = body["passed"].get<bool>();
  if (!passed) {
    for (const auto& c : body["certificates"])
      if (!c["passed"].get<bool>()) std::cerr << "l1deriv: certificate failed: " << c["name"].get<std::string>() << '\n';
  }
  return passed ? kExitOk : kExitFailed;
}

std::unique_ptr<l1d_rule, RuleDeleter> parse_rule(const std::string& text) {
  l1d_rule* r = nullptr;
  const l1d_status s = l1d_rule_parse(text.c_str(), &r);
  if (s == L1D_E_SYNTAX) {
    std::cerr << "l1deriv: " << l1d_last_error() << " in rule '" << text << "'\n";
    throw Exit{kExitUsage};
  }
  check(s);
  return std::unique_ptr<l1d_rule, RuleDeleter>(r);
}

struct TailSpec {
  l1d_tail kind = L1D_TAIL_CLOSED;
  std::uint64_t zero_from = 0;
};

TailSpec parse_tail(const std::string& text) {
  if (text == "closed") return {L1D_TAIL_CLOSED, 0};
  if (text == "decay") return {L1D_TAIL_DECAY, 0};
  if (text == "none") return {L1D_TAIL_NONE, 0};
  if (text.rfind("zero:", 0) == 0) {
    const std::string num = text.substr(5);
    if (!num.empty() && num.find_first_not_of("0123456789") == std::string::npos) {
      try {
        return {L1D_TAIL_ZERO, std::stoull(num)};
      } catch (const std::out_of_range&) {
      }
    }
  }
  std::cerr << "l1deriv: --tail: expected zero:N, closed, decay or none, got '" << text << "'\n";
  throw Exit{kExitUsage};
}

std::unique_ptr<l1d_derivation, DerivationDeleter> make_derivation(const Options& o) {
  if (o.phi.empty() == o.mu.empty()) {
    std::cerr << "l1deriv: exactly one of --phi and --mu is required\n";
    throw Exit{kExitUsage};
  }
  const TailSpec tail = parse_tail(o.tail);
  l1d_derivation* d = nullptr;
  if (!o.phi.empty()) {
    auto r = parse_rule(o.phi);
    check(l1d_derivation_from_phi(r.get(), tail.kind, tail.zero_from, o.depth, &d));
  } else {
    auto r = parse_rule(o.mu);
    check(l1d_derivation_from_mu(r.get(), tail.kind, tail.zero_from, &d));
  }
  return std::unique_ptr<l1d_derivation, DerivationDeleter>(d);
}

std::unique_ptr<l1d_cheese, CheeseDeleter> make_cheese(const Options& o) {
  l1d_cheese* c = nullptr;
  if (!o.cheese_in.empty()) {
    check(l1d_cheese_from_json(read_file(o.cheese_in).c_str(), &c));
  } else {
    check(l1d_cheese_build(o.nmax, &c));
  }
  return std::unique_ptr<l1d_cheese, CheeseDeleter>(c);
}

std::unique_ptr<l1d_algebra, AlgebraDeleter> make_algebra(const std::string& source) {
  l1d_algebra* a = nullptr;
  if (!source.empty() && source[0] == '@') {
    check(l1d_algebra_from_json(read_file(source.substr(1)).c_str(), &a));
  } else {
    check(l1d_algebra_by_name(source.c_str(), &a));
  }
  return std::unique_ptr<l1d_algebra, AlgebraDeleter>(a);
}

void sequence_options(CLI::App* c, Options& o) {
  auto* phi = c->add_option("--phi", o.phi, "rule for phi(t^n) = D(t)(t^n)");
  auto* mu = c->add_option("--mu", o.mu, "rule for mu_n = D(t^n)(1)");
  phi->excludes(mu);
  c->add_option("--tail", o.tail, "tail declaration: zero:N, closed, decay or none")->capture_default_str();
  c->add_option("--depth", o.depth, "probe depth")->capture_default_str()->check(CLI::PositiveNumber);
}

void cheese_options(CLI::App* c, Options& o) {
  c->add_option("--nmax", o.nmax, "number of removed discs")->capture_default_str()->check(CLI::Range(1, 64));
  c->add_option("--grid", o.grid, "points on I = [0, 1/2]")->capture_default_str()->check(CLI::Range(2, 10000000));
  c->add_option("--cheese", o.cheese_in, "read the disc family from a JSON file instead of constructing it");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  for (int i = 1; i < argc; ++i) o.argv.emplace_back(argv[i]);

  CLI::App app{"Derivations on l1(Z+), bimodule transfer and Swiss-cheese certificates", "l1deriv"};
  app.set_version_flag("--version", std::string(l1d_version()));
  app.require_subcommand(1);
  app.add_option("--out", o.out, "also write the JSON report to this file");
  app.fallthrough();

  std::function<int()> action;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, std::function<int()> run) {
    auto* c = parent->add_subcommand(name, help);
    c->callback([&action, run] { action = run; });
    return c;
  };

  auto* conv = leaf(&app, "conv", "convolve two finitely supported elements", [&] {
    char* out = nullptr;
    check(l1d_conv_json(o.a.data(), nullptr, o.a.size(), o.b.data(), nullptr, o.b.size(), &out));
    return emit(o, "conv", out);
  });
  conv->add_option("--a", o.a, "coefficients a_0,a_1,...")->delimiter(',')->required();
  conv->add_option("--b", o.b, "coefficients b_0,b_1,...")->delimiter(',')->required();

  auto* deriv = app.add_subcommand("deriv", "derivations l1(Z+) -> l-infinity");
  deriv->require_subcommand(1);

  auto* dnorm = leaf(deriv, "norm", "operator norm sup |mu_n|", [&] {
    auto d = make_derivation(o);
    char* out = nullptr;
    check(l1d_derivation_norm_json(d.get(), o.depth, &out));
    return emit(o, "deriv norm", out);
  });
  sequence_options(dnorm, o);

  auto* dclass = leaf(deriv, "classify", "compactness verdict", [&] {
    auto d = make_derivation(o);
    char* out = nullptr;
    check(l1d_derivation_classify_json(d.get(), o.tol, o.depth, &out));
    return emit(o, "deriv classify", out);
  });
  sequence_options(dclass, o);
  dclass->add_option("--tol", o.tol, "compactness tolerance")->capture_default_str()->check(CLI::PositiveNumber);

  auto* dapply = leaf(deriv, "apply", "D(f)(t^n) for a polynomial f", [&] {
    auto d = make_derivation(o);
    char* out = nullptr;
    check(l1d_derivation_apply_json(d.get(), o.f.data(), nullptr, o.f.size(), o.count, &out));
    return emit(o, "deriv apply", out);
  });
  sequence_options(dapply, o);
  dapply->add_option("--f", o.f, "coefficients f_0,f_1,...")->delimiter(',')->required();
  dapply->add_option("--count", o.count, "number of values D(f)(t^n), n = 0..count-1")->capture_default_str();

  auto* dtrunc = leaf(deriv, "truncate", "finite-rank truncation D_k and ||D - D_k||", [&] {
    auto d = make_derivation(o);
    char* out = nullptr;
    check(l1d_derivation_truncate_json(d.get(), o.k, &out));
    return emit(o, "deriv truncate", out);
  });
  sequence_options(dtrunc, o);
  dtrunc->add_option("--k", o.k, "keep mu_1..mu_k")->required()->check(CLI::PositiveNumber);

  auto* dwit = leaf(deriv, "witness", "explicit non-compactness witness", [&] {
    auto d = make_derivation(o);
    char* out = nullptr;
    check(l1d_derivation_witness_json(d.get(), o.eps, o.terms, o.growth, &out));
    return emit(o, "deriv witness", out);
  });
  sequence_options(dwit, o);
  dwit->add_option("--eps", o.eps, "epsilon with |mu_n| > epsilon infinitely often")->required();
  dwit->add_option("--terms", o.terms, "number of witness terms")->capture_default_str()->check(CLI::PositiveNumber);
  dwit->add_option("--const", o.growth, "growth constant C")->capture_default_str()->check(CLI::PositiveNumber);

  auto* cheese = app.add_subcommand("cheese", "Swiss-cheese set and derivative bounds");
  cheese->require_subcommand(1);

  auto* cbuild = leaf(cheese, "build", "construct and certify the disc family", [&] {
    auto c = make_cheese(o);
    char* out = nullptr;
    check(l1d_cheese_build_json(c.get(), &out));
    return emit(o, "cheese build", out);
  });
  cheese_options(cbuild, o);

  auto* cverify = leaf(cheese, "verify", "Feinstein bound over a grid of I", [&] {
    auto c = make_cheese(o);
    char* out = nullptr;
    char* csv = nullptr;
    check(l1d_cheese_verify_json(c.get(), o.grid, &out, o.csv.empty() ? nullptr : &csv));
    OwnedString owned(csv);
    if (csv) write_file(o.csv, csv);
    return emit(o, "cheese verify", out);
  });
  cheese_options(cverify, o);
  cverify->add_option("--csv", o.csv, "write x,sum,certified_lt rows");

  auto* cdemo = leaf(cheese, "demo", "non-compactness of f -> f' on I via the probes f_n", [&] {
    auto c = make_cheese(o);
    char* out = nullptr;
    char* csv = nullptr;
    check(l1d_cheese_demo_json(c.get(), o.nhi, o.grid, &out, o.csv.empty() ? nullptr : &csv));
    OwnedString owned(csv);
    if (csv) write_file(o.csv, csv);
    return emit(o, "cheese demo", out);
  });
  cheese_options(cdemo, o);
  cdemo->add_option("--nhi", o.nhi, "probes f_1..f_nhi (default: nmax)");
  cdemo->add_option("--csv", o.csv, "write n,m,M_nm rows");

  auto* bim = app.add_subcommand("bimodule", "finite-dimensional algebras, modules and derivations");
  bim->require_subcommand(1);

  auto* bcheck = leaf(bim, "check", "algebra axioms and, optionally, a catalog derivation", [&] {
    auto a = make_algebra(o.algebra.empty() ? "trunc4" : o.algebra);
    char* out = nullptr;
    check(l1d_bimodule_check_json(a.get(), o.derivation.empty() ? nullptr : o.derivation.c_str(), &out));
    return emit(o, "bimodule check", out);
  });
  bcheck->add_option("--algebra", o.algebra, "zero2, nil1, scalar, trunc<k> or @file.json (default trunc4)");
  bcheck->add_option("--derivation", o.derivation, "ddt, euler or zero");

  auto* brank = leaf(bim, "rank1", "rank-one derivation A -> A* from a0 outside span(A^2)", [&] {
    auto a = make_algebra(o.algebra.empty() ? "zero2" : o.algebra);
    char* out = nullptr;
    check(l1d_bimodule_rank1_json(a.get(), o.a0.data(), nullptr, o.a0.size(), &out));
    return emit(o, "bimodule rank1", out);
  });
  brank->add_option("--algebra", o.algebra, "zero2, nil1, scalar, trunc<k> or @file.json (default zero2)");
  brank->add_option("--a0", o.a0, "coordinates of a0 (default: first basis vector outside span(A^2))")->delimiter(',');

  auto* btrans = leaf(bim, "transfer", "D -> R_lambda o D into A*", [&] {
    auto a = make_algebra(o.algebra.empty() ? "trunc4" : o.algebra);
    char* out = nullptr;
    check(l1d_bimodule_transfer_json(a.get(), o.derivation.empty() ? "ddt" : o.derivation.c_str(), o.seed, &out));
    return emit(o, "bimodule transfer", out);
  });
  btrans->add_option("--algebra", o.algebra, "zero2, nil1, scalar, trunc<k> or @file.json (default trunc4)");
  btrans->add_option("--derivation", o.derivation, "ddt, euler or zero (default ddt)");
  btrans->add_option("--seed", o.seed, "seed for the random part of the search")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "l1deriv: " << e.what() << '\n';
    return kExitFailed;
  }
}
