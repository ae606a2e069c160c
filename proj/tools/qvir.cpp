// qvir: expand series, verify catalogued identities, tabulate W-representation
// convergence. JSON on stdout, diagnostics on stderr.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qvir/qvir.hpp"

using json = nlohmann::ordered_json;
using namespace qvir;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kDegenerate = 3 };

json window_json(const DegreeWindow& w) { return {{"lmax", w.lmax}, {"xmin", w.xmin}, {"xmax", w.xmax}}; }

json params_json(const std::map<std::string, std::string>& m) {
  json j = json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

std::map<std::string, std::string> parse_params(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw UsageError("parameter '" + item + "' is not of the form key=value");
    std::string key = item.substr(0, eq);
    if (out.count(key)) throw UsageError("parameter '" + key + "' given twice");
    out[key] = item.substr(eq + 1);
  }
  return out;
}

std::string decimal(const Rational& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", r.gmp().get_d());
  return buf;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

// expand

struct ExpandArgs {
  std::string function = "psi";
  int lmax = 2;
  std::optional<int> xmin;
  int xmax = 3;
  std::string params;
  std::string format = "json";
};

int run_expand(const ExpandArgs& a) {
  DegreeWindow w{a.lmax, a.xmin.value_or(-a.lmax), a.xmax};
  w.validate();
  auto params = parse_params(a.params);
  Caps caps = uniform_caps(w.lmax, w.xmax);
  BiSeries<Rational> s;
  std::map<std::string, std::string> shown;
  if (a.function == "z" || a.function == "psi") {
    ParamPoint<Rational> p;
    for (const char* k : {"u", "s", "Q", "T1", "T2", "T3", "T4"})
      if (!params.count(k)) throw UsageError(std::string("missing parameter ") + k);
    for (const auto& [k, v] : params) p.set(k, catalog_detail::parse_number(v));
    if (a.function == "psi") {
      if (params.count("phi1") || params.count("phi2")) throw UsageError("psi fixes phi1 and phi2");
      p = p.higgsed();
      s = higgs_psi(p, caps);
    } else {
      s = z_expand(p, caps);
    }
    shown = p.describe(a.function == "z");
  } else if (a.function == "psi_toda" || a.function == "u" || a.function == "v") {
    auto p = catalog_detail::fixed_qtQ(params);
    if (!p) throw UsageError("missing parameters q,t,Q (or u,s,Q)");
    if (a.function == "psi_toda")
      s = solve_toda(w.lmax, w.xmax, TodaParams<Rational>{p->q, p->t, p->Q});
    else
      s = (a.function == "u" ? u_series(w.lmax, *p) : v_series(w.lmax, *p)).restricted(caps);
    shown = catalog_detail::describe_qtQ(*p);
  } else {
    throw UsageError("unknown function '" + a.function + "'");
  }
  auto terms = s.terms(w);
  if (a.format == "text") {
    for (const auto& [dl, dx, c] : terms) std::cout << dl << " " << dx << " " << to_string(c) << "\n";
    return kPass;
  }
  json jt = json::array();
  for (const auto& [dl, dx, c] : terms) jt.push_back({{"dl", dl}, {"dx", dx}, {"coeff", to_string(c)}});
  DegreeWindow cert = s.certified_window(w.lmax, w.xmin);
  cert.xmax = std::min(cert.xmax, w.xmax);
  emit({{"function", a.function},
        {"window", window_json(w)},
        {"params", params_json(shown)},
        {"terms", jt},
        {"certified_window", window_json(cert)}});
  return kPass;
}

// verify

struct VerifyArgs {
  std::string identity;
  std::optional<int> lmax, xmin, xmax, n;
  bool symbolic = false, numeric = false, timing = false;
  std::uint64_t seed = 1;
  int trials = 1;
  std::string params;
  std::string mutate = "none";
};

int run_verify(const VerifyArgs& a) {
  const auto& entry = find_identity(a.identity);
  VerifyOptions o;
  o.lmax = a.lmax;
  o.xmin = a.xmin;
  o.xmax = a.xmax;
  o.n = a.n;
  if (a.symbolic && a.numeric) throw UsageError("--symbolic and --numeric are exclusive");
  if (a.symbolic) o.backend = Backend::Symbolic;
  if (a.numeric) o.backend = Backend::Numeric;
  if (a.trials < 1) throw UsageError("--trials must be positive");
  o.seed = a.seed;
  o.trials = a.trials;
  o.params = parse_params(a.params);
  o.mutation = parse_mutation(a.mutate);
  auto start = std::chrono::steady_clock::now();
  Verdict v = entry.run(o);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json trials = json::array();
  std::optional<DegreeWindow> cert;
  std::string mismatch;
  for (const auto& t : v.trials) {
    json jt = {{"params", params_json(t.params)}, {"verdict", t.pass ? "pass" : "fail"}};
    if (t.certified) {
      jt["certified_window"] = window_json(*t.certified);
      if (!cert)
        cert = *t.certified;
      else
        cert = DegreeWindow{std::min(cert->lmax, t.certified->lmax), cert->xmin,
                            std::min(cert->xmax, t.certified->xmax)};
    }
    if (!t.pass) {
      jt["mismatch"] = t.mismatch;
      if (mismatch.empty()) mismatch = t.mismatch;
    }
    trials.push_back(jt);
  }
  json out = {{"identity", v.identity},
              {"backend", backend_name(v.backend)},
              {"window", window_json(v.window)},
              {"params", v.trials.empty() ? json::object() : params_json(v.trials.front().params)},
              {"verdict", v.pass ? "pass" : "fail"}};
  out["certified_window"] = cert ? window_json(*cert) : json(nullptr);
  if (!mismatch.empty()) out["mismatch"] = mismatch;
  if (o.mutation != Mutation::None) out["mutation"] = mutation_name(o.mutation);
  if (!v.notes.empty()) out["notes"] = v.notes;
  out["trials"] = trials;
  if (a.timing) out["wall_time_s"] = secs;
  emit(out);
  return v.pass ? kPass : kFail;
}

// wrep

struct WrepArgs {
  int max_iterations = 8;
  int lmax = 2;
  std::optional<int> xmin;
  int xmax = 2;
  std::string params = "q=1/3,t=2,Q=2";
};

int run_wrep(const WrepArgs& a) {
  if (a.max_iterations < 0) throw UsageError("--max-iterations must be nonnegative");
  DegreeWindow w{a.lmax, a.xmin.value_or(-a.xmax), a.xmax};
  w.validate();
  auto p = catalog_detail::fixed_qtQ(parse_params(a.params));
  if (!p) throw UsageError("missing parameters q,t,Q");
  auto rep = wrep_convergence(a.max_iterations, w, TodaParams<Rational>{p->q, p->t, p->Q});
  json coeffs = json::array();
  bool monotone = true;
  for (const auto& c : rep.coefficients) {
    json errs = json::array();
    for (std::size_t m = 0; m < c.errors.size(); ++m)
      errs.push_back({{"M", m}, {"error", to_string(c.errors[m])}, {"decimal", decimal(c.errors[m])}});
    monotone = monotone && c.decreasing;
    coeffs.push_back({{"dl", c.dl}, {"dx", c.dx}, {"exact", to_string(c.exact)}, {"decreasing", c.decreasing},
                      {"errors", errs}});
  }
  json out = {{"identity", "wrep24"},
              {"window", window_json(w)},
              {"params", params_json(catalog_detail::describe_qtQ(*p))},
              {"max_iterations", a.max_iterations},
              {"monotone", monotone},
              {"verdict", rep.pass ? "pass" : "fail"},
              {"warnings", rep.warnings},
              {"coefficients", coeffs}};
  if (!rep.failure.empty()) out["failure"] = rep.failure;
  emit(out);
  return kPass;
}

int run_list() {
  json out = json::array();
  for (const auto& e : identity_catalog())
    out.push_back({{"name", e.name},
                   {"default_window", window_json(e.default_window)},
                   {"default_backend", backend_name(e.default_backend)},
                   {"parameters", e.requirements}});
  emit(out);
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated (Lambda, x) series for q-Virasoro wavefunctions and their difference equations"};
  app.require_subcommand(1);

  ExpandArgs ea;
  auto* expand = app.add_subcommand("expand", "Print the coefficients of a series on a window");
  expand->add_option("--function", ea.function, "z | psi | psi_toda | u | v")
      ->check(CLI::IsMember({"z", "psi", "psi_toda", "u", "v"}));
  expand->add_option("--lmax", ea.lmax, "Largest Lambda degree");
  expand->add_option("--xmin", ea.xmin, "Smallest x degree (default -lmax)");
  expand->add_option("--xmax", ea.xmax, "Largest x degree");
  expand->add_option("--params", ea.params, "key=value list, rationals as p/q");
  expand->add_option("--format", ea.format, "json | text")->check(CLI::IsMember({"json", "text"}));

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Check a catalogued identity");
  verify->add_option("--identity", va.identity, "Identity name (see 'list')")->required();
  verify->add_option("--lmax", va.lmax);
  verify->add_option("--xmin", va.xmin);
  verify->add_option("--xmax", va.xmax);
  verify->add_option("--n", va.n, "Identity-specific integer (order, r, k or last M)");
  verify->add_flag("--symbolic", va.symbolic, "Symbolic coefficients");
  verify->add_flag("--numeric", va.numeric, "Exact rational coefficients at numeric points");
  verify->add_option("--seed", va.seed, "Seed for random points");
  verify->add_option("--trials", va.trials, "Number of random points");
  verify->add_option("--params", va.params, "key=value list; replaces random points");
  verify->add_option("--mutate", va.mutate, "Corrupt one formula (testing hook)");
  verify->add_flag("--timing", va.timing, "Report wall time");

  WrepArgs wa;
  auto* wrep = app.add_subcommand("wrep", "Error table of the truncated W-representation against the exact solution");
  wrep->add_option("--max-iterations", wa.max_iterations, "Last M");
  wrep->add_option("--lmax", wa.lmax);
  wrep->add_option("--xmin", wa.xmin);
  wrep->add_option("--xmax", wa.xmax);
  wrep->add_option("--params", wa.params, "q,t,Q (or u,s,Q)");

  auto* list = app.add_subcommand("list", "List catalogued identities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*expand) return run_expand(ea);
    if (*verify) return run_verify(va);
    if (*wrep) return run_wrep(wa);
    if (*list) return run_list();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DegenerateParameterError& e) {
    std::cerr << "degenerate parameters: " << e.what() << "\nhint: pick other values or another --seed\n";
    return kDegenerate;
  } catch (const EvaluationPoleError& e) {
    std::cerr << "degenerate parameters: " << e.what() << "\nhint: pick other values or another --seed\n";
    return kDegenerate;
  } catch (const DomainError& e) {
    std::cerr << "degenerate parameters: " << e.what() << "\nhint: pick other values or another --seed\n";
    return kDegenerate;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
