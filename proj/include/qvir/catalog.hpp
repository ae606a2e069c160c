#pragma once

// Named identity checks with default windows and backends, shared by the
// command-line tool and the acceptance runner.

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qvir/macdonald.hpp"

namespace qvir {

enum class Backend { Numeric, Symbolic };

inline std::string backend_name(Backend b) { return b == Backend::Numeric ? "numeric" : "symbolic"; }

struct VerifyOptions {
  std::optional<int> lmax, xmin, xmax;
  std::optional<int> n;
  std::optional<Backend> backend;
  std::map<std::string, std::string> params;
  std::uint64_t seed = 1;
  int trials = 1;
  int threads = 0;
  Mutation mutation = Mutation::None;
};

struct TrialResult {
  std::map<std::string, std::string> params;
  bool pass = false;
  std::optional<DegreeWindow> certified;
  std::string mismatch;
};

struct Verdict {
  std::string identity;
  Backend backend = Backend::Numeric;
  DegreeWindow window;
  bool pass = true;
  std::vector<TrialResult> trials;
  std::vector<std::string> notes;

  void add(TrialResult t) {
    pass = pass && t.pass;
    trials.push_back(std::move(t));
  }
};

struct CatalogEntry {
  std::string name;
  DegreeWindow default_window;
  Backend default_backend;
  std::string requirements;
  std::function<Verdict(const VerifyOptions&)> run;
};

namespace catalog_detail {

constexpr int kRetries = 8;

inline Rational parse_number(const std::string& text) { return field_cast<Rational>(parse_expression(text)); }

template <class F>
TrialResult from_report(const IdentityReport<F>& rep, std::map<std::string, std::string> params) {
  TrialResult t;
  t.params = std::move(params);
  t.pass = rep.pass;
  t.certified = rep.certified;
  if (!rep.pass) t.mismatch = rep.describe();
  return t;
}

inline DegreeWindow window_of(const VerifyOptions& o, const DegreeWindow& def) {
  DegreeWindow w{o.lmax.value_or(def.lmax), o.xmin.value_or(def.xmin), o.xmax.value_or(def.xmax)};
  if (o.lmax && !o.xmin) w.xmin = -w.lmax;
  w.validate();
  return w;
}

/// (q, t, Q) from q/t/Q or u/s/Q parameters; absent means "draw at random".
inline std::optional<MacParams<Rational>> fixed_qtQ(const std::map<std::string, std::string>& params) {
  if (params.empty()) return std::nullopt;
  std::map<std::string, Rational> v;
  for (const auto& [k, s] : params) {
    if (k != "q" && k != "t" && k != "u" && k != "s" && k != "Q") throw UsageError("unknown parameter '" + k + "'");
    v[k] = parse_number(s);
  }
  auto pick = [&](const char* direct, const char* root) -> Rational {
    if (v.count(direct)) return v[direct];
    if (v.count(root)) return v[root] * v[root];
    throw UsageError(std::string("missing parameter ") + direct + " (or " + root + ")");
  };
  if (!v.count("Q")) throw UsageError("missing parameter Q");
  return MacParams<Rational>{pick("q", "u"), pick("t", "s"), v["Q"]};
}

inline std::map<std::string, std::string> describe_qtQ(const MacParams<Rational>& p) {
  return {{"q", to_string(p.q)}, {"t", to_string(p.t)}, {"Q", to_string(p.Q)}};
}

inline MacParams<Rational> random_qtQ(std::mt19937_64& rng) {
  Rational u = random_rational(rng), s = random_rational(rng);
  return {u * u, s * s, random_rational(rng)};
}

inline ParamPoint<Rational> fixed_point(const std::map<std::string, std::string>& params) {
  ParamPoint<Rational> p;
  for (const char* k : {"u", "s", "Q", "T1", "T2", "T3", "T4"})
    if (!params.count(k)) throw UsageError(std::string("missing parameter ") + k);
  for (const auto& [k, s] : params) p.set(k, parse_number(s));
  return p;
}

/// Runs `body` at fixed parameters once, or at `trials` seeded random points,
/// redrawing a point up to kRetries times when it is degenerate.
template <class P>
void numeric_trials(Verdict& v, const VerifyOptions& o, const std::function<std::optional<P>()>& fixed,
                    const std::function<P(std::mt19937_64&)>& draw, const std::function<TrialResult(const P&)>& body) {
  if (auto p = fixed()) {
    v.add(body(*p));
    return;
  }
  std::mt19937_64 rng(o.seed);
  for (int trial = 0; trial < o.trials; ++trial) {
    for (int attempt = 0;; ++attempt) {
      P p = draw(rng);
      try {
        v.add(body(p));
        break;
      } catch (const DegenerateParameterError&) {
        if (attempt + 1 >= kRetries) throw;
      } catch (const EvaluationPoleError& e) {
        if (attempt + 1 >= kRetries) throw DegenerateParameterError(e.what());
      } catch (const DomainError& e) {
        if (attempt + 1 >= kRetries) throw DegenerateParameterError(e.what());
      }
    }
  }
}

struct SymTable {
  TablePtr table = SymbolTable::make({"u", "s", "Q", "z"});
  RationalFunction sym(const char* n, int power = 1) const { return RationalFunction::symbol(table, n, power); }
  MacParams<RationalFunction> qtQ() const { return {sym("u", 2), sym("s", 2), sym("Q")}; }
};

inline std::map<std::string, std::string> symbolic_params() { return {{"q", "u^2"}, {"t", "s^2"}, {"Q", "Q"}}; }

/// Runs a (q, t, Q)-parametrized check on the requested backend.
template <class Body>
Verdict qtQ_check(const std::string& name, const VerifyOptions& o, Backend def_backend, const DegreeWindow& w,
                  Body body) {
  Verdict v;
  v.identity = name;
  v.backend = o.backend.value_or(def_backend);
  v.window = w;
  if (v.backend == Backend::Symbolic) {
    if (!o.params.empty()) throw UsageError("--params is not used with the symbolic backend");
    SymTable s;
    v.add(body(s.qtQ(), symbolic_params()));
    return v;
  }
  numeric_trials<MacParams<Rational>>(
      v, o, [&] { return fixed_qtQ(o.params); }, random_qtQ,
      [&](const MacParams<Rational>& p) { return body(p, describe_qtQ(p)); });
  return v;
}

template <class F>
TodaParams<F> toda(const MacParams<F>& p) {
  return {p.q, p.t, p.Q};
}

struct Theorem20 {
  template <class F>
  TrialResult operator()(const ParamPoint<F>& p, const DegreeWindow& w, const VerifyOptions& o) const {
    return from_report(verify_theorem20(w, p, o.mutation, o.threads), p.describe(false));
  }
};

template <class F>
TrialResult toda_equation(const MacParams<F>& mp, const DegreeWindow& w, std::map<std::string, std::string> params) {
  auto p = toda(mp);
  auto s = solve_toda(w.lmax, w.xmax, p);
  auto lhs = s.rescaled(p.t, F(1));
  auto rhs = toda_H_apply(s, w, p);
  IdentityReport<F> rep;
  rep.requested = rep.certified = w;
  rep.residual = series_equal(lhs, rhs, w);
  rep.pass = rep.residual.equal;
  return from_report(rep, std::move(params));
}

template <class F>
TrialResult commutator(const MacParams<F>& mp, const DegreeWindow& w, const VerifyOptions& o,
                       std::map<std::string, std::string> params) {
  auto rep = commutator_check(w, toda(mp), o.mutation, o.threads);
  TrialResult t;
  t.params = std::move(params);
  t.pass = rep.pass;
  t.certified = rep.output;
  t.mismatch = rep.failure;
  return t;
}

inline std::vector<int> n_range(const VerifyOptions& o, int lo, int hi) {
  if (o.n) return {*o.n};
  std::vector<int> r;
  for (int k = lo; k <= hi; ++k) r.push_back(k);
  return r;
}

template <class F>
TrialResult qbinomial(const F& q, const F& y, const DegreeWindow& w, std::map<std::string, std::string> params) {
  TrialResult t;
  t.params = std::move(params);
  t.pass = true;
  t.certified = w;
  for (MonomialArg<F> x : {MonomialArg<F>{F(1), 0, 1}, MonomialArg<F>{F(1), 1, -1}, MonomialArg<F>{F(1), 1, 0}}) {
    auto r = qbinomial_residual(x, y, q, uniform_caps(w.lmax, w.xmax));
    auto eq = series_equal(r, BiSeries<F>::zero(uniform_caps(w.lmax, w.xmax)), w);
    if (!eq.equal) {
      t.pass = false;
      t.mismatch = "argument Lambda^" + std::to_string(x.dl) + " x^" + std::to_string(x.dx) + ": " + eq.describe();
      break;
    }
  }
  return t;
}

template <class F>
TrialResult phi_functional(const F& q, const DegreeWindow& w, std::map<std::string, std::string> params) {
  TrialResult t;
  t.params = std::move(params);
  t.pass = true;
  t.certified = w;
  Caps caps = uniform_caps(w.lmax, w.xmax);
  for (MonomialArg<F> x : {MonomialArg<F>{F(1), 0, 1}, MonomialArg<F>{F(1), 1, -1}, MonomialArg<F>{F(1), 1, 0}}) {
    // phi(x) = (1 - x) phi(q x)
    auto lhs = phi_expand(x, q, caps);
    auto one_minus = BiSeries<F>::one() - BiSeries<F>::monomial(x.coeff, x.dl, x.dx);
    auto rhs = BiSeries<F>::multiply(one_minus, phi_expand(x.scaled(q), q, caps), &caps);
    auto eq = series_equal(lhs, rhs, w);
    if (!eq.equal) {
      t.pass = false;
      t.mismatch = "argument Lambda^" + std::to_string(x.dl) + " x^" + std::to_string(x.dx) + ": " + eq.describe();
      break;
    }
  }
  return t;
}

}  // namespace catalog_detail

inline const std::vector<CatalogEntry>& identity_catalog() {
  using namespace catalog_detail;
  using R = RationalFunction;
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> e;

    e.push_back({"theorem20", {3, -3, 4}, Backend::Numeric,
                 "numeric: u,s,Q,T1..T4 or seeded random points; symbolic: special point in u,s,Q",
                 [](const VerifyOptions& o) {
                   Verdict v;
                   v.identity = "theorem20";
                   v.backend = o.backend.value_or(Backend::Numeric);
                   if (v.backend == Backend::Symbolic) {
                     v.window = window_of(o, {1, -2, 3});
                     if (!o.params.empty()) throw UsageError("--params is not used with the symbolic backend");
                     SymTable s;
                     auto p = ParamPoint<R>::special(s.sym("u"), s.sym("s"), s.sym("Q"));
                     v.add(Theorem20{}(p, v.window, o));
                     v.notes.push_back("special point T1 = T4 = v/t, T2 = T3 = 1/v");
                     return v;
                   }
                   v.window = window_of(o, {3, -3, 4});
                   numeric_trials<ParamPoint<Rational>>(
                       v, o,
                       [&]() -> std::optional<ParamPoint<Rational>> {
                         if (o.params.empty()) return std::nullopt;
                         return fixed_point(o.params);
                       },
                       [](std::mt19937_64& rng) { return random_point(rng); },
                       [&](const ParamPoint<Rational>& p) { return Theorem20{}(p, v.window, o); });
                   return v;
                 }});

    e.push_back({"toda21", {3, -3, 3}, Backend::Numeric, "q,t,Q (or u,s,Q)", [](const VerifyOptions& o) {
                   auto w = window_of(o, {3, -3, 3});
                   return qtQ_check("toda21", o, Backend::Numeric, w,
                                    [&](const auto& p, auto params) { return toda_equation(p, w, params); });
                 }});

    e.push_back({"commutator22", {2, -3, 3}, Backend::Symbolic, "q,t,Q (or u,s,Q)", [](const VerifyOptions& o) {
                   auto w = window_of(o, {2, -3, 3});
                   return qtQ_check("commutator22", o, Backend::Symbolic, w,
                                    [&](const auto& p, auto params) { return commutator(p, w, o, params); });
                 }});

    e.push_back({"wrep24", {2, -2, 2}, Backend::Numeric, "q,t,Q with |q| < 1 < |t|; --n sets the last M",
                 [](const VerifyOptions& o) {
                   Verdict v;
                   v.identity = "wrep24";
                   v.backend = Backend::Numeric;
                   if (o.backend == Backend::Symbolic) throw UsageError("wrep24 is numeric only");
                   v.window = window_of(o, {2, -2, 2});
                   auto p = fixed_qtQ(o.params).value_or(MacParams<Rational>{Rational(1, 3), Rational(2), Rational(2)});
                   auto rep = wrep_convergence(o.n.value_or(8), v.window, toda(p));
                   TrialResult t;
                   t.params = describe_qtQ(p);
                   t.pass = rep.pass;
                   t.certified = v.window;
                   t.mismatch = rep.failure;
                   v.add(t);
                   v.notes = rep.warnings;
                   return v;
                 }});

    e.push_back({"macdonald_recurrence", {2, -2, 4}, Backend::Symbolic, "q,t,Q (or u,s,Q)",
                 [](const VerifyOptions& o) {
                   auto w = window_of(o, {2, -2, 4});
                   return qtQ_check("macdonald_recurrence", o, Backend::Symbolic, w, [&](const auto& p, auto params) {
                     return from_report(verify_macdonald_recurrence(w.lmax, p, o.mutation), params);
                   });
                 }});

    e.push_back({"macdonald_solution", {4, -4, 0}, Backend::Symbolic, "q,t (or u,s); --n selects r, default 0..4",
                 [](const VerifyOptions& o) {
                   auto w = window_of(o, {4, -4, 0});
                   auto rs = n_range(o, 0, 4);
                   auto opts = o;
                   if (!opts.params.count("Q") && !opts.params.empty()) opts.params["Q"] = "1";
                   return qtQ_check("macdonald_solution", opts, Backend::Symbolic, w, [&](const auto& p, auto params) {
                     params.erase("Q");
                     TrialResult t;
                     t.params = params;
                     t.pass = true;
                     for (int r : rs) {
                       auto rep = verify_macdonald_solution(r, w.lmax, p.q, p.t, o.mutation);
                       t.certified = rep.certified;
                       if (!rep.pass) {
                         t.pass = false;
                         t.mismatch = "r=" + std::to_string(r) + ": " + rep.describe();
                         break;
                       }
                     }
                     return t;
                   });
                 }});

    for (int half : {1, 2}) {
      std::string name = "halves_v" + std::to_string(half);
      e.push_back({name, {2, -2, 2}, Backend::Symbolic, "q,t,Q (or u,s,Q)", [half, name](const VerifyOptions& o) {
                     auto w = window_of(o, {2, -2, 2});
                     return qtQ_check(name, o, Backend::Symbolic, w, [&](const auto& p, auto params) {
                       auto reps = verify_halves(w, p, o.mutation);
                       return from_report(half == 1 ? reps.first : reps.second, params);
                     });
                   }});
    }

    e.push_back({"genfunc", {2, -2, 2}, Backend::Symbolic, "symbolic only; --n sets the z order (default 3)",
                 [](const VerifyOptions& o) {
                   Verdict v;
                   v.identity = "genfunc";
                   v.backend = Backend::Symbolic;
                   if (o.backend == Backend::Numeric) throw UsageError("genfunc is symbolic only");
                   v.window = window_of(o, {2, -2, 2});
                   SymTable s;
                   auto p = s.qtQ();
                   v.add(from_report(verify_genfunc(o.n.value_or(3), v.window, p.q, p.t, s.sym("z"), o.mutation),
                                     {{"q", "u^2"}, {"t", "s^2"}, {"zmax", std::to_string(o.n.value_or(3))}}));
                   return v;
                 }});

    e.push_back({"qseries", {3, -3, 0}, Backend::Symbolic, "symbolic only", [](const VerifyOptions& o) {
                   Verdict v;
                   v.identity = "qseries";
                   v.backend = Backend::Symbolic;
                   if (o.backend == Backend::Numeric) throw UsageError("qseries is symbolic only");
                   v.window = window_of(o, {3, -3, 0});
                   SymTable s;
                   auto p = s.qtQ();
                   auto [rep, lhs] = verify_qseries_identity(v.window.lmax, p.q, p.t, s.sym("z"), o.mutation);
                   auto t = from_report(rep, {{"q", "u^2"}, {"t", "s^2"}});
                   // Lambda^1 coefficient (1-t)(t-x)(tz-q)/(x t^2 (1-q))
                   const R &q = p.q, &tt = p.t, z = s.sym("z");
                   R c = (R(1) - tt) * (tt * z - q) / (tt * tt * (R(1) - q));
                   if (v.window.lmax >= 1 && (lhs.extract(1, -1) != c * tt || lhs.extract(1, 0) != -c)) {
                     t.pass = false;
                     t.mismatch = "Lambda^1 coefficient differs from the closed form";
                   }
                   v.add(t);
                   return v;
                 }});

    e.push_back({"qsaalschutz", {0, 0, 0}, Backend::Symbolic, "symbolic in q,a,b,c; --n selects n, default 0..5",
                 [](const VerifyOptions& o) {
                   Verdict v;
                   v.identity = "qsaalschutz";
                   v.backend = Backend::Symbolic;
                   if (o.backend == Backend::Numeric) throw UsageError("qsaalschutz is symbolic only");
                   v.window = {0, 0, 0};
                   auto tab = SymbolTable::make({"q", "a", "b", "c"});
                   auto sym = [&](const char* n) { return R::symbol(tab, n); };
                   for (int n : n_range(o, 0, 5)) {
                     TrialResult t;
                     t.params = {{"n", std::to_string(n)}};
                     t.pass = verify_qsaalschutz(n, sym("q"), sym("a"), sym("b"), sym("c"), o.mutation);
                     if (!t.pass) t.mismatch = "sum and product differ";
                     v.add(t);
                   }
                   return v;
                 }});

    e.push_back({"formula_gamma", {2, -3, 3}, Backend::Symbolic, "q,t (or u,s); --n selects k, default -2..2",
                 [](const VerifyOptions& o) {
                   auto w = window_of(o, {2, -3, 3});
                   auto ks = n_range(o, -2, 2);
                   auto opts = o;
                   if (!opts.params.count("Q") && !opts.params.empty()) opts.params["Q"] = "1";
                   return qtQ_check("formula_gamma", opts, Backend::Symbolic, w, [&](const auto& p, auto params) {
                     params.erase("Q");
                     TrialResult t;
                     t.params = params;
                     t.pass = true;
                     t.certified = w;
                     for (int k : ks) {
                       auto rep = verify_formula_gamma(k, w, p.q, p.t, o.mutation);
                       if (!rep.pass) {
                         t.pass = false;
                         t.mismatch = "k=" + std::to_string(k) + ": " + rep.describe();
                         break;
                       }
                     }
                     return t;
                   });
                 }});

    e.push_back({"qbinomial", {2, -3, 4}, Backend::Symbolic, "symbolic in u,y (q = u^2); numeric q,y",
                 [](const VerifyOptions& o) {
                   Verdict v;
                   v.identity = "qbinomial";
                   v.backend = o.backend.value_or(Backend::Symbolic);
                   v.window = window_of(o, {2, -3, 4});
                   if (v.backend == Backend::Symbolic) {
                     auto tab = SymbolTable::make({"u", "y"});
                     v.add(qbinomial(R::symbol(tab, "u", 2), R::symbol(tab, "y"), v.window,
                                     {{"q", "u^2"}, {"y", "y"}}));
                     return v;
                   }
                   for (const auto& [k, s] : o.params)
                     if (k != "q" && k != "y") throw UsageError("unknown parameter '" + k + "'");
                   numeric_trials<std::pair<Rational, Rational>>(
                       v, o,
                       [&]() -> std::optional<std::pair<Rational, Rational>> {
                         if (o.params.empty()) return std::nullopt;
                         if (!o.params.count("q") || !o.params.count("y")) throw UsageError("need q and y");
                         return std::pair{parse_number(o.params.at("q")), parse_number(o.params.at("y"))};
                       },
                       [](std::mt19937_64& rng) { return std::pair{random_rational(rng), random_rational(rng)}; },
                       [&](const std::pair<Rational, Rational>& p) {
                         return qbinomial(p.first, p.second, v.window,
                                          {{"q", to_string(p.first)}, {"y", to_string(p.second)}});
                       });
                   return v;
                 }});

    e.push_back({"phi_functional", {2, -3, 4}, Backend::Symbolic, "symbolic in u (q = u^2); numeric q",
                 [](const VerifyOptions& o) {
                   Verdict v;
                   v.identity = "phi_functional";
                   v.backend = o.backend.value_or(Backend::Symbolic);
                   v.window = window_of(o, {2, -3, 4});
                   if (v.backend == Backend::Symbolic) {
                     auto tab = SymbolTable::make({"u"});
                     v.add(phi_functional(R::symbol(tab, "u", 2), v.window, {{"q", "u^2"}}));
                     return v;
                   }
                   for (const auto& [k, s] : o.params)
                     if (k != "q") throw UsageError("unknown parameter '" + k + "'");
                   numeric_trials<Rational>(
                       v, o,
                       [&]() -> std::optional<Rational> {
                         if (o.params.empty()) return std::nullopt;
                         if (!o.params.count("q")) throw UsageError("need q");
                         return parse_number(o.params.at("q"));
                       },
                       [](std::mt19937_64& rng) { return random_rational(rng); },
                       [&](const Rational& q) { return phi_functional(q, v.window, {{"q", to_string(q)}}); });
                   return v;
                 }});
    return e;
  }();
  return entries;
}

inline const CatalogEntry& find_identity(const std::string& name) {
  for (const auto& e : identity_catalog())
    if (e.name == name) return e;
  throw UsageError("unknown identity '" + name + "'");
}

}  // namespace qvir
