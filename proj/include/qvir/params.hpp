#pragma once

// Parameter points (q, t, Q, T1..T4, phi1, phi2) with q = u^2, t = s^2, v = u/s.

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qvir/errors.hpp"
#include "qvir/field.hpp"

namespace qvir {

template <class F>
struct ParamPoint {
  F u{2}, s{3}, Q{5};
  F T1{1}, T2{1}, T3{1}, T4{1};
  F phi1{1}, phi2{1};

  F q() const { return u * u; }
  F t() const { return s * s; }
  F v() const { return u / s; }
  F w() const { return v() * phi1; }

  /// Weight of the |nu| sum; carries x.
  F p1() const { return T2 * phi2 / (v() * v()); }
  /// Weight of the |mu| sum; carries Lambda/x.
  F p2() const { return T4 / (phi1 * v() * v()); }

  F n(int a) const { return a == 1 ? F(1) : Q; }
  F m(int a) const { return a == 1 ? F(1) : phi1 * phi2 * Q; }
  F fplus(int a) const { return a == 1 ? T1 * Q : inverse(T2); }
  F fminus(int a) const { return a == 1 ? inverse(T3) : T4 * phi1 * phi2 * Q; }

  /// Imposes phi1 = t/v, phi2 = v, so that w = t.
  ParamPoint higgsed() const {
    ParamPoint p = *this;
    p.phi1 = t() / v();
    p.phi2 = v();
    return p;
  }

  /// The point T1 = T4 = v/t, T2 = T3 = 1/v (Higgsed), where the wavefunction
  /// reduces to a single-row Macdonald series.
  static ParamPoint special(const F& u, const F& s, const F& Q) {
    ParamPoint p;
    p.u = u;
    p.s = s;
    p.Q = Q;
    F v = u / s, t = s * s;
    p.T1 = v / t;
    p.T2 = inverse(v);
    p.T3 = inverse(v);
    p.T4 = v / t;
    return p.higgsed();
  }

  /// Named access, matching the CLI parameter names.
  F get(const std::string& name) const {
    if (name == "u") return u;
    if (name == "s") return s;
    if (name == "Q") return Q;
    if (name == "T1") return T1;
    if (name == "T2") return T2;
    if (name == "T3") return T3;
    if (name == "T4") return T4;
    if (name == "phi1") return phi1;
    if (name == "phi2") return phi2;
    if (name == "q") return q();
    if (name == "t") return t();
    if (name == "v") return v();
    throw UsageError("unknown parameter '" + name + "'");
  }

  void set(const std::string& name, const F& value) {
    if (name == "u") u = value;
    else if (name == "s") s = value;
    else if (name == "Q") Q = value;
    else if (name == "T1") T1 = value;
    else if (name == "T2") T2 = value;
    else if (name == "T3") T3 = value;
    else if (name == "T4") T4 = value;
    else if (name == "phi1") phi1 = value;
    else if (name == "phi2") phi2 = value;
    else throw UsageError("unknown parameter '" + name + "'");
  }

  std::map<std::string, std::string> describe(bool with_phi = true) const {
    std::map<std::string, std::string> out;
    for (const char* k : {"u", "s", "Q", "T1", "T2", "T3", "T4"}) out[k] = to_string(get(k));
    if (with_phi) {
      out["phi1"] = to_string(phi1);
      out["phi2"] = to_string(phi2);
    }
    return out;
  }
};

inline const std::vector<std::string>& parameter_names() {
  static const std::vector<std::string> names = {"u", "s", "Q", "T1", "T2", "T3", "T4", "phi1", "phi2"};
  return names;
}

/// Random rational with numerator and denominator in [1, 64] (and a random
/// sign), never 0 or +-1.
inline Rational random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> mag(1, 64);
  std::bernoulli_distribution neg(0.5);
  for (;;) {
    Rational r(mag(rng), mag(rng));
    if (neg(rng)) r = -r;
    if (!r.is_one() && r != Rational(-1)) return r;
  }
}

inline ParamPoint<Rational> random_point(std::mt19937_64& rng) {
  ParamPoint<Rational> p;
  for (const auto& name : parameter_names()) p.set(name, random_rational(rng));
  return p;
}

/// Symbol table and fully symbolic point over the given free parameters;
/// parameters not listed take the values in `fixed` (or 1).
inline ParamPoint<RationalFunction> symbolic_point(const TablePtr& table,
                                                   const std::map<std::string, Rational>& fixed = {}) {
  ParamPoint<RationalFunction> p;
  for (const auto& name : parameter_names()) {
    if (table->index_of(name)) {
      p.set(name, RationalFunction::symbol(table, name));
    } else if (auto it = fixed.find(name); it != fixed.end()) {
      p.set(name, RationalFunction(it->second));
    } else {
      p.set(name, RationalFunction(1));
    }
  }
  return p;
}

}  // namespace qvir
