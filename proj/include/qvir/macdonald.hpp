#pragma once

// One-row Macdonald polynomials in three variables, the closed-form series U
// and V of the special point, and the identities connecting them.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "qvir/operators.hpp"

namespace qvir {

template <class F>
struct MacParams {
  F q{1}, t{1}, Q{1};
  F v2() const { return q / t; }
};

/// Homogeneous polynomial in x1, x2, x3 keyed by exponent triples.
template <class F>
struct SymmetricPolynomial3 {
  int degree = 0;
  std::map<std::array<int, 3>, F> coeffs;

  F coeff(std::array<int, 3> e) const {
    auto it = coeffs.find(e);
    return it == coeffs.end() ? F(0) : it->second;
  }

  bool is_symmetric() const {
    for (const auto& [e, c] : coeffs) {
      std::array<int, 3> p = e;
      std::sort(p.begin(), p.end());
      do {
        if (!field_equal(coeff(p), c)) return false;
      } while (std::next_permutation(p.begin(), p.end()));
    }
    return true;
  }

  bool operator==(const SymmetricPolynomial3& o) const {
    if (degree != o.degree) return false;
    for (const auto& [e, c] : coeffs)
      if (!field_equal(o.coeff(e), c)) return false;
    for (const auto& [e, c] : o.coeffs)
      if (!field_equal(coeff(e), c)) return false;
    return true;
  }
};

/// P_[r] from prod_i phi(t x_i z)/phi(x_i z) = sum_r g_r z^r, scaled so that
/// x1^r has coefficient 1.
template <class F>
SymmetricPolynomial3<F> macdonald_onerow(int r, const F& q, const F& t, Mutation mut = Mutation::None) {
  if (r < 0) throw UsageError("one-row Macdonald polynomial needs r >= 0");
  std::vector<F> g(static_cast<std::size_t>(r) + 1);
  for (int n = 0; n <= r; ++n) g[static_cast<std::size_t>(n)] = qpoch(t, q, n) / qpoch(q, q, n);
  F norm = qpoch(q, q, r) / qpoch(t, q, r);
  SymmetricPolynomial3<F> p;
  p.degree = r;
  for (int a = 0; a <= r; ++a)
    for (int b = 0; a + b <= r; ++b) {
      int c = r - a - b;
      F v = norm * g[static_cast<std::size_t>(a)] * g[static_cast<std::size_t>(b)] * g[static_cast<std::size_t>(c)];
      if (mut == Mutation::OneRowP2 && r == 2 && a < 2 && b < 2 && c < 2) v = v * (F(1) - q * t) / (F(1) - q * q * t);
      p.coeffs[{a, b, c}] = v;
    }
  return p;
}

namespace detail {

template <class F>
F checked_div(const F& a, const F& b, const char* what) {
  if (is_zero(b)) throw DegenerateParameterError(std::string("vanishing denominator in ") + what);
  return a / b;
}

template <class F>
BiSeries<F> double_sum(int lmax, const std::function<F(int, int)>& term) {
  std::vector<std::tuple<int, int, F>> terms;
  for (int m = 0; m <= lmax; ++m)
    for (int n = 0; n <= m; ++n) terms.emplace_back(m, n - m, term(n, m));
  return BiSeries<F>::from_terms(terms, Caps(static_cast<std::size_t>(lmax) + 1, kInf));
}

}  // namespace detail

/// U(Lambda, x): rows 0..lmax, exact (terms with n > m vanish).
template <class F>
BiSeries<F> u_series(int lmax, const MacParams<F>& p) {
  const F &q = p.q, &t = p.t, &Q = p.Q;
  F v2 = p.v2();
  return detail::double_sum<F>(lmax, [&](int n, int m) {
    F num = pow(q, n * m + n) * pow(t, -n) * qpoch(t * Q, q, n) * qpoch(q * Q / t, q, m) *
            qpoch(pow(q, -m), q, n) * qpoch(v2 * pow(q, -n), q, m);
    if (is_zero(num)) return F(0);
    F den = qpoch(q * Q, q, m) * qpoch(q * Q / t, q, n) * qpoch(q, q, n) * qpoch(q, q, m);
    return detail::checked_div(num, den, "U");
  });
}

/// V(Lambda, x): rows 0..lmax, exact.
template <class F>
BiSeries<F> v_series(int lmax, const MacParams<F>& p) {
  const F &q = p.q, &t = p.t, &Q = p.Q;
  F v2 = p.v2();
  return detail::double_sum<F>(lmax, [&](int n, int m) {
    F num = pow(q, m) * pow(-Q, m - n) * qpoch(t * Q, q, n) * qpoch(t, q, m) * qpoch(pow(q, -m), q, n) *
            qpoch(v2 * pow(q, -n), q, m) * qpoch(q / (t * t), q, n) * qpoch(t * t, q, m);
    if (is_zero(num)) return F(0);
    F den = qpoch(q * Q, q, m) * qpoch(t, q, n) * qpoch(v2 * pow(q, -m), q, n) * qpoch(t * t * pow(q, -n), q, m) *
            qpoch(q, q, n) * qpoch(q, q, m);
    return detail::checked_div(num, den, "V");
  });
}

namespace detail {

/// Lambda-polynomial from (coefficient, Lambda-degree, x-degree) terms.
template <class F>
BiSeries<F> lpoly(const std::vector<std::tuple<F, int, int>>& terms) {
  int l = 0;
  for (const auto& [c, a, b] : terms) l = std::max(l, a);
  BiSeries<F> s = BiSeries<F>::zero(Caps(static_cast<std::size_t>(l) + 1, kInf));
  s.set_lambda_complete(true);
  for (const auto& [c, a, b] : terms) s = s + BiSeries<F>::monomial(c, a, b);
  s.set_lambda_complete(true);
  return s;
}

template <class F>
IdentityReport<F> compare_rows(const BiSeries<F>& lhs, const BiSeries<F>& rhs, const DegreeWindow& w) {
  IdentityReport<F> rep;
  rep.requested = w;
  DegreeWindow cl = lhs.certified_window(w.lmax, w.xmin), cr = rhs.certified_window(w.lmax, w.xmin);
  rep.certified = DegreeWindow{std::min(cl.lmax, cr.lmax), w.xmin, std::min({cl.xmax, cr.xmax, w.xmax})};
  rep.residual = series_equal(lhs, rhs, rep.certified);
  rep.pass = rep.residual.equal && rep.certified.lmax >= w.lmax && rep.certified.xmax >= w.xmax;
  return rep;
}

}  // namespace detail

/// The three-term difference equation for U, multiplied through by the common
/// denominator t q Q (1-x)^2 (Lambda - t x)(Lambda - t) so that every
/// coefficient is a polynomial. The U(Lambda, x/q) coefficient carries a single
/// power of (1 - x) in its denominator. Rows 0..lmax are compared exactly.
template <class F>
IdentityReport<F> verify_macdonald_recurrence(int lmax, const MacParams<F>& p, Mutation mut = Mutation::None) {
  using detail::lpoly;
  using S = BiSeries<F>;
  const F &q = p.q, &t = p.t, &Q = p.Q;
  const F one(1);
  S U = u_series(lmax, p);
  auto lin = [](const F& c0, const F& cl, const F& cx) {
    return lpoly<F>({{c0, 0, 0}, {cl, 1, 0}, {cx, 0, 1}});
  };
  S one_minus_x = lin(one, F(0), -one);
  S lam_minus_tx = lin(F(0), one, -t);
  S lam_minus_t = lin(-t, one, F(0));
  // C1 * D = -t^2 q Q (1 - x t)(1 - Lambda)(1 - x)(Lambda - t x)
  S k1 = (lin(one, F(0), -t) * lin(one, -one, F(0)) * one_minus_x * lam_minus_tx).scaled(-(t * t * q * Q));
  // C2 * D = -q Q (q Lambda - t^2 x)(x - t)(Lambda - t)(1 - x)
  S k2 = (lin(F(0), q, -(t * t)) * lin(-t, F(0), one) * lam_minus_t * one_minus_x).scaled(-(q * Q));
  // C3 * D = t^2 (Lambda - q x)(Lambda - t^2)(1 - x)^2
  S k3 = (lin(F(0), one, -q) * lin(-(t * t), one, F(0)) * one_minus_x * one_minus_x).scaled(t * t);
  F e = mut == Mutation::Recurrence ? one + t + t * Q : one + t + t / Q;
  S d = (one_minus_x * one_minus_x * lam_minus_tx * lam_minus_t).scaled(t * q * Q * e);
  std::vector<S> parts{k1 * U.rescaled(q, q), k2 * U.rescaled(one, inverse(q)), k3 * U.rescaled(inverse(q), one),
                       (d * U).scaled(-one)};
  // One common-denominator sum per coefficient keeps the symbolic case fast.
  IdentityReport<F> rep;
  rep.requested = rep.certified = DegreeWindow{lmax, -lmax, 4};
  for (int a = 0; a <= lmax; ++a)
    for (int b = -lmax; b <= 4; ++b) {
      std::vector<F> xs;
      for (const auto& s : parts) xs.push_back(s.extract(a, b));
      if (!is_zero(field_sum(xs)) && rep.residual.equal) {
        rep.residual.equal = false;
        rep.residual.dl = a;
        rep.residual.dx = b;
        rep.residual.lhs = xs[0] + xs[1] + xs[2];
        rep.residual.rhs = -xs[3];
      }
    }
  rep.pass = rep.residual.equal;
  return rep;
}

/// U at Q = q^-r t^-1 against phi(q t^-2 Lambda/x)/phi(Lambda/x) P_[r](1, Lambda/t, Lambda/(t x)).
template <class F>
IdentityReport<F> verify_macdonald_solution(int r, int lmax, const F& q, const F& t, Mutation mut = Mutation::None) {
  if (r < 0) throw UsageError("r must be nonnegative");
  using S = BiSeries<F>;
  F Q = inverse(pow(q, r) * t);
  if (mut == Mutation::Solution) Q = Q / t;
  S U = u_series(lmax, MacParams<F>{q, t, Q});
  Caps caps = uniform_caps(lmax, 0);
  S ratio = factor_product<F>({{false, {q / (t * t), 1, -1}, false}, {false, {F(1), 1, -1}, true}}, q, t,
                              uniform_caps(lmax, lmax));
  auto P = macdonald_onerow(r, q, t, mut);
  std::vector<std::tuple<int, int, F>> terms;
  F tinv = inverse(t);
  for (const auto& [e, c] : P.coeffs) {
    int a = e[1] + e[2];
    if (a > lmax) continue;
    terms.emplace_back(a, -e[2], c * pow(tinv, a));
  }
  S pv = S::from_terms(terms, Caps(caps.size(), kInf));
  S rhs = S::multiply(ratio, pv, &caps);
  return detail::compare_rows(U, rhs, DegreeWindow{lmax, -lmax, 0});
}

/// Both half equations at the special point, against the closed form of V.
template <class F>
std::pair<IdentityReport<F>, IdentityReport<F>> verify_halves(const DegreeWindow& w, const MacParams<F>& p,
                                                             Mutation mut = Mutation::None) {
  using Op = SeriesOperator<F>;
  const F &q = p.q, &t = p.t, &Q = p.Q;
  const F one(1);
  auto mult = [&](std::vector<QFactor<F>> fs) {
    return Op::multiply([fs, q, t](const Caps& c) { return factor_product(fs, q, t, c); }, LowBound{0, 1});
  };
  BiSeries<F> U = u_series(w.lmax, p);
  BiSeries<F> V = v_series(w.lmax, p);
  Caps target = uniform_caps(w.lmax, w.xmax);

  Op half1 = Op::compose({Op::rescale(mut == Mutation::HalfV1 ? one : t, one),
                          mult({{false, {q / t, 0, 1}, false}, {false, {t, 1, -1}, false}}), Op::gamma(q, -1),
                          mult({{false, {-inverse(t), 0, 1}, false},
                                {false, {-q, 1, -1}, false},
                                {false, {q / (t * t), 1, 0}, true}})});
  Op half2 = Op::compose({Op::rescale(one, inverse(t * q * Q)),
                          mult({{false, {inverse(q * Q), 0, 1}, true}, {false, {q * q * Q / t, 1, -1}, true}}),
                          Op::gamma(q, 1),
                          mult({{false, {t, 1, 0}, false},
                                {false, {-inverse(Q), 0, 1}, true},
                                {false, {-(q * Q), 1, -1}, true}})});
  auto r1 = detail::compare_rows(V, half1.apply(U, target, kPsiBound), w);
  auto r2 = detail::compare_rows(V, half2.apply(U, target, kPsiBound), w);
  return {r1, r2};
}

/// Sum_r z^r (t)_r/(q)_r [phi(q x/t) phi(t Lambda/x) U(t Lambda, x)] at Q = q^-r/t
/// against the product formula, with every coefficient truncated to z^zmax.
/// `z` must be the symbol named z.
inline IdentityReport<RationalFunction> verify_genfunc(int zmax, const DegreeWindow& w, const RationalFunction& q,
                                                       const RationalFunction& t, const RationalFunction& z,
                                                       Mutation mut = Mutation::None) {
  using R = RationalFunction;
  using S = BiSeries<R>;
  using Op = SeriesOperator<R>;
  auto trunc = [&](const S& s) {
    return map_series<R, R>(s, [&](const R& c) {
      auto zi = c.table() ? c.table()->index_of("z") : std::nullopt;
      return zi ? c.truncate_degree(*zi, zmax) : c;
    });
  };
  Caps target = uniform_caps(w.lmax, w.xmax);
  Op bracket = Op::compose(
      {Op::rescale(t, R(1)),
       Op::multiply([q, t](const Caps& c) {
         return factor_product<R>({{false, {q / t, 0, 1}, false}, {false, {t, 1, -1}, false}}, q, t, c);
       }, LowBound{0, 1})});
  std::optional<S> lhs;
  for (int r = 0; r <= zmax; ++r) {
    R Q = inverse(pow(q, r) * t);
    S b = bracket.apply(u_series(w.lmax, MacParams<R>{q, t, Q}), target, kPsiBound);
    S term = b.scaled(pow(z, r) * qpoch(t, q, r) / qpoch(q, q, r));
    lhs = lhs ? *lhs + term : term;
  }
  R zratio(0);
  R tz = mut == Mutation::GenFunc ? q : t;
  for (int n = 0; n <= zmax; ++n) zratio = zratio + qpoch(tz, q, n) / qpoch(q, q, n) * pow(z, n);
  S rhs = factor_product<R>({{false, {q / t, 0, 1}, false},
                             {false, {q / t, 1, -1}, false},
                             {false, {t * z, 1, 0}, false},
                             {false, {z, 1, 0}, true},
                             {false, {t * z, 1, -1}, false},
                             {false, {z, 1, -1}, true}},
                            q, t, target)
              .scaled(zratio);
  return detail::compare_rows(trunc(*lhs), trunc(rhs), w);
}

/// The terminating-in-Lambda q-series identity (coefficients carry the symbol z
/// through `z`), compared on rows 0..lmax. Returns the report and the computed
/// left-hand side.
inline std::pair<IdentityReport<RationalFunction>, BiSeries<RationalFunction>> verify_qseries_identity(
    int lmax, const RationalFunction& q, const RationalFunction& t, const RationalFunction& z,
    Mutation mut = Mutation::None) {
  using R = RationalFunction;
  using S = BiSeries<R>;
  Caps caps(static_cast<std::size_t>(lmax) + 1, kInf);
  const R one(1);
  R a = mut == Mutation::QSeries ? one : t;  // (a/x)_k
  std::optional<S> lhs;
  for (int k = 0; k <= lmax; ++k) {
    R c = pow(q, k) * qpoch(t, q, k) * qpoch(q / (t * z), q, k) / qpoch(q, q, k);
    S term = S::monomial(c, 0, 0);
    for (int i = 0; i < k; ++i) {
      R qi = pow(q, i);
      // 1 - q^i a/x
      term = term * detail::lpoly<R>({{one, 0, 0}, {-(qi * a), 0, -1}});
      // 1/(1 - q^{i+1} t/(z Lambda)) = -(z Lambda)/(q^{i+1} t) / (1 - z Lambda/(q^{i+1} t))
      R w = z / (qi * q * t);
      std::vector<std::tuple<int, int, R>> g;
      for (int n = 0; n <= lmax; ++n) g.emplace_back(n + 1, 0, -pow(w, n + 1));
      S gs = S::from_terms(g, caps);
      term = S::multiply(term, gs, &caps);
      // 1/(1 - q^{i+1} Lambda/x)
      std::vector<std::tuple<int, int, R>> h;
      for (int n = 0; n <= lmax; ++n) h.emplace_back(n, -n, pow(qi * q, n));
      term = S::multiply(term, S::from_terms(h, caps), &caps);
    }
    lhs = lhs ? *lhs + term : term;
  }
  S rhs = factor_product<R>({{false, {q / t, 1, -1}, false},
                             {false, {z / t, 1, 0}, false},
                             {false, {t * z, 1, -1}, false},
                             {false, {q / t, 1, 0}, false},
                             {false, {q, 1, -1}, true},
                             {false, {z, 1, 0}, true},
                             {false, {z, 1, -1}, true},
                             {false, {q / (t * t), 1, 0}, true}},
                            q, t, uniform_caps(lmax, 0));
  auto rep = detail::compare_rows(*lhs, rhs, DegreeWindow{lmax, -lmax, 0});
  return {rep, *lhs};
}

/// Terminating q-Saalschutz summation with d = q^{1-n} a b / c.
inline bool verify_qsaalschutz(int n, const RationalFunction& q, const RationalFunction& a,
                               const RationalFunction& b, const RationalFunction& c, Mutation mut = Mutation::None) {
  using R = RationalFunction;
  if (n < 0) throw UsageError("n must be nonnegative");
  R d = pow(q, 1 - n) * a * b / c;
  std::vector<R> terms;
  for (int k = 0; k <= n; ++k)
    terms.push_back(pow(q, k) * qpoch(pow(q, -n), q, k) * qpoch(a, q, k) * qpoch(b, q, k) /
                    (qpoch(c, q, k) * qpoch(d, q, k) * qpoch(q, q, k)));
  R lhs = R::sum(terms);
  R ca = mut == Mutation::QSaalschutz ? c * a : c / a;
  R rhs = qpoch(ca, q, n) * qpoch(c / b, q, n) / (qpoch(c, q, n) * qpoch(c / (a * b), q, n));
  return lhs == rhs;
}

/// gamma [phi(-x/t) phi(-q Lambda/x)]^-1 x^k against
/// phi(q Lambda/t)^-1 phi(q^{1+k} x/t) phi(q^{1-k} Lambda/x) gamma x^k.
template <class F>
IdentityReport<F> verify_formula_gamma(int k, const DegreeWindow& w, const F& q, const F& t,
                                       Mutation mut = Mutation::None) {
  using Op = SeriesOperator<F>;
  Caps target = uniform_caps(w.lmax, w.xmax);
  std::vector<QFactor<F>> left{{false, {-inverse(t), 0, 1}, true}, {false, {-q, 1, -1}, true}};
  F shift = mut == Mutation::FormulaGamma ? pow(q, k) : pow(q, 1 + k);
  std::vector<QFactor<F>> right{{false, {q / t, 1, 0}, true},
                                {false, {shift / t, 0, 1}, false},
                                {false, {pow(q, 1 - k), 1, -1}, false}};
  auto mult = [&](std::vector<QFactor<F>> fs) {
    return Op::multiply([fs, q, t](const Caps& c) { return factor_product(fs, q, t, c); }, LowBound{0, 1});
  };
  auto xk = BiSeries<F>::monomial(F(1), 0, k);
  auto lhs = Op::compose({mult(left), Op::gamma(q)}).apply_exact(xk, target);
  auto rhs = Op::compose({Op::gamma(q), mult(right)}).apply_exact(xk, target);
  return detail::compare_rows(lhs, rhs, w);
}

}  // namespace qvir
