#pragma once

// q-special functions expanded as truncated series in (Lambda, x).
//
// Every expansion here is of a univariate series g(y) = sum_n g_n y^n at a
// monomial argument y = c * Lambda^dl * x^dx. Term n lands at Lambda-degree
// n*dl and x-degree n*dx, so the number of terms is fixed by the requested
// caps.

#include <functional>
#include <string>
#include <vector>

#include "qvir/errors.hpp"
#include "qvir/field.hpp"
#include "qvir/series.hpp"

namespace qvir {

template <class F>
struct MonomialArg {
  F coeff{1};
  int dl = 0;
  int dx = 0;

  void require_small() const {
    if (dl < 0 || (dl == 0 && dx <= 0))
      throw NonExpandableError("argument Lambda^" + std::to_string(dl) + " x^" + std::to_string(dx) +
                               " is not small in the series grading");
    if (is_zero(coeff)) throw NonExpandableError("argument has zero coefficient");
  }

  MonomialArg scaled(const F& c) const { return {coeff * c, dl, dx}; }
};

/// (z; q)_n = prod_{i<n} (1 - q^i z).
template <class F>
F qpoch(const F& z, const F& q, int n) {
  if (n < 0) throw UsageError("negative Pochhammer length");
  F r(1), qi(1);
  for (int i = 0; i < n; ++i) {
    r = r * (F(1) - qi * z);
    qi = qi * q;
  }
  return r;
}

/// Largest n whose term is needed for the caps (terms beyond are dropped).
template <class F>
int terms_needed(const MonomialArg<F>& arg, const Caps& caps) {
  arg.require_small();
  int lmax = static_cast<int>(caps.size()) - 1;
  if (arg.dl > 0) return lmax / arg.dl;
  if (caps[0] >= kInf) throw UsageError("pure-x expansion needs a finite x-degree cap");
  return caps[0] < 0 ? 0 : caps[0] / arg.dx;
}

/// Places sum_n g[n] * arg^n into a series certified up to `caps`.
template <class F>
BiSeries<F> place_univariate(const MonomialArg<F>& arg, const std::vector<F>& g, const Caps& caps) {
  int lmax = static_cast<int>(caps.size()) - 1;
  BiSeries<F> s;
  if (arg.dl == 0) {
    s = BiSeries<F>::zero(Caps{caps[0]});
    s.set_lambda_complete(true);
  } else {
    s = BiSeries<F>::zero(Caps(caps.size(), kInf));
  }
  F cn(1);
  for (std::size_t n = 0; n < g.size(); ++n) {
    int a = static_cast<int>(n) * arg.dl;
    int b = static_cast<int>(n) * arg.dx;
    if (a > lmax) break;
    auto& row = s.mutable_row(a);
    if (b > caps[static_cast<std::size_t>(a)]) {
      if (arg.dl > 0) row.cap = caps[static_cast<std::size_t>(a)];
    } else if (!is_zero(g[n])) {
      F c = g[n] * cn;
      if (row.c.empty()) {
        row.lo = b;
        row.c = {c};
      } else {
        // dl == 0: successive terms in row 0 are dx apart.
        row.c.resize(static_cast<std::size_t>(b - row.lo + 1), F(0));
        row.c.back() = c;
      }
    }
    cn = cn * arg.coeff;
  }
  for (auto& r : s.rows()) r.trim();
  return s;
}

/// Coefficients of phi(y) = prod_{i>=0} (1 - q^i y) (Euler), or of 1/phi(y).
template <class F>
std::vector<F> phi_coefficients(const F& q, int n, bool inverse_series) {
  std::vector<F> g(static_cast<std::size_t>(n) + 1);
  F poch(1), qk(1), qtri(1);
  g[0] = F(1);
  for (int k = 1; k <= n; ++k) {
    poch = poch * (F(1) - qk * q);  // (q;q)_k
    if (k > 1) qtri = qtri * qk;     // q^{k(k-1)/2}
    qk = qk * q;
    F term = inverse(poch);
    if (!inverse_series) {
      term = term * qtri;
      if (k % 2) term = -term;
    }
    g[static_cast<std::size_t>(k)] = term;
  }
  return g;
}

/// Coefficients of exp(sum_{k>=1} s(k) y^k) up to y^n.
template <class F>
std::vector<F> exp_coefficients(const std::function<F(int)>& s, int n) {
  std::vector<F> sk(static_cast<std::size_t>(n) + 1), e(static_cast<std::size_t>(n) + 1);
  for (int k = 1; k <= n; ++k) sk[static_cast<std::size_t>(k)] = s(k);
  e[0] = F(1);
  for (int m = 1; m <= n; ++m) {
    std::vector<F> acc;
    for (int k = 1; k <= m; ++k) {
      const F& a = sk[static_cast<std::size_t>(k)];
      const F& b = e[static_cast<std::size_t>(m - k)];
      if (is_zero(a) || is_zero(b)) continue;
      acc.push_back(F(k) * a * b);
    }
    if (!acc.empty()) e[static_cast<std::size_t>(m)] = field_sum(acc) / F(m);
  }
  return e;
}

/// phi(arg) or 1/phi(arg), truncated to `caps`.
template <class F>
BiSeries<F> phi_expand(const MonomialArg<F>& arg, const F& q, const Caps& caps, bool inverse_series = false) {
  int n = terms_needed(arg, caps);
  return place_univariate(arg, phi_coefficients(q, n, inverse_series), caps);
}

/// exp(sum_k s(k) arg^k), truncated to `caps`.
template <class F>
BiSeries<F> exp_expand(const MonomialArg<F>& arg, const std::function<F(int)>& s, const Caps& caps) {
  int n = terms_needed(arg, caps);
  return place_univariate(arg, exp_coefficients<F>(s, n), caps);
}

/// Phi(arg) = prod_{i,j>=0} (1 - q^i t^j arg), or its inverse.
template <class F>
BiSeries<F> bigphi_expand(const MonomialArg<F>& arg, const F& q, const F& t, const Caps& caps,
                          bool inverse_series = false) {
  std::function<F(int)> s = [&](int k) {
    F v = inverse(F(k) * (F(1) - pow(q, k)) * (F(1) - pow(t, k)));
    return inverse_series ? v : -v;
  };
  return exp_expand(arg, s, caps);
}

enum class KernelKind { SS, SV, VV };

/// Pairing kernels of two vertex/screening insertions as series in the
/// ratio argument r; the power prefactors (w^{2 beta} and the like) are not
/// included. q^alpha and q^gamma enter as field elements.
template <class F>
BiSeries<F> pair_kernel(KernelKind kind, const MonomialArg<F>& r, const F& q, const F& t, const F& qalpha,
                        const F& qgamma, const Caps& caps) {
  std::function<F(int)> s;
  switch (kind) {
    case KernelKind::SS:
      s = [&](int k) {
        F qk = pow(q, k), tk = pow(t, k);
        return -((F(1) + qk / tk) * (F(1) - tk) / ((F(1) - qk) * F(k)));
      };
      break;
    case KernelKind::SV:
      s = [&](int k) { return -((F(1) - pow(qalpha, k)) / ((F(1) - pow(q, k)) * F(k))); };
      break;
    case KernelKind::VV:
      s = [&](int k) {
        F qk = pow(q, k), tk = pow(t, k);
        F den = (F(1) - inverse(qk)) * (F(1) - tk) * (F(1) + qk / tk) * F(k);
        if (is_zero(den)) throw EvaluationPoleError("vertex kernel denominator vanishes at k=" + std::to_string(k));
        return -((F(1) - pow(qalpha, k)) * (F(1) - inverse(pow(qgamma, k))) / den);
      };
      break;
  }
  return exp_expand(r, s, caps);
}

/// phi(x)/phi(x/y) - sum_n (y)_n/(q)_n (x/y)^n on the caps (zero when the
/// q-binomial theorem holds).
template <class F>
BiSeries<F> qbinomial_residual(const MonomialArg<F>& x, const F& y, const F& q, const Caps& caps) {
  if (is_zero(y)) throw UsageError("q-binomial check needs y != 0");
  MonomialArg<F> xy = x.scaled(inverse(y));
  BiSeries<F> lhs = BiSeries<F>::multiply(phi_expand(x, q, caps), phi_expand(xy, q, caps, true), &caps);
  int n = terms_needed(xy, caps);
  std::vector<F> g(static_cast<std::size_t>(n) + 1);
  F ypoch(1), qpoch_(1), qk(1);
  g[0] = F(1);
  for (int k = 1; k <= n; ++k) {
    ypoch = ypoch * (F(1) - qk * y);
    qk = qk * q;
    qpoch_ = qpoch_ * (F(1) - qk);
    g[static_cast<std::size_t>(k)] = ypoch / qpoch_;
  }
  BiSeries<F> rhs = place_univariate(xy, g, caps);
  return lhs - rhs;
}

}  // namespace qvir
