#pragma once

// Difference operators acting on truncated bivariate series, with automatic
// window bookkeeping: every operator knows how much input it needs for a
// requested output window, and which lower x-degree bound its output obeys.

#include <algorithm>
#include <functional>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qvir/mutation.hpp"
#include "qvir/nekrasov.hpp"
#include "qvir/qkit.hpp"
#include "qvir/series.hpp"

namespace qvir {

/// Lower bound on x-degrees: row a holds nothing below floor - depth * a.
struct LowBound {
  long floor = 0;
  long depth = 0;
  long at(long a) const { return floor - depth * a; }
};

namespace detail {

inline int clamp_cap(long c) { return static_cast<int>(std::clamp<long>(c, -kInf, kInf)); }

inline Caps caps_max(const Caps& a, const Caps& b) {
  Caps out(std::max(a.size(), b.size()), -kInf);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i < a.size()) out[i] = std::max(out[i], a[i]);
    if (i < b.size()) out[i] = std::max(out[i], b[i]);
  }
  return out;
}

/// Caps needed on a factor so that its product with a partner obeying
/// `partner` is certified up to `target`.
inline Caps factor_need(const Caps& target, LowBound partner) {
  Caps out(target.size());
  for (std::size_t a1 = 0; a1 < target.size(); ++a1) {
    long m = -kInf;
    for (std::size_t a = a1; a < target.size(); ++a)
      if (target[a] > -kInf) m = std::max(m, static_cast<long>(target[a]) - partner.at(static_cast<long>(a - a1)));
    out[a1] = clamp_cap(m);
  }
  return out;
}

inline LowBound bound_min(LowBound a, LowBound b) {
  return {std::min(a.floor, b.floor), std::max(a.depth, b.depth)};
}

}  // namespace detail

/// A composable pipeline of primitive actions on series.
template <class F>
class SeriesOperator {
 public:
  enum class Kind { Multiply, Gamma, PShift, XHat, Rescale, Shift, Compose, Sum };
  using Kernel = std::function<BiSeries<F>(const Caps&)>;

  static SeriesOperator multiply(Kernel k, LowBound kb, std::string label = "K") {
    SeriesOperator o(Kind::Multiply);
    o.kernel_ = std::move(k);
    o.kbound_ = kb;
    o.label_ = std::move(label);
    return o;
  }
  static SeriesOperator multiply_by(const BiSeries<F>& s, LowBound kb, std::string label = "K") {
    return multiply([s](const Caps& c) { return s.lambda_complete() ? s : s.restricted(c); }, kb, std::move(label));
  }
  /// gamma^power: x^n -> q^{power * n(n+1)/2} x^n.
  static SeriesOperator gamma(const F& q, int power = 1) {
    SeriesOperator o(Kind::Gamma);
    o.q_ = q;
    o.k_ = power;
    return o;
  }
  /// f(x) -> f(q^k x).
  static SeriesOperator pshift(const F& q, int k) {
    SeriesOperator o(Kind::PShift);
    o.q_ = q;
    o.k_ = k;
    return o;
  }
  /// f(x) -> x f(q x).
  static SeriesOperator xhat(const F& q) {
    SeriesOperator o(Kind::XHat);
    o.q_ = q;
    return o;
  }
  /// f(Lambda, x) -> f(cL Lambda, cx x).
  static SeriesOperator rescale(const F& cL, const F& cx) {
    SeriesOperator o(Kind::Rescale);
    o.cL_ = cL;
    o.cx_ = cx;
    return o;
  }
  /// Multiplication by c Lambda^i x^j.
  static SeriesOperator shift(int i, int j, const F& c = F(1)) {
    if (i < 0) throw UsageError("negative Lambda shift");
    SeriesOperator o(Kind::Shift);
    o.i_ = i;
    o.j_ = j;
    o.cL_ = c;
    return o;
  }
  /// Applies ops[0] first, then ops[1], ...
  static SeriesOperator compose(std::vector<SeriesOperator> ops) {
    SeriesOperator o(Kind::Compose);
    o.children_ = std::move(ops);
    return o;
  }
  static SeriesOperator sum(std::vector<SeriesOperator> ops, std::vector<F> coeffs) {
    if (ops.size() != coeffs.size()) throw UsageError("sum operator: size mismatch");
    SeriesOperator o(Kind::Sum);
    o.children_ = std::move(ops);
    o.coeffs_ = std::move(coeffs);
    return o;
  }

  Kind kind() const { return kind_; }

  /// Bound obeyed by the output when the input obeys `in`.
  LowBound forward(LowBound in) const {
    switch (kind_) {
      case Kind::Multiply:
        return {in.floor + kbound_.floor, std::max(in.depth, kbound_.depth)};
      case Kind::XHat:
        return {in.floor + 1, in.depth};
      case Kind::Shift:
        return {in.floor + j_ + in.depth * i_, in.depth};
      case Kind::Compose:
        for (const auto& c : children_) in = c.forward(in);
        return in;
      case Kind::Sum: {
        if (children_.empty()) return in;
        LowBound b = children_[0].forward(in);
        for (const auto& c : children_) b = detail::bound_min(b, c.forward(in));
        return b;
      }
      default:
        return in;
    }
  }

  /// Input caps needed so that the output is certified up to `target`.
  Caps need(const Caps& target, LowBound in) const {
    switch (kind_) {
      case Kind::Multiply:
        return detail::factor_need(target, kbound_);
      case Kind::XHat: {
        Caps c = target;
        for (auto& v : c) v = detail::clamp_cap(static_cast<long>(v) - 1);
        return c;
      }
      case Kind::Shift: {
        long l = static_cast<long>(target.size()) - 1 - i_;
        if (l < 0) return Caps{-kInf};
        Caps c(static_cast<std::size_t>(l) + 1);
        for (long a = 0; a <= l; ++a)
          c[static_cast<std::size_t>(a)] = detail::clamp_cap(static_cast<long>(target[static_cast<std::size_t>(a + i_)]) - j_);
        return c;
      }
      case Kind::Compose: {
        std::vector<LowBound> bounds{in};
        for (const auto& c : children_) bounds.push_back(c.forward(bounds.back()));
        Caps t = target;
        for (std::size_t k = children_.size(); k-- > 0;) t = children_[k].need(t, bounds[k]);
        return t;
      }
      case Kind::Sum: {
        Caps t(target.size(), -kInf);
        for (const auto& c : children_) t = detail::caps_max(t, c.need(target, in));
        return t;
      }
      default:
        return target;
    }
  }

  /// Applies the operator; the result is certified on `target` provided the
  /// input is certified on need(target, in) and obeys `in`.
  BiSeries<F> apply(const BiSeries<F>& f, const Caps& target, LowBound in) const {
    Caps req = need(target, in);
    for (std::size_t a = 0; a < req.size(); ++a) {
      if (req[a] <= -kInf) continue;
      int have = f.has_row(static_cast<int>(a)) ? f.cap(static_cast<int>(a)) : -kInf;
      if (have < req[a])
        throw WindowUnderflowError("input certified to x^" + std::to_string(have) + " in Lambda-row " +
                                   std::to_string(a) + ", the pipeline needs x^" + std::to_string(req[a]) +
                                   " (required caps " + caps_string(req) + ")");
    }
    check_bound(f, in);
    return run(f, target, in);
  }

  /// Applies to an exact Lambda-polynomial input (no padding requirement).
  BiSeries<F> apply_exact(const BiSeries<F>& f, const Caps& target) const {
    return run(f, target, bound_of(f));
  }

  static LowBound bound_of(const BiSeries<F>& f) {
    long lo = 0;
    bool any = false;
    for (int a = 0; a <= f.lmax(); ++a)
      if (!f.row(a).empty()) {
        lo = any ? std::min<long>(lo, f.row(a).lo) : f.row(a).lo;
        any = true;
      }
    return {any ? lo : 0, 0};
  }

  static std::string caps_string(const Caps& c) {
    std::string s = "[";
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) s += ",";
      s += c[i] <= -kInf ? std::string("-") : std::to_string(c[i]);
    }
    return s + "]";
  }

 private:
  explicit SeriesOperator(Kind k) : kind_(k) {}

  static void check_bound(const BiSeries<F>& f, LowBound in) {
    for (int a = 0; a <= f.lmax(); ++a) {
      const auto& r = f.row(a);
      if (!r.empty() && r.lo < in.at(a))
        throw UsageError("input has x^" + std::to_string(r.lo) + " in Lambda-row " + std::to_string(a) +
                         ", below the declared bound");
    }
  }

  static BiSeries<F> trim_rows(BiSeries<F> s, const Caps& target) {
    int l = static_cast<int>(target.size()) - 1;
    if (s.lmax() > l) {
      bool complete = s.lambda_complete();
      for (int a = l + 1; a <= s.lmax(); ++a)
        if (!s.row(a).empty()) complete = false;
      s.rows().resize(static_cast<std::size_t>(l) + 1);
      s.set_lambda_complete(complete);
    }
    return s;
  }

  BiSeries<F> run(const BiSeries<F>& f, const Caps& target, LowBound in) const {
    switch (kind_) {
      case Kind::Multiply: {
        BiSeries<F> k = kernel_(detail::factor_need(target, in));
        return BiSeries<F>::multiply(k, f, &target);
      }
      case Kind::Gamma: {
        F q = q_;
        int k = k_;
        return f.diagonal([&](int, int b) { return pow(q, static_cast<long>(k) * b * (b + 1) / 2); });
      }
      case Kind::PShift:
        return f.rescaled(F(1), pow(q_, k_));
      case Kind::XHat:
        return f.rescaled(F(1), q_).shifted(0, 1);
      case Kind::Rescale:
        return f.rescaled(cL_, cx_);
      case Kind::Shift: {
        BiSeries<F> s = f.shifted(i_, j_);
        if (!(cL_ == F(1))) s = s.scaled(cL_);
        return trim_rows(std::move(s), target);
      }
      case Kind::Compose: {
        std::vector<LowBound> bounds{in};
        for (const auto& c : children_) bounds.push_back(c.forward(bounds.back()));
        std::vector<Caps> targets(children_.size() + 1);
        targets.back() = target;
        for (std::size_t k = children_.size(); k-- > 0;) targets[k] = children_[k].need(targets[k + 1], bounds[k]);
        BiSeries<F> cur = f;
        for (std::size_t k = 0; k < children_.size(); ++k)
          cur = children_[k].run(cur, targets[k + 1], bounds[k]);
        return cur;
      }
      case Kind::Sum: {
        std::optional<BiSeries<F>> acc;
        for (std::size_t k = 0; k < children_.size(); ++k) {
          BiSeries<F> part = children_[k].run(f, target, in);
          if (!(coeffs_[k] == F(1))) part = part.scaled(coeffs_[k]);
          acc = acc ? *acc + part : part;
        }
        return acc ? trim_rows(*acc, target) : BiSeries<F>::zero(target);
      }
    }
    return f;
  }

  Kind kind_;
  Kernel kernel_;
  LowBound kbound_;
  std::string label_;
  F q_{1}, cL_{1}, cx_{1};
  int k_ = 0, i_ = 0, j_ = 0;
  std::vector<SeriesOperator> children_;
  std::vector<F> coeffs_;
};

template <class F>
BiSeries<F> gamma_apply(const BiSeries<F>& f, const F& q, int power = 1) {
  if (power != 1 && power != -1) throw UsageError("gamma power must be +-1");
  return f.diagonal([&](int, int b) { return pow(q, static_cast<long>(power) * b * (b + 1) / 2); });
}

/// Checks p gamma = gamma p and gamma xhat = p xhat gamma on the monomials of
/// the window. With Mutation::GammaRelation the second relation is replaced
/// by gamma xhat = xhat gamma.
template <class F>
bool basic_shift_relations_check(const DegreeWindow& w, const F& q, Mutation mut = Mutation::None) {
  using Op = SeriesOperator<F>;
  Op g = Op::gamma(q), p = Op::pshift(q, 1), xh = Op::xhat(q);
  Op pg = Op::compose({g, p}), gp = Op::compose({p, g});
  Op gx = Op::compose({xh, g});
  Op pxg = mut == Mutation::GammaRelation ? Op::compose({g, xh}) : Op::compose({g, xh, p});
  for (int a = 0; a <= w.lmax; ++a)
    for (int b = w.xmin; b <= w.xmax; ++b) {
      auto m = BiSeries<F>::monomial(F(1), a, b);
      Caps target = uniform_caps(a, b + 1);
      DegreeWindow cw{a, b, b + 1};
      if (!series_equal(pg.apply_exact(m, target), gp.apply_exact(m, target), cw).equal) return false;
      if (!series_equal(gx.apply_exact(m, target), pxg.apply_exact(m, target), cw).equal) return false;
    }
  return true;
}

// ---- prefactors of the non-stationary equation ----

/// One factor phi(arg)^{+-1} or Phi(arg)^{+-1}.
template <class F>
struct QFactor {
  bool big = false;
  MonomialArg<F> arg;
  bool inverse = false;
};

/// Product of factors, certified on `target`. Every factor has x-degree at
/// least -a in Lambda-row a, which fixes the padding of the partial products.
template <class F>
BiSeries<F> factor_product(const std::vector<QFactor<F>>& fs, const F& q, const F& t, const Caps& target) {
  Caps wide = detail::factor_need(target, LowBound{0, 1});
  for (std::size_t a = 0; a < wide.size(); ++a) wide[a] = std::max(wide[a], target[a]);
  std::optional<BiSeries<F>> acc;
  for (const auto& f : fs) {
    BiSeries<F> s = f.big ? bigphi_expand(f.arg, q, t, wide, f.inverse) : phi_expand(f.arg, q, wide, f.inverse);
    acc = acc ? BiSeries<F>::multiply(*acc, s, &wide) : s;
  }
  if (!acc) return BiSeries<F>::one();
  return acc->restricted(target);
}

template <class F>
std::vector<QFactor<F>> prefactor_factors(int which, const ParamPoint<F>& p, Mutation mut = Mutation::None) {
  const F q = p.q(), t = p.t(), v = p.v(), Q = p.Q;
  const F one(1);
  auto ph = [](const F& c, int dl, int dx, bool inv) { return QFactor<F>{false, {c, dl, dx}, inv}; };
  auto bp = [](const F& c, bool inv) { return QFactor<F>{true, {c, 1, -1}, inv}; };
  switch (which) {
    case 1:
      return {ph(p.T1 * t * v, 0, 1, true),
              bp(p.T3 * t * t * v, false),
              bp(p.T3 * q * v, true),
              bp(p.T4 * t * t * v, false),
              bp(p.T4 * t * t / v, true)};
    case 2: {
      F last = mut == Mutation::PrefactorA2 ? -one : -q;
      return {ph(q * p.T2 * p.T3, 1, 0, false),
              ph(t * p.T1 * p.T4, 1, 0, false),
              ph(-(p.T1 * p.T2), 0, 1, true),
              ph(-inverse(Q), 0, 1, true),
              ph(-(p.T3 * p.T4 * Q * q * t), 1, -1, true),
              ph(last, 1, -1, true)};
    }
    case 3:
      return {ph(p.T2 * v / (Q * q), 0, 1, true),
              bp(p.T3 * Q * q * q * v, false),
              bp(p.T3 * Q * q * q / v, true),
              bp(p.T4 * Q * t * t * t * v, false),
              bp(p.T4 * Q * q * q / v, true)};
    default:
      throw UsageError("prefactor index must be 1, 2 or 3");
  }
}

/// A_which truncated to the window (rows 0..lmax, x up to xmax).
template <class F>
BiSeries<F> prefactor_A(int which, const DegreeWindow& w, const ParamPoint<F>& p, Mutation mut = Mutation::None) {
  try {
    return factor_product(prefactor_factors(which, p, mut), p.q(), p.t(), uniform_caps(w.lmax, w.xmax));
  } catch (const DomainError& e) {
    throw DegenerateParameterError(std::string("prefactor has a pole: ") + e.what());
  }
}

/// The right-hand side operator A1 gamma A2 gamma A3 f(Lambda, x/(tqQ)).
template <class F>
SeriesOperator<F> nonstat_operator(const ParamPoint<F>& p, Mutation mut = Mutation::None) {
  using Op = SeriesOperator<F>;
  const F q = p.q(), t = p.t();
  F shift = mut == Mutation::ShiftArgument ? t * q : t * q * p.Q;
  auto kernel = [p, mut](int which) {
    return Op::multiply(
        [p, mut, which](const Caps& c) {
          try {
            return factor_product(prefactor_factors(which, p, mut), p.q(), p.t(), c);
          } catch (const DomainError& e) {
            throw DegenerateParameterError(std::string("prefactor has a pole: ") + e.what());
          }
        },
        LowBound{0, 1}, "A" + std::to_string(which));
  };
  return Op::compose({Op::rescale(F(1), inverse(shift)), kernel(3), Op::gamma(q), kernel(2), Op::gamma(q), kernel(1)});
}

/// Bound obeyed by the wavefunction: x-degree >= -a in Lambda-row a.
inline constexpr LowBound kPsiBound{0, 1};

template <class F>
BiSeries<F> nonstat_rhs(const BiSeries<F>& psi, const DegreeWindow& w, const ParamPoint<F>& p,
                        Mutation mut = Mutation::None) {
  return nonstat_operator(p, mut).apply(psi, uniform_caps(w.lmax, w.xmax), kPsiBound);
}

/// Outcome of a series identity check.
template <class F>
struct IdentityReport {
  bool pass = false;
  DegreeWindow requested;
  DegreeWindow certified;
  Caps input_caps;
  EqualityReport<F> residual;

  std::string describe() const {
    std::string s = "requested " + to_string(requested) + ", certified " + to_string(certified);
    if (!input_caps.empty()) s += ", input caps " + SeriesOperator<F>::caps_string(input_caps);
    return s + ": " + (pass ? "residual 0" : residual.describe());
  }
};

/// Psi(t Lambda, x) against the right-hand side on the window.
template <class F>
IdentityReport<F> verify_theorem20(const DegreeWindow& w, const ParamPoint<F>& point, Mutation mut = Mutation::None,
                                   int threads = 0) {
  w.validate();
  ParamPoint<F> p = point.higgsed();
  auto op = nonstat_operator(p, mut);
  Caps target = uniform_caps(w.lmax, w.xmax);
  Caps need = detail::caps_max(op.need(target, kPsiBound), target);
  BiSeries<F> psi;
  try {
    psi = higgs_psi(p, need, threads);
  } catch (const DomainError& e) {
    throw DegenerateParameterError(std::string("wavefunction has a pole: ") + e.what());
  }
  BiSeries<F> lhs = psi.rescaled(p.t(), F(1));
  BiSeries<F> rhs = op.apply(psi, target, kPsiBound);
  IdentityReport<F> rep;
  rep.requested = w;
  rep.input_caps = need;
  DegreeWindow cl = lhs.certified_window(w.lmax, w.xmin), cr = rhs.certified_window(w.lmax, w.xmin);
  rep.certified = DegreeWindow{std::min(cl.lmax, cr.lmax), w.xmin, std::min(cl.xmax, cr.xmax)};
  rep.residual = series_equal(lhs, rhs, rep.certified);
  rep.pass = rep.residual.equal && rep.certified.lmax >= w.lmax && rep.certified.xmax >= w.xmax;
  return rep;
}

// ---- Toda operators ----

template <class F>
struct TodaParams {
  F q{1}, t{1}, Q{1};
};

/// The kernel 1/(phi(-x/Q) phi(-q Lambda/x)).
template <class F>
std::vector<QFactor<F>> toda_kernel_factors(const TodaParams<F>& p) {
  return {QFactor<F>{false, {-inverse(p.Q), 0, 1}, true}, QFactor<F>{false, {-p.q, 1, -1}, true}};
}

/// H f = gamma K gamma f(Lambda, x/(tqQ)).
template <class F>
SeriesOperator<F> toda_H_operator(const TodaParams<F>& p) {
  using Op = SeriesOperator<F>;
  auto k = Op::multiply([p](const Caps& c) { return factor_product(toda_kernel_factors(p), p.q, p.t, c); },
                        LowBound{0, 1}, "K");
  return Op::compose({Op::rescale(F(1), inverse(p.t * p.q * p.Q)), Op::gamma(p.q), k, Op::gamma(p.q)});
}

/// f(qx) + tQ f(x/q) + t x f + (Lambda/x) f.
template <class F>
SeriesOperator<F> toda_hamiltonian_operator(const TodaParams<F>& p, Mutation mut = Mutation::None) {
  using Op = SeriesOperator<F>;
  F c = mut == Mutation::TodaHamiltonian ? p.t * p.t * p.Q : p.t * p.Q;
  return Op::sum({Op::pshift(p.q, 1), Op::pshift(p.q, -1), Op::shift(0, 1), Op::shift(1, -1)}, {F(1), c, p.t, F(1)});
}

template <class F>
BiSeries<F> toda_H_apply(const BiSeries<F>& f, const DegreeWindow& w, const TodaParams<F>& p,
                         LowBound in = kPsiBound) {
  return toda_H_operator(p).apply(f, uniform_caps(w.lmax, w.xmax), in);
}

template <class F>
BiSeries<F> toda_hamiltonian_apply(const BiSeries<F>& f, const TodaParams<F>& p, Mutation mut = Mutation::None) {
  auto op = toda_hamiltonian_operator(p, mut);
  Caps target;
  int extra = f.lambda_complete() ? 1 : 0;
  for (int a = 0; a <= f.lmax() + extra; ++a) {
    int c = kInf;
    if (a <= f.lmax()) c = f.cap(a);
    if (a >= 1) c = std::min(c, cap_add(f.cap(a - 1), -1));
    target.push_back(c);
  }
  BiSeries<F> out = op.apply_exact(f, target);
  out.set_lambda_complete(f.lambda_complete());
  return out;
}

/// First nonzero coefficient of d among rows 0..target.size()-1 up to target.
template <class F>
std::optional<std::tuple<int, int, F>> first_nonzero(const BiSeries<F>& d, const Caps& target) {
  for (int a = 0; a < static_cast<int>(target.size()); ++a) {
    if (!d.has_row(a)) break;
    auto r = d.row_or_zero(a);
    for (std::size_t k = 0; k < r.c.size(); ++k) {
      int b = r.lo + static_cast<int>(k);
      if (b > target[static_cast<std::size_t>(a)]) break;
      if (!is_zero(r.c[k])) return std::make_tuple(a, b, r.c[k]);
    }
  }
  return std::nullopt;
}

struct CommutatorReport {
  bool pass = true;
  int monomials = 0;
  DegreeWindow output;
  std::string failure;
};

/// [H, H_Toda] on every monomial Lambda^a x^b of the window, compared on rows
/// 0..lmax+1 up to x^{xmax+1}.
template <class F>
CommutatorReport commutator_check(const DegreeWindow& w, const TodaParams<F>& p, Mutation mut = Mutation::None,
                                  int threads = 0) {
  using Op = SeriesOperator<F>;
  Op H = toda_H_operator(p), HT = toda_hamiltonian_operator(p, mut);
  Op left = Op::compose({HT, H}), right = Op::compose({H, HT});
  Caps target = uniform_caps(w.lmax + 1, w.xmax + 1);
  std::vector<std::pair<int, int>> basis;
  for (int a = 0; a <= w.lmax; ++a)
    for (int b = w.xmin; b <= w.xmax; ++b) basis.emplace_back(a, b);
  std::vector<std::string> fail(basis.size());
  auto work = [&](std::size_t i) {
    auto [a, b] = basis[i];
    auto m = BiSeries<F>::monomial(F(1), a, b);
    BiSeries<F> d = left.apply_exact(m, target) - right.apply_exact(m, target);
    if (auto nz = first_nonzero(d, target))
      fail[i] = "on Lambda^" + std::to_string(a) + " x^" + std::to_string(b) + ": coefficient (" +
                std::to_string(std::get<0>(*nz)) + "," + std::to_string(std::get<1>(*nz)) + ") = " +
                to_string(std::get<2>(*nz));
  };
  int n = threads > 0 ? threads : detail::thread_count();
  std::vector<std::future<void>> jobs;
  for (int k = 0; k < n; ++k)
    jobs.push_back(std::async(std::launch::async, [&, k] {
      for (std::size_t i = static_cast<std::size_t>(k); i < basis.size(); i += static_cast<std::size_t>(n)) work(i);
    }));
  for (auto& j : jobs) j.get();
  CommutatorReport rep;
  rep.monomials = static_cast<int>(basis.size());
  rep.output = DegreeWindow{w.lmax + 1, w.xmin - w.lmax - 2, w.xmax + 1};
  for (const auto& f : fail)
    if (!f.empty()) {
      rep.pass = false;
      rep.failure = f;
      break;
    }
  return rep;
}

/// The series with constant term 1 solving Psi(t Lambda, x) = H Psi(Lambda, x),
/// rows 0..lmax; row a is computed from x^{-a} up to x^{xmax + lmax - a}.
template <class F>
BiSeries<F> solve_toda(int lmax, int xmax, const TodaParams<F>& p) {
  if (lmax < 0) throw UsageError("negative lmax");
  const F& q = p.q;
  const F& t = p.t;
  int imax = xmax + 2 * lmax + 1;
  std::vector<F> pinv(static_cast<std::size_t>(std::max(imax, lmax)) + 1);
  {
    F poch(1), qk(1);
    pinv[0] = F(1);
    for (std::size_t k = 1; k < pinv.size(); ++k) {
      qk = qk * q;
      poch = poch * (F(1) - qk);
      if (is_zero(poch)) throw DegenerateParameterError("q is a root of unity");
      pinv[k] = inverse(poch);
    }
  }
  F mQ = -inverse(p.Q), mq = -q;
  auto kernel = [&](int j, int b) -> F {  // coefficient of Lambda^j x^b
    int i = b + j;
    if (j < 0 || i < 0) return F(0);
    return pow(mQ, i) * pinv[static_cast<std::size_t>(i)] * pow(mq, j) * pinv[static_cast<std::size_t>(j)];
  };
  F shift = inverse(t * q * p.Q);
  auto gam = [&](int b) { return pow(q, static_cast<long>(b) * (b + 1) / 2); };
  auto weight = [&](int b) { return gam(b) * pow(shift, b); };

  Caps caps(static_cast<std::size_t>(lmax) + 1);
  for (int a = 0; a <= lmax; ++a) caps[static_cast<std::size_t>(a)] = xmax + lmax - a;
  BiSeries<F> s = BiSeries<F>::zero(caps);
  std::vector<std::vector<F>> c(static_cast<std::size_t>(lmax) + 1);
  auto coef = [&](int a, int b) -> F {
    if (b < -a) return F(0);
    return c[static_cast<std::size_t>(a)][static_cast<std::size_t>(b + a)];
  };
  for (int a = 0; a <= lmax; ++a) {
    auto& row = c[static_cast<std::size_t>(a)];
    row.assign(static_cast<std::size_t>(caps[static_cast<std::size_t>(a)] + a) + 1, F(0));
    F ta = pow(t, a);
    for (int b = -a; b <= caps[static_cast<std::size_t>(a)]; ++b) {
      if (a == 0 && b == 0) {
        row[static_cast<std::size_t>(a)] = F(1);
        continue;
      }
      std::vector<F> acc;
      for (int a2 = 0; a2 <= a; ++a2)
        for (int b2 = -a2; b2 <= b + (a - a2); ++b2) {
          if (a2 == a && b2 >= b) break;
          F cv = coef(a2, b2);
          if (is_zero(cv)) continue;
          F k = kernel(a - a2, b - b2);
          if (is_zero(k)) continue;
          acc.push_back(k * weight(b2) * cv);
        }
      F pivot = ta - gam(b) * weight(b);
      if (is_zero(pivot))
        throw DegenerateParameterError("resonant coefficient (" + std::to_string(a) + "," + std::to_string(b) + ")");
      if (!acc.empty()) row[static_cast<std::size_t>(b + a)] = gam(b) * field_sum(acc) / pivot;
    }
    auto& r = s.mutable_row(a);
    r.lo = -a;
    r.c = row;
    r.trim();
  }
  return s;
}

// ---- W-representation ----

/// gamma K_m gamma with K_m = 1/(phi(-q^-m t^-m x/Q^{m+1}) phi(-q^{m+1} t^-1 Q^m Lambda/x)).
template <class F>
SeriesOperator<F> wrep_factor(int m, const TodaParams<F>& p) {
  using Op = SeriesOperator<F>;
  F cx = -inverse(pow(p.q, m) * pow(p.t, m) * pow(p.Q, m + 1));
  F cl = -(pow(p.q, m + 1) * pow(p.Q, m) / p.t);
  std::vector<QFactor<F>> fs{QFactor<F>{false, {cx, 0, 1}, true}, QFactor<F>{false, {cl, 1, -1}, true}};
  auto k = Op::multiply([fs, p](const Caps& c) { return factor_product(fs, p.q, p.t, c); }, LowBound{0, 1},
                        "K" + std::to_string(m));
  return Op::compose({Op::gamma(p.q), k, Op::gamma(p.q)});
}

/// Factors m = M..0 applied to 1 (m = 0 outermost).
template <class F>
BiSeries<F> wrep_partial(int M, const DegreeWindow& w, const TodaParams<F>& p) {
  if (M < 0) throw UsageError("M must be nonnegative");
  std::vector<SeriesOperator<F>> ops;
  for (int m = M; m >= 0; --m) ops.push_back(wrep_factor(m, p));
  return SeriesOperator<F>::compose(std::move(ops)).apply_exact(BiSeries<F>::one(), uniform_caps(w.lmax, w.xmax));
}

/// Warnings for parameters outside t > 1, qtQ > 1, 1/(qQ) > 1.
inline std::vector<std::string> wrep_region_warnings(const TodaParams<Rational>& p) {
  std::vector<std::string> out;
  if (!(p.t > Rational(1))) out.push_back("t <= 1");
  if (!(p.q * p.t * p.Q > Rational(1))) out.push_back("q t Q <= 1");
  if (!(p.q * p.Q < Rational(1)) || !(p.q * p.Q > Rational(0))) out.push_back("1/(q Q) <= 1");
  return out;
}

struct WrepCoefficient {
  int dl = 0, dx = 0;
  Rational exact;
  std::vector<Rational> errors;  // |partial_M - exact| for M = 0..Mmax
  bool decreasing = true;
};

struct WrepReport {
  bool pass = true;
  int mmax = 0;
  DegreeWindow window;
  std::vector<std::string> warnings;
  std::vector<WrepCoefficient> coefficients;
  std::string failure;
};

/// Tracks every coefficient of the window for M = 0..mmax against solve_toda.
/// Errors must decrease strictly (a coefficient whose error vanishes must stay
/// exact), and the final error must be at most a tenth of the initial one.
inline WrepReport wrep_convergence(int mmax, const DegreeWindow& w, const TodaParams<Rational>& p) {
  WrepReport rep;
  rep.mmax = mmax;
  rep.window = w;
  rep.warnings = wrep_region_warnings(p);
  BiSeries<Rational> exact = solve_toda(w.lmax, w.xmax, p);
  std::vector<BiSeries<Rational>> partial;
  for (int M = 0; M <= mmax; ++M) partial.push_back(wrep_partial(M, w, p));
  for (int a = 0; a <= w.lmax; ++a)
    for (int b = w.xmin; b <= w.xmax; ++b) {
      WrepCoefficient c;
      c.dl = a;
      c.dx = b;
      c.exact = exact.extract(a, b);
      for (const auto& s : partial) {
        Rational e = s.extract(a, b) - c.exact;
        c.errors.push_back(e < Rational(0) ? -e : e);
      }
      for (std::size_t k = 1; k < c.errors.size(); ++k) {
        const Rational& prev = c.errors[k - 1];
        const Rational& cur = c.errors[k];
        bool ok = prev.is_zero() ? cur.is_zero() : cur < prev;
        if (!ok) c.decreasing = false;
      }
      bool tenfold = c.errors.back() * Rational(10) <= c.errors.front();
      if ((!c.decreasing || !tenfold) && rep.pass) {
        rep.pass = false;
        rep.failure = "coefficient (" + std::to_string(a) + "," + std::to_string(b) + ") errors " +
                      c.errors.front().to_string() + " -> " + c.errors.back().to_string();
      }
      rep.coefficients.push_back(std::move(c));
    }
  return rep;
}

}  // namespace qvir
