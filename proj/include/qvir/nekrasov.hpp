#pragma once

// Partitions, Nekrasov factors and the four-partition instanton sum.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qvir/errors.hpp"
#include "qvir/field.hpp"
#include "qvir/params.hpp"
#include "qvir/series.hpp"

namespace qvir {

struct Partition {
  std::vector<int> parts;

  Partition() = default;
  explicit Partition(std::vector<int> p) : parts(std::move(p)) {
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts[i] < 1) throw UsageError("partition parts must be positive");
      if (i > 0 && parts[i] > parts[i - 1]) throw UsageError("partition parts must be weakly decreasing");
    }
  }

  int size() const {
    int n = 0;
    for (int p : parts) n += p;
    return n;
  }
  int length() const { return static_cast<int>(parts.size()); }
  bool empty() const { return parts.empty(); }
  /// lambda_i with 1-based i; zero beyond the length.
  int part(int i) const { return i >= 1 && i <= length() ? parts[static_cast<std::size_t>(i - 1)] : 0; }

  Partition transpose() const {
    Partition t;
    int cols = parts.empty() ? 0 : parts[0];
    for (int j = 1; j <= cols; ++j) {
      int c = 0;
      for (int p : parts)
        if (p >= j) ++c;
      t.parts.push_back(c);
    }
    return t;
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + std::to_string(parts[i]);
    return s + "]";
  }

  friend auto operator<=>(const Partition&, const Partition&) = default;
};

/// All partitions of n, largest first part first ([2] before [1,1]).
inline std::vector<Partition> partitions_of(int n) {
  if (n < 0) throw UsageError("partitions of a negative number");
  std::vector<Partition> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int rest, int maxpart) -> void {
    if (rest == 0) {
      out.emplace_back(cur);
      return;
    }
    for (int p = std::min(rest, maxpart); p >= 1; --p) {
      cur.push_back(p);
      self(self, rest - p, p);
      cur.pop_back();
    }
  };
  rec(rec, n, n);
  return out;
}

/// Exponent pairs (A, B) with N_{lam,eta}(z) = prod (1 - z q^A t^B).
inline std::vector<std::pair<int, int>> nekrasov_box_exponents(const Partition& lam, const Partition& eta) {
  Partition lt = lam.transpose(), et = eta.transpose();
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(lam.size() + eta.size()));
  for (int i = 1; i <= lam.length(); ++i)
    for (int j = 1; j <= lam.part(i); ++j) out.emplace_back(lam.part(i) - j, et.part(j) - i + 1);
  for (int i = 1; i <= eta.length(); ++i)
    for (int j = 1; j <= eta.part(i); ++j) out.emplace_back(-eta.part(i) + j - 1, -lt.part(j) + i);
  return out;
}

namespace detail {

inline const std::vector<std::pair<int, int>>& memo_box_exponents(const Partition& lam, const Partition& eta) {
  static std::shared_mutex mu;
  static std::map<std::pair<Partition, Partition>, std::vector<std::pair<int, int>>> cache;
  auto key = std::make_pair(lam, eta);
  {
    std::shared_lock lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto val = nekrasov_box_exponents(lam, eta);
  std::unique_lock lock(mu);
  return cache.try_emplace(std::move(key), std::move(val)).first->second;
}

/// Table of q^A t^B for |A|, |B| <= bound.
template <class F>
class PowerTable {
 public:
  PowerTable(const F& q, const F& t, int bound) : bound_(bound), width_(2 * bound + 1) {
    std::vector<F> qp(static_cast<std::size_t>(width_)), tp(static_cast<std::size_t>(width_));
    F qi = inverse(q), ti = inverse(t);
    qp[static_cast<std::size_t>(bound)] = F(1);
    tp[static_cast<std::size_t>(bound)] = F(1);
    for (int k = 1; k <= bound; ++k) {
      qp[static_cast<std::size_t>(bound + k)] = qp[static_cast<std::size_t>(bound + k - 1)] * q;
      qp[static_cast<std::size_t>(bound - k)] = qp[static_cast<std::size_t>(bound - k + 1)] * qi;
      tp[static_cast<std::size_t>(bound + k)] = tp[static_cast<std::size_t>(bound + k - 1)] * t;
      tp[static_cast<std::size_t>(bound - k)] = tp[static_cast<std::size_t>(bound - k + 1)] * ti;
    }
    table_.resize(static_cast<std::size_t>(width_) * static_cast<std::size_t>(width_));
    for (int a = 0; a < width_; ++a)
      for (int b = 0; b < width_; ++b)
        table_[static_cast<std::size_t>(a * width_ + b)] = qp[static_cast<std::size_t>(a)] * tp[static_cast<std::size_t>(b)];
  }
  const F& at(int a, int b) const {
    if (a < -bound_ || a > bound_ || b < -bound_ || b > bound_) throw Error("internal: power table overflow");
    return table_[static_cast<std::size_t>((a + bound_) * width_ + (b + bound_))];
  }

 private:
  int bound_, width_;
  std::vector<F> table_;
};

template <class F>
F nekrasov_value(const Partition& lam, const Partition& eta, const F& z, const PowerTable<F>& pw) {
  F r(1);
  for (const auto& [a, b] : memo_box_exponents(lam, eta)) {
    r = r * (F(1) - z * pw.at(a, b));
    if (is_zero(r)) return r;
  }
  return r;
}

inline int thread_count() {
  if (const char* env = std::getenv("QVIR_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return std::min(n, 256);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hc, 1u, 8u));
}

/// Running sum that batches rational-function additions.
template <class F>
struct Accumulator {
  std::vector<F> pending;
  F total{0};
  void add(F x) {
    if constexpr (std::same_as<F, Rational>) {
      total += x;
    } else {
      pending.push_back(std::move(x));
      if (pending.size() >= 48) flush();
    }
  }
  void flush() {
    if (pending.empty()) return;
    pending.push_back(total);
    total = field_sum(pending);
    pending.clear();
  }
  F value() {
    flush();
    return total;
  }
};

}  // namespace detail

/// N_{lam,eta}(z) = prod_{(i,j) in lam}(1 - z q^{lam_i - j} t^{eta'_j - i + 1})
///                * prod_{(i,j) in eta}(1 - z q^{-eta_i + j - 1} t^{-lam'_j + i}).
template <class F>
F nekrasov_factor(const Partition& lam, const Partition& eta, const F& z, const F& q, const F& t) {
  F r(1);
  for (const auto& [a, b] : detail::memo_box_exponents(lam, eta)) r = r * (F(1) - z * pow(q, a) * pow(t, b));
  return r;
}

/// Instanton sum Z over four partitions, certified on `caps` (row a of the
/// result collects |mu1|+|mu2| = a, x-degree |nu1|+|nu2| - a).
template <class F>
BiSeries<F> z_expand(const ParamPoint<F>& p, const Caps& caps, int threads = 0) {
  const int L = static_cast<int>(caps.size()) - 1;
  if (L < 0) throw UsageError("empty window");
  int nu_max = -1;
  for (int a = 0; a <= L; ++a) nu_max = std::max(nu_max, std::min(caps[static_cast<std::size_t>(a)], kInf / 2) + a);
  if (nu_max >= kInf / 4) throw UsageError("instanton sum needs finite x-degree caps");
  if (threads <= 0) threads = detail::thread_count();

  const F q = p.q(), t = p.t(), v = p.v(), w = p.w();
  const F p1 = p.p1(), p2 = p.p2();
  detail::PowerTable<F> pw(q, t, std::max(nu_max, L) + 2);

  using Pair = std::pair<Partition, Partition>;
  auto pairs_of = [](int n) {
    std::vector<Pair> out;
    for (int k = n; k >= 0; --k)
      for (const auto& a : partitions_of(k))
        for (const auto& b : partitions_of(n - k)) out.emplace_back(a, b);
    return out;
  };
  auto slot = [](const Pair& pr, int a) -> const Partition& { return a == 1 ? pr.first : pr.second; };
  auto degenerate = [&](const std::string& what) {
    throw DegenerateParameterError("vanishing " + what + " denominator at the parameter point");
  };

  // nu-pair weights: p1^{|nu|} prod N_{0,nu_b}(v f+_a/n_b) / prod N_{nu_a,nu_b}(n_a/n_b).
  struct Weighted {
    Pair pr;
    int size;
    F value;
  };
  std::vector<Weighted> nus, mus;
  F p1n(1);
  for (int n = 0; n <= std::max(nu_max, -1); ++n) {
    for (auto& pr : pairs_of(n)) {
      F num(1), den(1);
      for (int a = 1; a <= 2 && !is_zero(num); ++a)
        for (int b = 1; b <= 2 && !is_zero(num); ++b)
          num = num * detail::nekrasov_value(Partition{}, slot(pr, b), v * p.fplus(a) / p.n(b), pw);
      if (is_zero(num)) continue;
      for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b) den = den * detail::nekrasov_value(slot(pr, a), slot(pr, b), p.n(a) / p.n(b), pw);
      if (is_zero(den)) degenerate("vector-multiplet");
      nus.push_back({std::move(pr), n, num / den * p1n});
    }
    p1n = p1n * p1;
  }
  F p2n(1);
  for (int m = 0; m <= L; ++m) {
    for (auto& pr : pairs_of(m)) {
      F num(1), den(1);
      for (int a = 1; a <= 2 && !is_zero(num); ++a)
        for (int b = 1; b <= 2 && !is_zero(num); ++b)
          num = num * detail::nekrasov_value(slot(pr, b), Partition{}, v * p.m(b) / p.fminus(a), pw);
      if (is_zero(num)) continue;
      for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b) den = den * detail::nekrasov_value(slot(pr, a), slot(pr, b), p.m(a) / p.m(b), pw);
      if (is_zero(den)) degenerate("vector-multiplet");
      mus.push_back({std::move(pr), m, num / den * p2n});
    }
    p2n = p2n * p2;
  }
  std::array<std::array<F, 2>, 2> hz;
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) hz[a - 1][b - 1] = w * p.n(a) / p.m(b);

  // Fixed chunking of the nu list keeps the summation order (and hence the
  // printed form of rational-function coefficients) independent of threads.
  const std::size_t chunk = 64;
  const std::size_t nchunks = (nus.size() + chunk - 1) / chunk;
  auto width = [&](int a) { return caps[static_cast<std::size_t>(a)] + a + 1; };  // dx from -a..caps[a]
  using Acc = std::vector<std::vector<detail::Accumulator<F>>>;
  std::vector<Acc> partial(nchunks);
  auto run_chunk = [&](std::size_t ci) {
    Acc acc(static_cast<std::size_t>(L) + 1);
    for (int a = 0; a <= L; ++a) acc[static_cast<std::size_t>(a)].resize(static_cast<std::size_t>(std::max(width(a), 0)));
    std::size_t end = std::min(nus.size(), (ci + 1) * chunk);
    for (std::size_t i = ci * chunk; i < end; ++i) {
      const Weighted& nu = nus[i];
      for (const Weighted& mu : mus) {
        int a = mu.size;
        int dx = nu.size - a;
        if (dx > caps[static_cast<std::size_t>(a)]) continue;
        F h = nu.value * mu.value;
        for (int x = 1; x <= 2 && !is_zero(h); ++x)
          for (int y = 1; y <= 2 && !is_zero(h); ++y)
            h = h * detail::nekrasov_value(slot(nu.pr, x), slot(mu.pr, y), hz[x - 1][y - 1], pw);
        if (is_zero(h)) continue;
        acc[static_cast<std::size_t>(a)][static_cast<std::size_t>(dx + a)].add(std::move(h));
      }
    }
    partial[ci] = std::move(acc);
  };
  if (threads <= 1 || nchunks <= 1) {
    for (std::size_t ci = 0; ci < nchunks; ++ci) run_chunk(ci);
  } else {
    std::mutex mu;
    std::size_t next = 0;
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    for (int k = 0; k < std::min<int>(threads, static_cast<int>(nchunks)); ++k) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t ci;
          {
            std::lock_guard lock(mu);
            if (next >= nchunks || failure) return;
            ci = next++;
          }
          try {
            run_chunk(ci);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<std::tuple<int, int, F>> terms;
  for (int a = 0; a <= L; ++a) {
    for (int k = 0; k < width(a); ++k) {
      std::vector<F> parts;
      for (auto& acc : partial) {
        F val = acc[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)].value();
        if (!is_zero(val)) parts.push_back(std::move(val));
      }
      if (parts.empty()) continue;
      F total = field_sum(parts);
      if (!is_zero(total)) terms.emplace_back(a, k - a, std::move(total));
    }
  }
  return BiSeries<F>::from_terms(terms, caps);
}

/// One summand of Z for the tuple (nu1, nu2, mu1, mu2), evaluated directly
/// from the definition (without the factorization used by z_expand). The
/// monomial Lambda^{|mu|} x^{|nu|-|mu|} is not included.
template <class F>
F instanton_term(const ParamPoint<F>& p, const std::array<Partition, 4>& tuple) {
  const F q = p.q(), t = p.t(), v = p.v(), w = p.w();
  const Partition* nu[2] = {&tuple[0], &tuple[1]};
  const Partition* mu[2] = {&tuple[2], &tuple[3]};
  F num(1), den(1);
  for (int a = 1; a <= 2; ++a) {
    for (int b = 1; b <= 2; ++b) {
      num = num * nekrasov_factor(Partition{}, *nu[b - 1], v * p.fplus(a) / p.n(b), q, t);
      num = num * nekrasov_factor(*nu[a - 1], *mu[b - 1], w * p.n(a) / p.m(b), q, t);
      num = num * nekrasov_factor(*mu[b - 1], Partition{}, v * p.m(b) / p.fminus(a), q, t);
      den = den * nekrasov_factor(*nu[a - 1], *nu[b - 1], p.n(a) / p.n(b), q, t);
      den = den * nekrasov_factor(*mu[a - 1], *mu[b - 1], p.m(a) / p.m(b), q, t);
    }
  }
  if (is_zero(den)) throw DegenerateParameterError("vanishing denominator in the instanton term");
  int nsize = tuple[0].size() + tuple[1].size(), msize = tuple[2].size() + tuple[3].size();
  return pow(p.p1(), nsize) * pow(p.p2(), msize) * num / den;
}

/// The wavefunction: the instanton sum at phi1 = t/v, phi2 = v.
template <class F>
BiSeries<F> higgs_psi(const ParamPoint<F>& p, const Caps& caps, int threads = 0) {
  return z_expand(p.higgsed(), caps, threads);
}

// ---- parameter map ----

template <class F>
struct MapInput {
  std::array<F, 4> qalpha{F(1), F(1), F(1), F(1)};  // q^{alpha_1..4}
  std::array<int, 3> N{0, 0, 0};
};

template <class F>
struct GaugeParams {
  F Q{1}, T1{1}, T2{1}, T3{1}, T4{1}, phi1{1}, phi2{1};
};

/// Solves q^{a1} = v^-2 T1 T2 Q, q^{a2} = v^-2 T4/T3, q^{a3} = v^-2 phi2/phi1,
/// q^{a4} = v^-2 T1/T2, t^{N1} = v/T1, t^{N2} = v phi1, t^{N3} = v T3.
template <class F>
GaugeParams<F> param_map_forward(const MapInput<F>& in, const F& u, const F& s) {
  F v = u / s, t = s * s, v2 = v * v;
  for (const auto& qa : in.qalpha)
    if (is_zero(qa)) throw NoSolutionError("q^alpha must be nonzero");
  GaugeParams<F> g;
  g.T1 = v * pow(t, -in.N[0]);
  g.phi1 = pow(t, in.N[1]) / v;
  g.T3 = pow(t, in.N[2]) / v;
  g.T2 = g.T1 / (v2 * in.qalpha[3]);
  g.Q = v2 * in.qalpha[0] / (g.T1 * g.T2);
  g.T4 = v2 * in.qalpha[1] * g.T3;
  g.phi2 = v2 * in.qalpha[2] * g.phi1;
  return g;
}

template <class F>
MapInput<F> param_map_inverse(const GaugeParams<F>& g, const F& u, const F& s, int search = 64) {
  F v = u / s, t = s * s, v2i = inverse(v * v);
  for (const F* x : {&g.Q, &g.T1, &g.T2, &g.T3, &g.T4, &g.phi1, &g.phi2})
    if (is_zero(*x)) throw NoSolutionError("gauge parameters must be nonzero");
  MapInput<F> in;
  in.qalpha[0] = v2i * g.T1 * g.T2 * g.Q;
  in.qalpha[1] = v2i * g.T4 / g.T3;
  in.qalpha[2] = v2i * g.phi2 / g.phi1;
  in.qalpha[3] = v2i * g.T1 / g.T2;
  auto log_t = [&](const F& val, const char* name) {
    for (int n = 0; n <= search; ++n) {
      if (pow(t, n) == val) return n;
      if (n > 0 && pow(t, -n) == val) return -n;
    }
    throw NoSolutionError(std::string(name) + " is not an integral power of t");
  };
  in.N[0] = log_t(v / g.T1, "v/T1");
  in.N[1] = log_t(v * g.phi1, "v*phi1");
  in.N[2] = log_t(v * g.T3, "v*T3");
  return in;
}

// ---- Toda limit ----

template <class F, class G, class Fn>
BiSeries<G> map_series(const BiSeries<F>& s, Fn fn) {
  std::vector<std::tuple<int, int, G>> terms;
  for (int a = 0; a <= s.lmax(); ++a) {
    const auto& r = s.row(a);
    for (int dx = r.lo; !r.empty() && dx <= r.hi(); ++dx) {
      F c = r.at(dx);
      if (!is_zero(c)) terms.emplace_back(a, dx, fn(c));
    }
  }
  return BiSeries<G>::from_terms(terms, s.caps());
}

/// Limit T_i = eps * c_i -> 0 of the wavefunction. `base` supplies u, s, Q
/// as elements of `table`, which must contain the symbol "eps". Each
/// coefficient is checked to have no pole at eps = 0.
inline BiSeries<RationalFunction> toda_limit(const ParamPoint<RationalFunction>& base,
                                             const std::array<Rational, 4>& c, const TablePtr& table,
                                             const Caps& caps, int threads = 0) {
  std::size_t eps_index = table->require("eps");
  RationalFunction eps = RationalFunction::symbol(table, "eps");
  for (const auto& ci : c)
    if (ci.is_zero()) throw UsageError("Toda limit ratios must be nonzero");
  ParamPoint<RationalFunction> p = base;
  p.T1 = eps * RationalFunction(c[0]);
  p.T2 = eps * RationalFunction(c[1]);
  p.T3 = eps * RationalFunction(c[2]);
  p.T4 = eps * RationalFunction(c[3]);
  BiSeries<RationalFunction> psi = higgs_psi(p, caps, threads);
  return map_series<RationalFunction, RationalFunction>(
      psi, [&](const RationalFunction& x) { return x.at_zero(eps_index); });
}

}  // namespace qvir
