#pragma once

// Rational functions over a SymbolTable.
//
// A value is N / (f1^k1 * ... * fr^kr) where N is a Laurent polynomial with
// rational coefficients and each fi is a primitive integer polynomial with
// no monomial content and a positive leading coefficient. Denominators that
// are binomials c1*m1 + c2*m2 with c1/c2 = +-1 (every q-Pochhammer factor) are
// split into cyclotomic pieces, which are irreducible; other denominators
// are kept whole. Sums use the factor-wise LCM of denominators, and factors
// that divide the numerator are cancelled by exact trial division. This is
// not a full GCD reduction, so two equal values may be stored differently;
// equality is decided by testing whether the difference is zero, which is
// exact because a zero numerator is recognised syntactically.

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qvir/errors.hpp"
#include "qvir/polynomial.hpp"
#include "qvir/rational.hpp"

namespace qvir {

namespace detail {

/// Integer coefficients of the d-th cyclotomic polynomial, low degree first.
inline const std::vector<long>& cyclotomic(int d) {
  static std::mutex mu;
  static std::map<int, std::vector<long>> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(d); it != cache.end()) return it->second;
  // Phi_e = (x^e - 1) / prod_{f | e, f < e} Phi_f, built bottom-up over divisors.
  for (int e = 1; e <= d; ++e) {
    if (d % e || cache.count(e)) continue;
    std::vector<long> num(static_cast<std::size_t>(e) + 1, 0);
    num[0] = -1;
    num[static_cast<std::size_t>(e)] = 1;
    for (int f = 1; f < e; ++f) {
      if (e % f) continue;
      const auto& den = cache.at(f);
      std::size_t dn = den.size() - 1;
      std::vector<long> q(num.size() - dn, 0);
      for (std::size_t k = num.size(); k-- > dn;) {
        long c = num[k];
        q[k - dn] = c;
        for (std::size_t j = 0; j <= dn; ++j) num[k - dn + j] -= c * den[j];
      }
      num = std::move(q);
    }
    cache[e] = std::move(num);
  }
  return cache.at(d);
}

inline int gcd_exponents(const Monomial& m) {
  int g = 0;
  for (auto x : m.e) g = std::gcd(g, static_cast<int>(x < 0 ? -x : x));
  return g;
}

/// Monomial-free primitive integer form of p with positive lead; returns
/// (unit, normalized) with p = unit * normalized and unit a single term.
inline std::pair<Poly, Poly> normalize_factor(const Poly& p) {
  Monomial mn = p.min_exponents();
  Poly shifted = p.scaled(Rational(1), mn.inverse());
  auto [content, prim] = shifted.primitive_part();
  return {Poly::monomial(mn, content), std::move(prim)};
}

/// Splits a polynomial with no monomial content into normalized factors.
/// Returns (unit, factors) with p = unit * prod(factors).
inline std::pair<Poly, std::vector<Poly>> split_factors(const Poly& p) {
  std::vector<Poly> factors;
  if (p.size() == 2) {
    const Term& hi = p.terms()[0];
    const Term& lo = p.terms()[1];
    Rational ratio = hi.c / lo.c;
    Monomial m0 = hi.m / lo.m;
    int g = gcd_exponents(m0);
    if ((ratio == Rational(-1) || ratio == Rational(1)) && g > 0) {
      Monomial base;
      for (std::size_t i = 0; i < kMaxSymbols; ++i) base.e[i] = static_cast<std::int16_t>(m0.e[i] / g);
      std::vector<int> ds;
      if (ratio == Rational(-1)) {
        for (int d = 1; d <= g; ++d)
          if (g % d == 0) ds.push_back(d);
      } else {
        for (int d = 1; d <= 2 * g; ++d)
          if ((2 * g) % d == 0 && g % d != 0) ds.push_back(d);
      }
      Poly prod(1);
      for (int d : ds) {
        const auto& coeffs = cyclotomic(d);
        std::vector<Term> ts;
        for (std::size_t i = 0; i < coeffs.size(); ++i)
          if (coeffs[i] != 0) ts.push_back({base.pow(static_cast<int>(i)), Rational(coeffs[i])});
        Poly f = Poly::from_terms(std::move(ts));
        auto [unit, norm] = normalize_factor(f);
        prod *= norm;
        factors.push_back(std::move(norm));
      }
      auto unit = p.divide_exact(prod);
      if (!unit || !unit->is_monomial()) throw Error("internal: cyclotomic split failed");
      return {*unit, std::move(factors)};
    }
  }
  auto [unit, norm] = normalize_factor(p);
  factors.push_back(std::move(norm));
  return {unit, std::move(factors)};
}

}  // namespace detail

class RationalFunction {
 public:
  using Factor = std::pair<Poly, int>;

  RationalFunction() = default;
  RationalFunction(long c) : num_(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  RationalFunction(int c) : num_(Rational(c)) {}   // NOLINT(google-explicit-constructor)
  RationalFunction(const Rational& c) : num_(c) {}  // NOLINT(google-explicit-constructor)
  RationalFunction(TablePtr table, Poly num) : table_(std::move(table)), num_(std::move(num)) {}

  static RationalFunction symbol(const TablePtr& table, const std::string& name, int power = 1) {
    return {table, Poly::monomial(Monomial::var(table->require(name), power))};
  }

  const TablePtr& table() const { return table_; }
  const Poly& numerator() const { return num_; }
  const std::vector<Factor>& denominator_factors() const { return den_; }
  Poly denominator() const {
    Poly d(1);
    for (const auto& [f, k] : den_) d *= f.pow(static_cast<unsigned>(k));
    return d;
  }

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return den_.empty() && num_.is_constant(); }
  Rational constant_value() const {
    if (!is_constant()) throw UsageError("rational function is not a constant");
    return num_.constant_value();
  }

  RationalFunction inverse() const {
    if (is_zero()) throw DomainError("inverse of the zero rational function");
    Monomial mn = num_.min_exponents();
    Poly shifted = num_.scaled(Rational(1), mn.inverse());
    auto [content, prim] = shifted.primitive_part();
    RationalFunction r;
    r.table_ = table_;
    Poly dprod = denominator();
    if (prim.is_constant()) {
      r.num_ = dprod.scaled(content.inverse(), mn.inverse());
      return r;
    }
    auto [unit, factors] = detail::split_factors(prim);
    const Term& u = unit.lead();
    r.num_ = dprod.scaled((content * u.c).inverse(), (mn * u.m).inverse());
    std::sort(factors.begin(), factors.end());
    for (auto& f : factors) {
      if (!r.den_.empty() && r.den_.back().first == f) {
        ++r.den_.back().second;
      } else {
        r.den_.emplace_back(std::move(f), 1);
      }
    }
    r.cancel();
    return r;
  }

  RationalFunction pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    RationalFunction r(1);
    r.table_ = table_;
    RationalFunction base = *this;
    while (e) {
      if (e & 1) r *= base;
      e >>= 1;
      if (e) base *= base;
    }
    return r;
  }

  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    RationalFunction r;
    r.table_ = merge_tables(a.table_, b.table_);
    if (a.is_zero() || b.is_zero()) return r;
    r.num_ = a.num_ * b.num_;
    if (b.den_.empty()) {
      r.den_ = a.den_;
    } else if (a.den_.empty()) {
      r.den_ = b.den_;
    } else {
      r.den_ = merge_factors(a.den_, b.den_);
    }
    bool cross = (!a.den_.empty() && !b.num_.is_constant()) || (!b.den_.empty() && !a.num_.is_constant());
    if (cross) r.cancel();
    return r;
  }

  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    return a * b.inverse();
  }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero()) {
      RationalFunction r = b;
      r.table_ = merge_tables(a.table_, b.table_);
      return r;
    }
    if (b.is_zero()) {
      RationalFunction r = a;
      r.table_ = merge_tables(a.table_, b.table_);
      return r;
    }
    RationalFunction r;
    r.table_ = merge_tables(a.table_, b.table_);
    if (a.den_ == b.den_) {
      r.num_ = a.num_ + b.num_;
      r.den_ = a.den_;
    } else {
      r.den_ = lcm_factors(a.den_, b.den_);
      r.num_ = a.num_ * cofactor(r.den_, a.den_) + b.num_ * cofactor(r.den_, b.den_);
    }
    r.cancel();
    return r;
  }

  friend RationalFunction operator-(const RationalFunction& a) {
    RationalFunction r = a;
    r.num_ = -r.num_;
    return r;
  }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

  RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
  RationalFunction& operator-=(const RationalFunction& o) { return *this = *this - o; }
  RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }
  RationalFunction& operator/=(const RationalFunction& o) { return *this = *this / o; }

  friend bool operator==(const RationalFunction& a, const RationalFunction& b) { return (a - b).is_zero(); }
  friend bool operator!=(const RationalFunction& a, const RationalFunction& b) { return !(a == b); }

  /// Sum of many values with one common denominator and one cancellation pass.
  static RationalFunction sum(std::span<const RationalFunction> xs) {
    RationalFunction r;
    // Group numerators by identical denominators first.
    std::vector<std::pair<const std::vector<Factor>*, Poly>> groups;
    for (const auto& x : xs) {
      r.table_ = merge_tables(r.table_, x.table_);
      if (x.is_zero()) continue;
      bool placed = false;
      for (auto& [d, n] : groups) {
        if (*d == x.den_) {
          n += x.num_;
          placed = true;
          break;
        }
      }
      if (!placed) groups.emplace_back(&x.den_, x.num_);
    }
    if (groups.empty()) return r;
    if (groups.size() == 1) {
      r.num_ = std::move(groups[0].second);
      r.den_ = *groups[0].first;
      r.cancel();
      return r;
    }
    std::vector<Factor> lcm;
    for (const auto& [d, n] : groups) lcm = lcm_factors(lcm, *d);
    Poly num;
    for (const auto& [d, n] : groups) {
      if (n.is_zero()) continue;
      num += n * cofactor(lcm, *d);
    }
    r.num_ = std::move(num);
    r.den_ = std::move(lcm);
    r.cancel();
    return r;
  }

  /// Exact substitution of rational values for every symbol in the table.
  Rational evaluate(std::span<const Rational> values) const {
    std::size_t n = table_ ? table_->size() : 0;
    if (values.size() < n) throw UsageError("evaluation point misses symbols");
    auto at = [&](std::size_t i) { return values[i]; };
    Rational d(1);
    for (const auto& [f, k] : den_) {
      Rational fv = f.evaluate(n, at);
      if (fv.is_zero()) throw EvaluationPoleError("denominator vanishes at the evaluation point");
      d *= fv.pow(k);
    }
    return num_.evaluate(n, at) / d;
  }

  /// Value at symbol `var` = 0, requiring no pole there. Denominator factors
  /// never contain a monomial factor, so the order of vanishing at var = 0
  /// is the lowest exponent of var in the numerator.
  RationalFunction at_zero(std::size_t var) const {
    if (num_.min_degree_in(var) < 0)
      throw LimitFailureError("pole at " + (table_ ? table_->name(var) : std::string("symbol")) + " = 0");
    RationalFunction r;
    r.table_ = table_;
    r.num_ = num_.filter(var, [](int e) { return e == 0; });
    Poly d(1);
    for (const auto& [f, k] : den_) {
      Poly f0 = f.filter(var, [](int e) { return e == 0; });
      d *= f0.pow(static_cast<unsigned>(k));
    }
    if (d.is_zero()) throw Error("internal: denominator factor vanished at zero");
    return r * RationalFunction(table_, d).inverse();
  }

  /// Drops numerator terms with var-degree above max_degree. Only valid when
  /// the denominator does not involve var (checked).
  RationalFunction truncate_degree(std::size_t var, int max_degree) const {
    for (const auto& [f, k] : den_)
      if (f.depends_on(var)) throw UsageError("truncation in a symbol present in the denominator");
    RationalFunction r = *this;
    r.num_ = num_.filter(var, [&](int e) { return e <= max_degree; });
    r.cancel();
    return r;
  }

  bool depends_on(std::size_t var) const {
    if (num_.depends_on(var)) return true;
    return std::any_of(den_.begin(), den_.end(), [&](const Factor& f) { return f.first.depends_on(var); });
  }

  std::string to_string() const {
    const SymbolTable* t = table_.get();
    if (den_.empty()) return num_.to_string(t);
    std::string out = "(" + num_.to_string(t) + ")";
    for (const auto& [f, k] : den_) {
      out += "/(" + f.to_string(t) + ")";
      if (k != 1) out += "^" + std::to_string(k);
    }
    return out;
  }

 private:
  static TablePtr merge_tables(const TablePtr& a, const TablePtr& b) {
    if (!a) return b;
    if (!b || a == b) return a;
    if (a->names() != b->names()) throw UsageError("operands use different symbol tables");
    return a;
  }

  static std::vector<Factor> merge_factors(const std::vector<Factor>& a, const std::vector<Factor>& b) {
    std::vector<Factor> r;
    r.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
        r.push_back(a[i++]);
      } else if (i == a.size() || b[j].first < a[i].first) {
        r.push_back(b[j++]);
      } else {
        r.emplace_back(a[i].first, a[i].second + b[j].second);
        ++i;
        ++j;
      }
    }
    return r;
  }

  static std::vector<Factor> lcm_factors(const std::vector<Factor>& a, const std::vector<Factor>& b) {
    std::vector<Factor> r;
    r.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
        r.push_back(a[i++]);
      } else if (i == a.size() || b[j].first < a[i].first) {
        r.push_back(b[j++]);
      } else {
        r.emplace_back(a[i].first, std::max(a[i].second, b[j].second));
        ++i;
        ++j;
      }
    }
    return r;
  }

  /// Product of the factors of `full` not covered by `part` (part divides full).
  static Poly cofactor(const std::vector<Factor>& full, const std::vector<Factor>& part) {
    Poly r(1);
    std::size_t j = 0;
    for (const auto& [f, k] : full) {
      int have = 0;
      while (j < part.size() && part[j].first < f) ++j;
      if (j < part.size() && part[j].first == f) have = part[j].second;
      if (k > have) r *= f.pow(static_cast<unsigned>(k - have));
    }
    return r;
  }

  void cancel() {
    if (num_.is_zero()) {
      den_.clear();
      return;
    }
    std::vector<Factor> kept;
    for (auto& [f, k] : den_) {
      while (k > 0) {
        auto q = num_.divide_exact(f);
        if (!q) break;
        num_ = std::move(*q);
        --k;
      }
      if (k > 0) kept.emplace_back(std::move(f), k);
    }
    den_ = std::move(kept);
  }

  TablePtr table_;
  Poly num_;
  std::vector<Factor> den_;
};

}  // namespace qvir
