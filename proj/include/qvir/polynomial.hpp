#pragma once

// Sparse multivariate Laurent polynomials with rational coefficients.
//
// Terms are kept sorted in descending lexicographic order of exponent
// vectors (symbol 0 most significant), with no zero coefficients. This is
// the canonical form used for equality and for printing.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qvir/errors.hpp"
#include "qvir/rational.hpp"

namespace qvir {

inline constexpr std::size_t kMaxSymbols = 16;

namespace modp {

inline constexpr std::uint64_t kP = 2305843009213693951ULL;  // 2^61 - 1

inline std::uint64_t add(std::uint64_t a, std::uint64_t b) { return (a + b) % kP; }
inline std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return (a + kP - b) % kP; }
inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % kP);
}
inline std::uint64_t pow(std::uint64_t a, unsigned long e) {
  std::uint64_t r = 1;
  for (; e; e >>= 1, a = mul(a, a))
    if (e & 1) r = mul(r, a);
  return r;
}
inline std::uint64_t inv(std::uint64_t a) { return pow(a, kP - 2); }
/// Fixed nonzero residue used for symbol i.
inline std::uint64_t point(std::size_t i) { return 1000003ULL * (i + 1) * (i + 7) + 12345ULL * i + 97ULL; }

}  // namespace modp


/// Ordered, immutable list of symbol names.
class SymbolTable {
 public:
  explicit SymbolTable(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() > kMaxSymbols)
      throw UsageError("symbol table holds at most " + std::to_string(kMaxSymbols) + " symbols");
    for (std::size_t i = 0; i < names_.size(); ++i)
      for (std::size_t j = i + 1; j < names_.size(); ++j)
        if (names_[i] == names_[j]) throw UsageError("duplicate symbol '" + names_[i] + "'");
  }

  static std::shared_ptr<const SymbolTable> make(std::vector<std::string> names) {
    return std::make_shared<const SymbolTable>(std::move(names));
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<std::size_t> index_of(const std::string& n) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == n) return i;
    return std::nullopt;
  }

  std::size_t require(const std::string& n) const {
    auto i = index_of(n);
    if (!i) throw UsageError("symbol '" + n + "' is not in the table");
    return *i;
  }

 private:
  std::vector<std::string> names_;
};

using TablePtr = std::shared_ptr<const SymbolTable>;

struct Monomial {
  std::array<std::int16_t, kMaxSymbols> e{};

  static Monomial unit() { return {}; }
  static Monomial var(std::size_t i, int power = 1) {
    Monomial m;
    m.e[i] = static_cast<std::int16_t>(power);
    return m;
  }

  bool is_unit() const {
    return std::all_of(e.begin(), e.end(), [](std::int16_t x) { return x == 0; });
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r;
    for (std::size_t i = 0; i < kMaxSymbols; ++i) r.e[i] = static_cast<std::int16_t>(a.e[i] + b.e[i]);
    return r;
  }
  friend Monomial operator/(const Monomial& a, const Monomial& b) {
    Monomial r;
    for (std::size_t i = 0; i < kMaxSymbols; ++i) r.e[i] = static_cast<std::int16_t>(a.e[i] - b.e[i]);
    return r;
  }
  Monomial pow(int k) const {
    Monomial r;
    for (std::size_t i = 0; i < kMaxSymbols; ++i) r.e[i] = static_cast<std::int16_t>(e[i] * k);
    return r;
  }
  Monomial inverse() const { return pow(-1); }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.e == b.e; }
  friend bool operator!=(const Monomial& a, const Monomial& b) { return a.e != b.e; }
  /// Lexicographic, symbol 0 most significant.
  friend bool operator<(const Monomial& a, const Monomial& b) { return a.e < b.e; }
  friend bool operator>(const Monomial& a, const Monomial& b) { return b.e < a.e; }
};

struct Term {
  Monomial m;
  Rational c;
};

class Poly {
 public:
  Poly() = default;
  Poly(const Rational& c) {  // NOLINT(google-explicit-constructor)
    if (!c.is_zero()) terms_.push_back({Monomial::unit(), c});
  }
  Poly(long c) : Poly(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  static Poly monomial(const Monomial& m, const Rational& c = Rational(1)) {
    Poly p;
    if (!c.is_zero()) p.terms_.push_back({m, c});
    return p;
  }
  /// Builds from unsorted terms, combining duplicates.
  static Poly from_terms(std::vector<Term> ts) {
    Poly p;
    p.terms_ = std::move(ts);
    p.normalize();
    return p;
  }

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].m.is_unit()); }
  bool is_monomial() const { return terms_.size() == 1; }
  Rational constant_value() const {
    for (const auto& t : terms_)
      if (t.m.is_unit()) return t.c;
    return Rational(0);
  }
  const Term& lead() const { return terms_.front(); }

  friend Poly operator+(const Poly& a, const Poly& b) { return merge(a, b, false); }
  friend Poly operator-(const Poly& a, const Poly& b) { return merge(a, b, true); }
  friend Poly operator-(const Poly& a) {
    Poly r = a;
    for (auto& t : r.terms_) t.c = -t.c;
    return r;
  }
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }

  /// Multiplies every term by c * m; order is preserved.
  Poly scaled(const Rational& c, const Monomial& m) const {
    if (c.is_zero()) return {};
    Poly r;
    r.terms_.reserve(terms_.size());
    for (const auto& t : terms_) r.terms_.push_back({t.m * m, t.c * c});
    return r;
  }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.size() == 1) return b.scaled(a.terms_[0].c, a.terms_[0].m);
    if (b.size() == 1) return a.scaled(b.terms_[0].c, b.terms_[0].m);
    // Sort exponent keys only, then accumulate each group of equal monomials.
    const std::size_t nb = b.size();
    std::vector<std::pair<Monomial, std::uint32_t>> keys;
    keys.reserve(a.size() * nb);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < nb; ++j)
        keys.emplace_back(a.terms_[i].m * b.terms_[j].m, static_cast<std::uint32_t>(i * nb + j));
    std::sort(keys.begin(), keys.end(), [](const auto& x, const auto& y) { return y.first < x.first; });
    Poly r;
    r.terms_.reserve(keys.size());
    mpq_class acc, prod;
    for (std::size_t k = 0; k < keys.size();) {
      std::size_t e = k;
      acc = 0;
      for (; e < keys.size() && keys[e].first == keys[k].first; ++e) {
        const auto idx = keys[e].second;
        mpq_mul(prod.get_mpq_t(), a.terms_[idx / nb].c.gmp().get_mpq_t(), b.terms_[idx % nb].c.gmp().get_mpq_t());
        acc += prod;
      }
      if (sgn(acc) != 0) r.terms_.push_back({keys[k].first, Rational(acc)});
      k = e;
    }
    return r;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  Poly pow(unsigned k) const {
    Poly r(1);
    Poly base = *this;
    while (k) {
      if (k & 1u) r *= base;
      k >>= 1u;
      if (k) base *= base;
    }
    return r;
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
      if (a.terms_[i].m != b.terms_[i].m || a.terms_[i].c != b.terms_[i].c) return false;
    return true;
  }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
  /// Total order used to sort denominator factors.
  friend bool operator<(const Poly& a, const Poly& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (a.terms_[i].m != b.terms_[i].m) return a.terms_[i].m > b.terms_[i].m;
      if (a.terms_[i].c != b.terms_[i].c) return a.terms_[i].c < b.terms_[i].c;
    }
    return a.size() < b.size();
  }

  /// Componentwise minimum exponent over all terms (unit for zero).
  Monomial min_exponents() const {
    if (terms_.empty()) return {};
    Monomial r = terms_[0].m;
    for (const auto& t : terms_)
      for (std::size_t i = 0; i < kMaxSymbols; ++i) r.e[i] = std::min(r.e[i], t.m.e[i]);
    return r;
  }
  Monomial max_exponents() const {
    if (terms_.empty()) return {};
    Monomial r = terms_[0].m;
    for (const auto& t : terms_)
      for (std::size_t i = 0; i < kMaxSymbols; ++i) r.e[i] = std::max(r.e[i], t.m.e[i]);
    return r;
  }

  /// Necessary condition for f | *this: the images in Z_p[v] after fixing
  /// every other symbol at a pseudo-random residue must divide. False means
  /// certainly not divisible; true is inconclusive.
  bool may_divide(const Poly& f) const {
    const Monomial fmin = f.min_exponents(), fmax = f.max_exponents();
    std::size_t var = 0;
    for (std::size_t i = 1; i < kMaxSymbols; ++i)
      if (fmax.e[i] - fmin.e[i] > fmax.e[var] - fmin.e[var]) var = i;
    if (fmax.e[var] == fmin.e[var]) return true;
    auto fi = f.univariate_image(var), ni = univariate_image(var);
    if (!fi || !ni) return true;
    auto& a = *ni;
    auto& b = *fi;
    while (!b.empty() && b.back() == 0) b.pop_back();
    std::size_t z = 0;
    while (z < b.size() && b[z] == 0) ++z;
    b.erase(b.begin(), b.begin() + static_cast<long>(z));
    if (b.empty()) return true;
    if (b.size() == 1) return true;
    const std::uint64_t binv = modp::inv(b.back());
    for (std::size_t top = a.size(); top >= b.size(); --top) {
      std::uint64_t c = modp::mul(a[top - 1], binv);
      if (c == 0) continue;
      std::size_t off = top - b.size();
      for (std::size_t j = 0; j < b.size(); ++j) a[off + j] = modp::sub(a[off + j], modp::mul(c, b[j]));
    }
    for (std::size_t j = 0; j + 1 < b.size() && j < a.size(); ++j)
      if (a[j] != 0) return false;
    return true;
  }

  /// Exact quotient this / f in the Laurent ring, if it exists. `f` must have
  /// no monomial content; then divisibility is decided by lex division of the
  /// exponent-shifted polynomial.
  std::optional<Poly> divide_exact(const Poly& f) const {
    if (f.is_zero()) throw DomainError("division by the zero polynomial");
    if (is_zero()) return Poly{};
    if (f.size() == 1) return scaled(f.lead().c.inverse(), f.lead().m.inverse());
    if (!may_divide(f)) return std::nullopt;
    const Monomial fmin = f.min_exponents();
    const Monomial fmax = f.max_exponents();
    const Monomial pmin = min_exponents();
    const Monomial pmax = max_exponents();
    for (std::size_t i = 0; i < kMaxSymbols; ++i)
      if (pmax.e[i] - pmin.e[i] < fmax.e[i] - fmin.e[i]) return std::nullopt;
    // Work with nonnegative exponents: shift both to their minima.
    Poly div = f.scaled(Rational(1), fmin.inverse());
    std::map<Monomial, Rational, std::greater<>> rem;
    for (const auto& t : terms_) rem.emplace_hint(rem.end(), t.m / pmin, t.c);
    const Term& dl = div.lead();
    const Rational dinv = dl.c.inverse();
    std::vector<Term> quot;
    while (!rem.empty()) {
      auto it = rem.begin();
      Monomial qm = it->first / dl.m;
      for (std::size_t i = 0; i < kMaxSymbols; ++i)
        if (qm.e[i] < 0) return std::nullopt;
      Rational qc = it->second * dinv;
      rem.erase(it);
      for (std::size_t j = 1; j < div.terms_.size(); ++j) {
        const Term& d = div.terms_[j];
        auto [pos, fresh] = rem.try_emplace(d.m * qm, Rational(0));
        pos->second -= qc * d.c;
        if (pos->second.is_zero()) rem.erase(pos);
      }
      quot.push_back({qm, std::move(qc)});
    }
    Poly q;
    q.terms_ = std::move(quot);  // generated in descending order
    return q.scaled(Rational(1), pmin / fmin);
  }

  /// Rational content c and primitive integer polynomial P with this = c*P
  /// and positive leading coefficient in P.
  std::pair<Rational, Poly> primitive_part() const {
    if (is_zero()) return {Rational(0), Poly{}};
    mpz_class l = 1, g = 0;
    for (const auto& t : terms_) {
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.c.gmp().get_den_mpz_t());
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.c.gmp().get_num_mpz_t());
    }
    Rational content(mpq_class(g, l));
    if (lead().c.sign() < 0) content = -content;
    return {content, scaled(content.inverse(), Monomial::unit())};
  }

  int degree_in(std::size_t var) const {
    int d = 0;
    bool first = true;
    for (const auto& t : terms_) {
      if (first || t.m.e[var] > d) d = t.m.e[var];
      first = false;
    }
    return d;
  }
  int min_degree_in(std::size_t var) const {
    int d = 0;
    bool first = true;
    for (const auto& t : terms_) {
      if (first || t.m.e[var] < d) d = t.m.e[var];
      first = false;
    }
    return d;
  }
  bool depends_on(std::size_t var) const {
    return std::any_of(terms_.begin(), terms_.end(), [&](const Term& t) { return t.m.e[var] != 0; });
  }

  /// Keeps terms whose exponent of `var` satisfies pred.
  template <class Pred>
  Poly filter(std::size_t var, Pred pred) const {
    Poly r;
    for (const auto& t : terms_)
      if (pred(t.m.e[var])) r.terms_.push_back(t);
    return r;
  }

  /// Substitutes rational values for all symbols.
  template <class ValueFn>
  Rational evaluate(std::size_t nvars, ValueFn&& value_of) const {
    std::vector<Rational> vals(nvars);
    for (std::size_t i = 0; i < nvars; ++i) vals[i] = value_of(i);
    Rational acc(0);
    for (const auto& t : terms_) {
      Rational v = t.c;
      for (std::size_t i = 0; i < nvars; ++i) {
        if (t.m.e[i] == 0) continue;
        if (t.m.e[i] < 0 && vals[i].is_zero())
          throw EvaluationPoleError("negative power of a symbol evaluated at zero");
        v *= vals[i].pow(t.m.e[i]);
      }
      acc += v;
    }
    return acc;
  }

  std::string to_string(const SymbolTable* table) const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : terms_) {
      Rational c = t.c;
      bool neg = c.sign() < 0;
      if (neg) c = -c;
      if (first) {
        if (neg) out += "-";
      } else {
        out += neg ? "-" : "+";
      }
      first = false;
      std::string mono;
      for (std::size_t i = 0; i < kMaxSymbols; ++i) {
        if (t.m.e[i] == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += table ? table->name(i) : ("x" + std::to_string(i));
        if (t.m.e[i] != 1) mono += "^" + std::to_string(t.m.e[i]);
      }
      if (mono.empty()) {
        out += c.to_string();
      } else if (c.is_one()) {
        out += mono;
      } else {
        out += c.to_string() + "*" + mono;
      }
    }
    return out;
  }

 private:
  /// Coefficients in the symbol `var` (shifted to start at its minimum
  /// exponent) after substituting fixed residues mod p for the others.
  /// Empty optional when a coefficient denominator vanishes mod p.
  std::optional<std::vector<std::uint64_t>> univariate_image(std::size_t var) const {
    const int lo = min_degree_in(var), hi = degree_in(var);
    std::vector<std::uint64_t> out(static_cast<std::size_t>(hi - lo) + 1, 0);
    for (const auto& t : terms_) {
      std::uint64_t den = mpz_fdiv_ui(t.c.gmp().get_den_mpz_t(), modp::kP);
      if (den == 0) return std::nullopt;
      mpz_class num = abs(t.c.gmp().get_num());
      std::uint64_t v = modp::mul(mpz_fdiv_ui(num.get_mpz_t(), modp::kP), modp::inv(den));
      if (t.c.sign() < 0) v = modp::sub(0, v);
      for (std::size_t i = 0; i < kMaxSymbols; ++i) {
        if (i == var || t.m.e[i] == 0) continue;
        std::uint64_t x = modp::point(i);
        v = modp::mul(v, modp::pow(t.m.e[i] > 0 ? x : modp::inv(x), static_cast<unsigned>(std::abs(t.m.e[i]))));
      }
      auto& slot = out[static_cast<std::size_t>(t.m.e[var] - lo)];
      slot = modp::add(slot, v);
    }
    return out;
  }

  void normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.m > b.m; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
      if (!out.empty() && out.back().m == t.m) {
        out.back().c += t.c;
      } else {
        if (!out.empty() && out.back().c.is_zero()) out.pop_back();
        out.push_back(std::move(t));
      }
    }
    if (!out.empty() && out.back().c.is_zero()) out.pop_back();
    terms_ = std::move(out);
  }

  static Poly merge(const Poly& a, const Poly& b, bool subtract) {
    Poly r;
    r.terms_.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a.terms_[i].m > b.terms_[j].m)) {
        r.terms_.push_back(a.terms_[i++]);
      } else if (i == a.size() || b.terms_[j].m > a.terms_[i].m) {
        Term t = b.terms_[j++];
        if (subtract) t.c = -t.c;
        r.terms_.push_back(std::move(t));
      } else {
        Rational c = subtract ? a.terms_[i].c - b.terms_[j].c : a.terms_[i].c + b.terms_[j].c;
        if (!c.is_zero()) r.terms_.push_back({a.terms_[i].m, std::move(c)});
        ++i;
        ++j;
      }
    }
    return r;
  }

  std::vector<Term> terms_;
};

}  // namespace qvir
