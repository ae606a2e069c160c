#pragma once

// Truncated bivariate Laurent series in (Lambda, x).
//
// A series stores rows a = 0..lmax (the Lambda-degree). Row a is a Laurent
// series in x that is certified for every x-degree <= cap(a), and is zero
// below its first stored coefficient ("lower-complete"). A cap of kInf means
// the row is known exactly. When `lambda_complete` is set, all rows beyond
// lmax are known to vanish, so the series is a polynomial in Lambda.
//
// Products and inverses propagate caps conservatively: an output coefficient
// is certified only when every contributing input coefficient is.

#include <algorithm>
#include <climits>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qvir/errors.hpp"
#include "qvir/field.hpp"

namespace qvir {

inline constexpr int kInf = 1 << 28;

inline int cap_add(long a, long b) {
  if (a >= kInf || b >= kInf) return kInf;
  long r = a + b;
  if (r <= -kInf) return -kInf;
  return static_cast<int>(std::min<long>(r, kInf - 1));
}

struct DegreeWindow {
  int lmax = 0;
  int xmin = 0;
  int xmax = 0;

  void validate() const {
    if (lmax < 0) throw UsageError("window lmax must be nonnegative");
    if (xmin > xmax) throw UsageError("window xmin exceeds xmax");
  }
  friend bool operator==(const DegreeWindow&, const DegreeWindow&) = default;
};

inline std::string to_string(const DegreeWindow& w) {
  return "lmax=" + std::to_string(w.lmax) + " x=[" + std::to_string(w.xmin) + "," + std::to_string(w.xmax) + "]";
}

/// Certified x-degree caps per Lambda-row.
using Caps = std::vector<int>;

inline Caps uniform_caps(int lmax, int xmax) { return Caps(static_cast<std::size_t>(lmax) + 1, xmax); }

/// Sum of a list of field elements; rational functions share one common
/// denominator.
inline Rational field_sum(std::vector<Rational>& xs) {
  Rational r(0);
  for (const auto& x : xs) r += x;
  return r;
}
inline RationalFunction field_sum(std::vector<RationalFunction>& xs) {
  if (xs.size() == 1) return xs[0];
  return RationalFunction::sum(xs);
}

template <class F>
bool field_equal(const F& a, const F& b) {
  return a == b;
}

template <class F>
class BiSeries {
 public:
  struct Row {
    int lo = 0;
    int cap = kInf;
    std::vector<F> c;

    bool empty() const { return c.empty(); }
    int hi() const { return lo + static_cast<int>(c.size()) - 1; }
    /// First possibly nonzero degree (cap + 1 when nothing nonzero is known).
    int first() const { return c.empty() ? cap_add(cap, 1) : lo; }
    F at(int dx) const {
      if (c.empty() || dx < lo || dx > hi()) return F(0);
      return c[static_cast<std::size_t>(dx - lo)];
    }
    void trim() {
      std::size_t b = 0, e = c.size();
      while (b < e && is_zero(c[b])) ++b;
      while (e > b && is_zero(c[e - 1])) --e;
      if (b == e) {
        c.clear();
        lo = 0;
        return;
      }
      if (b > 0 || e < c.size()) {
        c = std::vector<F>(std::make_move_iterator(c.begin() + static_cast<long>(b)),
                           std::make_move_iterator(c.begin() + static_cast<long>(e)));
        lo += static_cast<int>(b);
      }
    }
    void clamp(int new_cap) {
      if (new_cap >= cap) return;
      cap = new_cap;
      if (!c.empty() && hi() > cap) {
        if (cap < lo) {
          c.clear();
          lo = 0;
        } else {
          c.resize(static_cast<std::size_t>(cap - lo + 1));
          trim();
        }
      }
    }
  };

  BiSeries() = default;

  /// Series with rows 0..lmax, all zero and known up to `caps`.
  static BiSeries zero(const Caps& caps) {
    BiSeries s;
    s.rows_.resize(caps.size());
    for (std::size_t a = 0; a < caps.size(); ++a) s.rows_[a].cap = caps[a];
    return s;
  }

  /// c * Lambda^a * x^b, exact (a polynomial in Lambda).
  static BiSeries monomial(const F& c, int a, int b) {
    if (a < 0) throw UsageError("negative Lambda-degree");
    BiSeries s;
    s.rows_.resize(static_cast<std::size_t>(a) + 1);
    s.complete_ = true;
    s.rows_[static_cast<std::size_t>(a)].lo = b;
    s.rows_[static_cast<std::size_t>(a)].c = {c};
    s.rows_[static_cast<std::size_t>(a)].trim();
    return s;
  }

  static BiSeries one() { return monomial(F(1), 0, 0); }

  /// Builds a series from (a, b, c) terms; rows 0..lmax are certified up to
  /// `caps`, terms outside are dropped.
  static BiSeries from_terms(const std::vector<std::tuple<int, int, F>>& terms, const Caps& caps,
                             bool lambda_complete = false) {
    BiSeries s = zero(caps);
    s.complete_ = lambda_complete;
    for (const auto& [a, b, c] : terms) {
      if (a < 0) throw UsageError("negative Lambda-degree");
      if (a > s.lmax()) {
        if (lambda_complete) throw UsageError("term beyond lmax of a Lambda-polynomial");
        continue;
      }
      if (b > caps[static_cast<std::size_t>(a)]) continue;
      s.add_at(a, b, c);
    }
    for (auto& r : s.rows_) r.trim();
    return s;
  }

  int lmax() const { return static_cast<int>(rows_.size()) - 1; }
  bool lambda_complete() const { return complete_; }
  const Row& row(int a) const { return rows_.at(static_cast<std::size_t>(a)); }
  Row& mutable_row(int a) { return rows_.at(static_cast<std::size_t>(a)); }
  std::vector<Row>& rows() { return rows_; }
  const std::vector<Row>& rows() const { return rows_; }
  void set_lambda_complete(bool v) { complete_ = v; }

  /// Row a, including the implicit zero rows of a Lambda-polynomial.
  bool has_row(int a) const { return a >= 0 && (a <= lmax() || complete_); }
  Row row_or_zero(int a) const {
    if (a <= lmax()) return row(a);
    if (!complete_) throw OutOfWindowError("Lambda-degree " + std::to_string(a) + " beyond lmax");
    return Row{0, kInf, {}};
  }

  int cap(int a) const { return row_or_zero(a).cap; }
  Caps caps() const {
    Caps c;
    for (const auto& r : rows_) c.push_back(r.cap);
    return c;
  }

  /// Smallest x-degree with a nonzero coefficient among rows 0..lmax.
  int min_x() const {
    int m = kInf;
    for (const auto& r : rows_)
      if (!r.empty()) m = std::min(m, r.lo);
    return m;
  }

  /// Least integer d with x-degree >= -a*d in every row a >= 1 (rows of
  /// degree zero must have nonnegative x-degrees for d to exist).
  std::optional<int> depth_bound() const {
    int d = 0;
    for (int a = 0; a <= lmax(); ++a) {
      const Row& r = row(a);
      if (r.empty() || r.lo >= 0) continue;
      if (a == 0) return std::nullopt;
      d = std::max(d, (-r.lo + a - 1) / a);
    }
    return d;
  }

  bool covers(const DegreeWindow& w) const {
    if (w.lmax > lmax() && !complete_) return false;
    for (int a = 0; a <= std::min(w.lmax, lmax()); ++a)
      if (row(a).cap < w.xmax) return false;
    return true;
  }

  /// Largest window [xmin, xmax] with lmax <= `lmax_limit` that is certified.
  DegreeWindow certified_window(int lmax_limit, int xmin) const {
    DegreeWindow w;
    w.lmax = complete_ ? lmax_limit : std::min(lmax_limit, lmax());
    w.xmin = xmin;
    int x = kInf;
    for (int a = 0; a <= std::min(w.lmax, lmax()); ++a) x = std::min(x, row(a).cap);
    w.xmax = x;
    return w;
  }

  F extract(int a, int dx) const {
    if (a < 0 || !has_row(a)) throw OutOfWindowError("coefficient (" + std::to_string(a) + "," + std::to_string(dx) +
                                                     ") lies beyond the tracked Lambda-degree");
    Row r = row_or_zero(a);
    if (dx > r.cap)
      throw OutOfWindowError("coefficient (" + std::to_string(a) + "," + std::to_string(dx) +
                             ") lies beyond the certified x-degree " + std::to_string(r.cap));
    return r.at(dx);
  }

  /// Nonzero terms inside the window, sorted by (a, dx).
  std::vector<std::tuple<int, int, F>> terms(const DegreeWindow& w) const {
    if (!covers(w)) throw OutOfWindowError("series does not cover window " + to_string(w));
    std::vector<std::tuple<int, int, F>> out;
    for (int a = 0; a <= std::min(w.lmax, lmax()); ++a) {
      const Row& r = row(a);
      for (int dx = std::max(w.xmin, r.lo); dx <= std::min(w.xmax, r.empty() ? w.xmin - 1 : r.hi()); ++dx) {
        F c = r.at(dx);
        if (!is_zero(c)) out.emplace_back(a, dx, std::move(c));
      }
    }
    return out;
  }

  /// Restricts to rows 0..lmax and caps at most `caps`.
  BiSeries restricted(const Caps& want) const {
    BiSeries s;
    int l = static_cast<int>(want.size()) - 1;
    if (!complete_ && l > lmax()) throw OutOfWindowError("restriction beyond tracked Lambda-degree");
    s.rows_.resize(want.size());
    for (int a = 0; a <= l; ++a) {
      s.rows_[static_cast<std::size_t>(a)] = row_or_zero(a);
      s.rows_[static_cast<std::size_t>(a)].clamp(want[static_cast<std::size_t>(a)]);
    }
    s.complete_ = false;
    return s;
  }

  // ---- arithmetic ----

  friend BiSeries operator+(const BiSeries& x, const BiSeries& y) { return combine(x, y, false); }
  friend BiSeries operator-(const BiSeries& x, const BiSeries& y) { return combine(x, y, true); }

  BiSeries scaled(const F& c) const {
    BiSeries s = *this;
    for (auto& r : s.rows_) {
      for (auto& v : r.c) v = v * c;
      r.trim();
    }
    return s;
  }

  /// Coefficient (a, b) multiplied by cL^a * cx^b.
  BiSeries rescaled(const F& cL, const F& cx) const {
    if (is_zero(cL) || is_zero(cx)) throw UsageError("rescaling by zero");
    BiSeries s = *this;
    F la(1);
    for (auto& r : s.rows_) {
      if (!r.empty()) {
        F p = la * pow(cx, r.lo);
        for (auto& v : r.c) {
          v = v * p;
          p = p * cx;
        }
      }
      la = la * cL;
    }
    return s;
  }

  /// Coefficient (a, b) multiplied by f(a, b).
  BiSeries diagonal(const std::function<F(int, int)>& f) const {
    BiSeries s = *this;
    for (int a = 0; a <= lmax(); ++a) {
      Row& r = s.rows_[static_cast<std::size_t>(a)];
      for (std::size_t k = 0; k < r.c.size(); ++k)
        if (!is_zero(r.c[k])) r.c[k] = r.c[k] * f(a, r.lo + static_cast<int>(k));
      r.trim();
    }
    return s;
  }

  /// Multiplication by Lambda^i x^j (i >= 0).
  BiSeries shifted(int i, int j) const {
    if (i < 0) throw UsageError("negative Lambda shift");
    BiSeries s;
    s.complete_ = complete_;
    s.rows_.resize(rows_.size() + static_cast<std::size_t>(i));
    for (int a = 0; a < i; ++a) s.rows_[static_cast<std::size_t>(a)] = Row{0, kInf, {}};
    for (int a = 0; a <= lmax(); ++a) {
      Row r = row(a);
      r.lo += j;
      r.cap = cap_add(r.cap, j);
      s.rows_[static_cast<std::size_t>(a + i)] = std::move(r);
    }
    return s;
  }

  /// Product, computing only rows <= want.size()-1 and x-degrees <= want.
  static BiSeries multiply(const BiSeries& x, const BiSeries& y, const Caps* want = nullptr) {
    int l;
    bool complete = false;
    if (x.complete_ && y.complete_) {
      l = x.lmax() + y.lmax();
      complete = true;
    } else if (x.complete_) {
      l = y.lmax();
    } else if (y.complete_) {
      l = x.lmax();
    } else {
      l = std::min(x.lmax(), y.lmax());
    }
    if (want && static_cast<int>(want->size()) - 1 < l) {
      l = static_cast<int>(want->size()) - 1;
      complete = false;
    }
    BiSeries s;
    s.complete_ = complete;
    s.rows_.resize(static_cast<std::size_t>(l) + 1);
    for (int a = 0; a <= l; ++a) {
      int limit = want ? (*want)[static_cast<std::size_t>(a)] : kInf;
      std::vector<const Row*> xs, ys;
      std::vector<Row> hold;
      hold.reserve(2 * static_cast<std::size_t>(a) + 2);
      for (int a1 = 0; a1 <= a; ++a1) {
        if (!x.has_row(a1) || !y.has_row(a - a1)) continue;
        if (a1 > x.lmax() || a - a1 > y.lmax()) continue;  // implicit zero rows
        xs.push_back(&x.row(a1));
        ys.push_back(&y.row(a - a1));
      }
      s.rows_[static_cast<std::size_t>(a)] = convolve_rows(xs, ys, limit);
    }
    return s;
  }

  friend BiSeries operator*(const BiSeries& x, const BiSeries& y) { return multiply(x, y); }

  /// Multiplicative inverse; row 0 must be a power series in x with an
  /// invertible constant term. `want` bounds the work for infinite rows.
  BiSeries inverse_series(const Caps* want = nullptr) const {
    const Row& r0 = row(0);
    if (r0.empty() || r0.lo != 0)
      throw NonInvertibleError("series has zero constant term or negative x-powers at Lambda^0");
    int l = want ? static_cast<int>(want->size()) - 1 : lmax();
    if (!complete_) l = std::min(l, lmax());
    auto limit_of = [&](int a) { return want ? (*want)[static_cast<std::size_t>(a)] : kInf; };

    // need[a]: precision of row a required by the requested rows above it.
    std::vector<int> need(static_cast<std::size_t>(l) + 1);
    for (int a = l; a >= 0; --a) {
      int n = limit_of(a);
      for (int b = a + 1; b <= l; ++b) {
        if (b - a > lmax()) break;
        int f = row(b - a).first();
        if (f >= kInf) continue;
        n = std::max(n, cap_add(need[static_cast<std::size_t>(b)], -static_cast<long>(f)));
      }
      need[static_cast<std::size_t>(a)] = n;
    }
    // Rows of the inverse start no lower than a * dmin.
    int dmin = 0;
    for (int a1 = 1; a1 <= std::min(l, lmax()); ++a1) {
      int f = row(a1).first();
      if (f >= kInf || f >= 0) continue;
      dmin = std::min(dmin, -((-f + a1 - 1) / a1));
    }
    int cap0 = need[0];
    for (int b = 1; b <= l; ++b)
      cap0 = std::max(cap0, cap_add(need[static_cast<std::size_t>(b)], -static_cast<long>(b) * dmin));

    Row inv0;
    F a0i = inverse(r0.c[0]);
    if (r0.cap >= kInf && r0.c.size() == 1) {
      inv0 = Row{0, kInf, {a0i}};
    } else {
      int n = std::min(cap0, r0.cap);
      if (n >= kInf) throw UsageError("inverse needs a finite x-degree bound");
      inv0.lo = 0;
      inv0.cap = n;
      inv0.c.assign(static_cast<std::size_t>(n) + 1, F(0));
      inv0.c[0] = a0i;
      for (int k = 1; k <= n; ++k) {
        std::vector<F> acc;
        for (int j = 1; j <= std::min(k, r0.hi()); ++j) {
          const F& aj = r0.c[static_cast<std::size_t>(j)];
          const F& bk = inv0.c[static_cast<std::size_t>(k - j)];
          if (is_zero(aj) || is_zero(bk)) continue;
          acc.push_back(aj * bk);
        }
        if (!acc.empty()) inv0.c[static_cast<std::size_t>(k)] = -(field_sum(acc) * a0i);
      }
      inv0.trim();
    }

    BiSeries s;
    s.rows_.resize(static_cast<std::size_t>(l) + 1);
    s.rows_[0] = inv0;
    s.rows_[0].clamp(need[0]);
    for (int a = 1; a <= l; ++a) {
      std::vector<const Row*> xs, ys;
      for (int a1 = 1; a1 <= std::min(a, lmax()); ++a1) {
        xs.push_back(&row(a1));
        ys.push_back(&s.rows_[static_cast<std::size_t>(a - a1)]);
      }
      Row ra = convolve_rows(xs, ys, need[static_cast<std::size_t>(a)]);
      for (auto& v : ra.c) v = -v;
      std::vector<const Row*> p{&inv0}, q{&ra};
      s.rows_[static_cast<std::size_t>(a)] = convolve_rows(p, q, need[static_cast<std::size_t>(a)]);
    }
    for (int a = 0; a <= l; ++a) s.rows_[static_cast<std::size_t>(a)].clamp(limit_of(a));
    return s;
  }

  std::string debug_string() const {
    std::ostringstream os;
    for (int a = 0; a <= lmax(); ++a) {
      const Row& r = row(a);
      os << "row " << a << " cap " << (r.cap >= kInf ? std::string("inf") : std::to_string(r.cap)) << ":";
      for (int dx = r.lo; !r.empty() && dx <= r.hi(); ++dx) {
        F c = r.at(dx);
        if (!is_zero(c)) os << " [" << dx << "] " << to_string(c);
      }
      os << "\n";
    }
    return os.str();
  }

 private:
  void add_at(int a, int b, const F& c) {
    Row& r = rows_[static_cast<std::size_t>(a)];
    if (r.c.empty()) {
      r.lo = b;
      r.c = {c};
      return;
    }
    if (b < r.lo) {
      r.c.insert(r.c.begin(), static_cast<std::size_t>(r.lo - b), F(0));
      r.lo = b;
    }
    if (b > r.hi()) r.c.resize(static_cast<std::size_t>(b - r.lo + 1), F(0));
    r.c[static_cast<std::size_t>(b - r.lo)] = r.c[static_cast<std::size_t>(b - r.lo)] + c;
  }

  static BiSeries combine(const BiSeries& x, const BiSeries& y, bool subtract) {
    BiSeries s;
    int l;
    if (x.complete_ && y.complete_) {
      l = std::max(x.lmax(), y.lmax());
      s.complete_ = true;
    } else if (x.complete_) {
      l = y.lmax();
    } else if (y.complete_) {
      l = x.lmax();
    } else {
      l = std::min(x.lmax(), y.lmax());
    }
    s.rows_.resize(static_cast<std::size_t>(l) + 1);
    for (int a = 0; a <= l; ++a) {
      Row rx = x.row_or_zero(a), ry = y.row_or_zero(a);
      Row out;
      out.cap = std::min(rx.cap, ry.cap);
      int lo = kInf, hi = -kInf;
      if (!rx.empty()) lo = std::min(lo, rx.lo), hi = std::max(hi, rx.hi());
      if (!ry.empty()) lo = std::min(lo, ry.lo), hi = std::max(hi, ry.hi());
      hi = std::min(hi, out.cap);
      if (lo <= hi) {
        out.lo = lo;
        out.c.resize(static_cast<std::size_t>(hi - lo + 1));
        for (int dx = lo; dx <= hi; ++dx) {
          F v = subtract ? rx.at(dx) - ry.at(dx) : rx.at(dx) + ry.at(dx);
          out.c[static_cast<std::size_t>(dx - lo)] = std::move(v);
        }
      }
      out.trim();
      s.rows_[static_cast<std::size_t>(a)] = std::move(out);
    }
    return s;
  }

  /// sum_k xs[k] * ys[k] as x-series, certified up to the combined cap.
  static Row convolve_rows(const std::vector<const Row*>& xs, const std::vector<const Row*>& ys, int limit) {
    Row out;
    int cap = kInf;
    int lo = kInf, hi = -kInf;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const Row& p = *xs[k];
      const Row& q = *ys[k];
      int c = std::min(cap_add(p.cap, q.first()), cap_add(q.cap, p.first()));
      cap = std::min(cap, c);
      if (p.empty() || q.empty()) continue;
      lo = std::min(lo, p.lo + q.lo);
      hi = std::max(hi, p.hi() + q.hi());
    }
    cap = std::min(cap, limit);
    out.cap = cap;
    hi = std::min(hi, cap);
    if (lo > hi) return out;
    std::size_t n = static_cast<std::size_t>(hi - lo + 1);
    std::vector<std::vector<F>> acc(n);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const Row& p = *xs[k];
      const Row& q = *ys[k];
      if (p.empty() || q.empty()) continue;
      for (std::size_t i = 0; i < p.c.size(); ++i) {
        if (is_zero(p.c[i])) continue;
        int di = p.lo + static_cast<int>(i);
        for (std::size_t j = 0; j < q.c.size(); ++j) {
          int d = di + q.lo + static_cast<int>(j);
          if (d > hi) break;
          if (is_zero(q.c[j])) continue;
          acc[static_cast<std::size_t>(d - lo)].push_back(p.c[i] * q.c[j]);
        }
      }
    }
    out.lo = lo;
    out.c.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      if (!acc[i].empty()) out.c[i] = field_sum(acc[i]);
    out.trim();
    return out;
  }

  std::vector<Row> rows_;
  bool complete_ = false;
};

/// Outcome of a windowed comparison.
template <class F>
struct EqualityReport {
  bool equal = true;
  int dl = 0, dx = 0;
  F lhs{0}, rhs{0};

  std::string describe() const {
    if (equal) return "equal";
    return "first mismatch at (" + std::to_string(dl) + "," + std::to_string(dx) + "): " + to_string(lhs) +
           " vs " + to_string(rhs);
  }
};

template <class F>
EqualityReport<F> series_equal(const BiSeries<F>& a, const BiSeries<F>& b, const DegreeWindow& w) {
  w.validate();
  if (!a.covers(w) || !b.covers(w)) throw UsageError("comparison window " + to_string(w) + " is not certified");
  EqualityReport<F> rep;
  for (int l = 0; l <= w.lmax; ++l) {
    for (int x = w.xmin; x <= w.xmax; ++x) {
      F ca = a.extract(l, x), cb = b.extract(l, x);
      if (!field_equal(ca, cb)) {
        rep.equal = false;
        rep.dl = l;
        rep.dx = x;
        rep.lhs = std::move(ca);
        rep.rhs = std::move(cb);
        return rep;
      }
    }
  }
  return rep;
}

/// Convenience wrappers matching the module vocabulary.
template <class F>
BiSeries<F> series_mul(const BiSeries<F>& a, const BiSeries<F>& b) {
  return BiSeries<F>::multiply(a, b);
}

template <class F>
BiSeries<F> series_inverse(const BiSeries<F>& a, const Caps* want = nullptr) {
  return a.inverse_series(want);
}

template <class F>
BiSeries<F> series_rescale(const BiSeries<F>& a, const F& cL, const F& cx) {
  return a.rescaled(cL, cx);
}

template <class F>
F series_extract(const BiSeries<F>& a, int dl, int dx) {
  return a.extract(dl, dx);
}

}  // namespace qvir
