#include <gtest/gtest.h>

#include <random>

#include "qvir/series.hpp"

using namespace qvir;

namespace {

using S = BiSeries<Rational>;
using Term = std::tuple<int, int, Rational>;

S poly(std::vector<Term> terms) {
  int l = 0;
  for (const auto& t : terms) l = std::max(l, std::get<0>(t));
  return S::from_terms(terms, Caps(static_cast<std::size_t>(l) + 1, kInf), true);
}

S random_unit_series(std::mt19937_64& rng, int lmax, int xcap) {
  std::uniform_int_distribution<int> coef(-5, 5), dx(-1, 3);
  std::vector<Term> terms = {{0, 0, Rational(1 + std::abs(coef(rng)))}};
  for (int a = 0; a <= lmax; ++a) {
    for (int k = 0; k < 3; ++k) {
      int x = dx(rng) - a;
      if (a == 0 && x < 1) x = 1;
      terms.emplace_back(a, x, Rational(coef(rng), 1 + std::abs(coef(rng))));
    }
  }
  return S::from_terms(terms, uniform_caps(lmax, xcap));
}

DegreeWindow common(const S& a, const S& b, int lmax, int xmin) {
  DegreeWindow w = a.certified_window(lmax, xmin);
  w.xmax = std::min(w.xmax, b.certified_window(lmax, xmin).xmax);
  EXPECT_GE(w.xmax, xmin);
  return w;
}

}  // namespace

TEST(Series, ProductOfPolynomials) {
  S a = poly({{0, 0, 1}, {1, 0, 1}});
  S b = poly({{0, 0, 1}, {1, 0, -1}});
  S c = a * b;
  DegreeWindow w{2, -2, 2};
  EXPECT_TRUE(series_equal(c, poly({{0, 0, 1}, {2, 0, -1}}), w).equal);
}

TEST(Series, MonomialProduct) {
  S c = S::monomial(1, 0, 1) * S::monomial(1, 1, -1);
  EXPECT_EQ(c.extract(1, 0), Rational(1));
  EXPECT_EQ(c.extract(0, 0), Rational(0));
}

TEST(Series, InverseOfOne) {
  Caps want = uniform_caps(3, 3);
  S inv = S::one().inverse_series(&want);
  EXPECT_TRUE(series_equal(inv, S::one(), DegreeWindow{3, -3, 3}).equal);
}

TEST(Series, GeometricSeries) {
  Caps want = uniform_caps(5, 2);
  S inv = poly({{0, 0, 1}, {1, 0, -1}}).inverse_series(&want);
  for (int a = 0; a <= 5; ++a) EXPECT_EQ(inv.extract(a, 0), Rational(1));
  EXPECT_THROW(inv.extract(6, 0), OutOfWindowError);
}

TEST(Series, InverseWithNegativeXPowers) {
  Rational q(3, 7);
  S a = poly({{0, 0, 1}, {1, -1, -q}});
  Caps want = uniform_caps(4, 2);
  S inv = a.inverse_series(&want);
  for (int k = 0; k <= 4; ++k) EXPECT_EQ(inv.extract(k, -k), q.pow(k));
  EXPECT_TRUE(series_equal(a * inv, S::one(), DegreeWindow{4, -6, 1}).equal);
  EXPECT_EQ((a * inv).cap(4), 1);
}

TEST(Series, InverseOracleForInfiniteRow) {
  // 1 + x/(Q(1-q)) times its reciprocal.
  Rational Q(5, 2), q(1, 3);
  Rational c = (Q * (Rational(1) - q)).inverse();
  S a = poly({{0, 0, 1}, {0, 1, c}});
  Caps want = uniform_caps(2, 6);
  S inv = a.inverse_series(&want);
  for (int k = 0; k <= 6; ++k) EXPECT_EQ(inv.extract(0, k), (-c).pow(k));
  EXPECT_TRUE(series_equal(a * inv, S::one(), DegreeWindow{2, -2, 6}).equal);
  EXPECT_THROW(inv.extract(0, 7), OutOfWindowError);
}

TEST(Series, NonInvertible) {
  S a = poly({{0, 1, 1}});
  Caps want = uniform_caps(1, 1);
  EXPECT_THROW(a.inverse_series(&want), NonInvertibleError);
}

TEST(Series, Rescale) {
  Rational t(4, 9), qQ(7, 2);
  S a = S::monomial(1, 1, -1);
  S r = a.rescaled(t, (t * qQ).inverse());
  EXPECT_EQ(r.extract(1, -1), t * t * qQ);
  EXPECT_EQ(S::monomial(1, 1, 0).rescaled(t, 1).extract(1, 0), t);
  EXPECT_EQ(S::monomial(1, 0, 1).rescaled(1, (t * qQ).inverse()).extract(0, 1), (t * qQ).inverse());
}

TEST(Series, Extract) {
  S a = poly({{0, 0, 1}, {1, 1, 3}});
  EXPECT_EQ(a.extract(1, 1), Rational(3));
  EXPECT_EQ(S::one().extract(0, 0), Rational(1));
  S trunc = S::from_terms({{0, 0, Rational(1)}}, uniform_caps(1, 4));
  EXPECT_THROW(trunc.extract(2, 0), OutOfWindowError);
  EXPECT_THROW(trunc.extract(0, 5), OutOfWindowError);
}

TEST(Series, EqualityReportsFirstMismatch) {
  S a = poly({{0, 0, 1}, {1, 0, 1}});
  S one = poly({{0, 0, 1}});
  EXPECT_TRUE(series_equal(a, a, DegreeWindow{3, -2, 2}).equal);
  EXPECT_TRUE(series_equal(a, one, DegreeWindow{0, -2, 2}).equal);
  auto rep = series_equal(a, one, DegreeWindow{1, -2, 2});
  EXPECT_FALSE(rep.equal);
  EXPECT_EQ(rep.dl, 1);
  EXPECT_EQ(rep.dx, 0);
  S trunc = S::from_terms({{0, 0, Rational(1)}}, uniform_caps(1, 1));
  EXPECT_THROW(series_equal(trunc, one, DegreeWindow{1, 0, 2}), UsageError);
}

TEST(Series, CapsShrinkUnderProduct) {
  S a = S::from_terms({{0, 0, Rational(1)}, {1, -1, Rational(2)}}, uniform_caps(2, 4));
  S b = S::from_terms({{0, 0, Rational(1)}, {0, 2, Rational(1)}}, uniform_caps(2, 4));
  S c = a * b;
  // Row 1 gets a's row-1 (starting at x^-1) times b's row 0 known to x^4.
  EXPECT_EQ(c.cap(1), 3);
  EXPECT_EQ(c.cap(0), 4);
  EXPECT_EQ(c.extract(1, 1), Rational(2));
}

TEST(Series, DepthBound) {
  S a = poly({{0, 0, 1}, {1, -1, 1}, {2, -2, 1}});
  EXPECT_EQ(a.depth_bound(), 1);
  S b = poly({{0, 0, 1}, {1, -3, 1}});
  EXPECT_EQ(b.depth_bound(), 3);
}

TEST(SeriesProperty, RingAxioms) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 15; ++trial) {
    S a = random_unit_series(rng, 3, 6), b = random_unit_series(rng, 3, 6), c = random_unit_series(rng, 3, 6);
    EXPECT_TRUE(series_equal((a * b) * c, a * (b * c), common((a * b) * c, a * (b * c), 3, -12)).equal);
    EXPECT_TRUE(series_equal(a * b, b * a, common(a * b, b * a, 3, -8)).equal);
    EXPECT_TRUE(series_equal(a * (b + c), a * b + a * c, common(a * (b + c), a * b + a * c, 3, -8)).equal);
  }
}

TEST(SeriesProperty, InverseRoundTrip) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 15; ++trial) {
    S a = random_unit_series(rng, 3, 6);
    Caps want = uniform_caps(3, 4);
    S inv = a.inverse_series(&want);
    S prod = a * inv;
    auto rep = series_equal(prod, S::one(), common(prod, S::one(), 3, -8));
    EXPECT_TRUE(rep.equal) << rep.describe();
  }
}

TEST(SeriesProperty, WindowMonotonicity) {
  std::mt19937_64 rng(31);
  S a = random_unit_series(rng, 4, 9);
  Caps small = uniform_caps(2, 3), large = uniform_caps(4, 6);
  S i1 = a.inverse_series(&small), i2 = a.inverse_series(&large);
  EXPECT_TRUE(series_equal(i1, i2, DegreeWindow{2, -10, 3}).equal);
}

TEST(SeriesSymbolic, RationalFunctionCoefficients) {
  auto t = SymbolTable::make({"u"});
  using R = BiSeries<RationalFunction>;
  RationalFunction q = parse_expression("u^2", t);
  R a = R::from_terms({{0, 0, RationalFunction(1)}, {1, -1, -q}}, Caps{kInf, kInf}, true);
  Caps want = uniform_caps(3, 0);
  R inv = a.inverse_series(&want);
  EXPECT_EQ(inv.extract(3, -3), q.pow(3));
}
