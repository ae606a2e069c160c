#include <gtest/gtest.h>

#include <random>

#include "qvir/nekrasov.hpp"

using namespace qvir;

namespace {

using R = RationalFunction;

std::vector<std::array<Partition, 4>> tuples_up_to(int nu_max, int mu_max) {
  std::vector<std::array<Partition, 4>> out;
  std::vector<Partition> all_nu, all_mu;
  for (int n = 0; n <= nu_max; ++n)
    for (auto& p : partitions_of(n)) all_nu.push_back(p);
  for (int n = 0; n <= mu_max; ++n)
    for (auto& p : partitions_of(n)) all_mu.push_back(p);
  for (auto& a : all_nu)
    for (auto& b : all_nu)
      for (auto& c : all_mu)
        for (auto& d : all_mu)
          if (a.size() + b.size() <= nu_max && c.size() + d.size() <= mu_max) out.push_back({a, b, c, d});
  return out;
}

ParamPoint<Rational> sample_point(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_point(rng);
}

}  // namespace

TEST(Partitions, Enumeration) {
  EXPECT_EQ(partitions_of(0).size(), 1u);
  EXPECT_TRUE(partitions_of(0)[0].empty());
  auto p2 = partitions_of(2);
  ASSERT_EQ(p2.size(), 2u);
  EXPECT_EQ(p2[0].parts, (std::vector<int>{2}));
  EXPECT_EQ(p2[1].parts, (std::vector<int>{1, 1}));
  EXPECT_EQ(partitions_of(4).size(), 5u);
  EXPECT_THROW(partitions_of(-1), UsageError);
}

TEST(Partitions, CountsMatchRecurrenceOracle) {
  // p(n) via the pentagonal-number recurrence.
  std::vector<long> p = {1};
  for (int n = 1; n <= 15; ++n) {
    long s = 0;
    for (int k = 1;; ++k) {
      int g1 = k * (3 * k - 1) / 2, g2 = k * (3 * k + 1) / 2;
      if (g1 > n) break;
      long sign = (k % 2) ? 1 : -1;
      s += sign * p[static_cast<std::size_t>(n - g1)];
      if (g2 <= n) s += sign * p[static_cast<std::size_t>(n - g2)];
    }
    p.push_back(s);
  }
  for (int n = 0; n <= 15; ++n) EXPECT_EQ(static_cast<long>(partitions_of(n).size()), p[static_cast<std::size_t>(n)]);
}

TEST(Partitions, TransposeIsInvolution) {
  for (int n = 0; n <= 9; ++n) {
    for (const auto& lam : partitions_of(n)) {
      EXPECT_EQ(lam.transpose().transpose(), lam);
      EXPECT_EQ(lam.transpose().size(), n);
    }
  }
  EXPECT_EQ(Partition({3, 1}).transpose().parts, (std::vector<int>{2, 1, 1}));
  EXPECT_THROW(Partition({1, 2}), UsageError);
}

TEST(NekrasovFactor, Examples) {
  auto tab = SymbolTable::make({"u", "s", "z"});
  R q = R::symbol(tab, "u", 2), t = R::symbol(tab, "s", 2), z = R::symbol(tab, "z");
  EXPECT_EQ(nekrasov_factor(Partition{}, Partition{}, z, q, t), R(1));
  EXPECT_EQ(nekrasov_factor(Partition({1}), Partition{}, z, q, t), R(1) - z);
  EXPECT_EQ(nekrasov_factor(Partition{}, Partition({1}), z, q, t), R(1) - z * t / q);
}

TEST(NekrasovFactor, DegreeInZ) {
  auto tab = SymbolTable::make({"u", "s", "z"});
  R q = R::symbol(tab, "u", 2), t = R::symbol(tab, "s", 2), z = R::symbol(tab, "z");
  for (int n = 0; n <= 3; ++n)
    for (const auto& lam : partitions_of(n))
      for (int m = 0; m <= 3; ++m)
        for (const auto& eta : partitions_of(m)) {
          R f = nekrasov_factor(lam, eta, z, q, t);
          EXPECT_TRUE(f.denominator_factors().empty());
          EXPECT_EQ(f.numerator().degree_in(2), n + m);
        }
}

TEST(ZExpand, ConstantTermAndFirstOrder) {
  auto p = sample_point(1);
  auto z = z_expand(p, Caps{2, 1});
  EXPECT_EQ(z.extract(0, 0), Rational(1));
  // Lambda/x collects exactly the two tuples with one box in mu.
  Rational expect = instanton_term(p, {Partition{}, Partition{}, Partition({1}), Partition{}}) +
                    instanton_term(p, {Partition{}, Partition{}, Partition{}, Partition({1})});
  EXPECT_EQ(z.extract(1, -1), expect);
}

TEST(ZExpand, MatchesDirectSummation) {
  auto p = sample_point(7);
  Caps caps{3, 2};
  auto z = z_expand(p, caps);
  std::map<std::pair<int, int>, Rational> direct;
  for (const auto& tup : tuples_up_to(3, 1)) {
    int a = tup[2].size() + tup[3].size();
    int dx = tup[0].size() + tup[1].size() - a;
    if (dx > caps[static_cast<std::size_t>(a)]) continue;
    direct[{a, dx}] += instanton_term(p, tup);
  }
  for (int a = 0; a <= 1; ++a)
    for (int dx = -a; dx <= caps[static_cast<std::size_t>(a)]; ++dx)
      EXPECT_EQ(z.extract(a, dx), direct[std::make_pair(a, dx)]);
}

TEST(ZExpand, WindowEnlargementIsStable) {
  auto p = sample_point(3);
  auto small = z_expand(p, Caps{2, 1});
  auto large = z_expand(p, Caps{4, 3, 2});
  EXPECT_TRUE(series_equal(small, large, DegreeWindow{1, -1, 1}).equal);
}

TEST(ZExpand, ParallelEqualsSequential) {
  auto p = sample_point(5).higgsed();
  Caps caps{6, 5, 4};
  auto seq = z_expand(p, caps, 1);
  auto par = z_expand(p, caps, 4);
  EXPECT_TRUE(series_equal(seq, par, DegreeWindow{2, -2, 4}).equal);
}

TEST(ZExpand, DegenerateDenominator) {
  // With q t = 1 some diagonal vector-multiplet factor 1 - q^A t^B vanishes.
  ParamPoint<Rational> p = sample_point(11);
  p.u = Rational(2);
  p.s = Rational(1, 2);  // q t = 1
  bool threw = false;
  try {
    z_expand(p, Caps{4});
  } catch (const DegenerateParameterError&) {
    threw = true;
  }
  EXPECT_TRUE(threw);
}

TEST(HiggsPsi, HiggsingSetsBifundamentalMassToT) {
  auto p = sample_point(2).higgsed();
  EXPECT_EQ(p.w(), p.t());
  auto psi = higgs_psi(sample_point(2), Caps{2, 1});
  EXPECT_EQ(psi.extract(0, 0), Rational(1));
}

TEST(HiggsPsi, SpecialPointSupport) {
  // Only (0,[n],0,[m]) tuples survive at the special point.
  auto p = ParamPoint<Rational>::special(Rational(2, 3), Rational(5, 7), Rational(3, 11));
  for (const auto& tup : tuples_up_to(3, 2)) {
    Rational term = instanton_term(p, tup);
    bool allowed = tup[0].empty() && tup[2].empty() && tup[1].length() <= 1 && tup[3].length() <= 1;
    if (!allowed) {
      EXPECT_TRUE(term.is_zero()) << tup[0].to_string() << tup[1].to_string() << tup[2].to_string()
                                  << tup[3].to_string();
    }
  }
  // (q^-m)_n kills n > m; n <= m survives.
  EXPECT_TRUE(instanton_term(p, {Partition{}, Partition({2}), Partition{}, Partition({1})}).is_zero());
  EXPECT_FALSE(instanton_term(p, {Partition{}, Partition({1}), Partition{}, Partition({2})}).is_zero());
}

TEST(ParamMap, SpecialPointFromVermaParameters) {
  auto tab = SymbolTable::make({"u", "s", "a"});
  R u = R::symbol(tab, "u"), s = R::symbol(tab, "s"), qa1 = R::symbol(tab, "a");
  R v = u / s, t = s * s;
  MapInput<R> in;
  in.qalpha = {qa1, inverse(t), inverse(t), inverse(t)};  // q^{-beta} = 1/t
  in.N = {1, 1, 0};
  auto g = param_map_forward(in, u, s);
  EXPECT_EQ(g.T1, v / t);
  EXPECT_EQ(g.T2, inverse(v));
  EXPECT_EQ(g.T3, inverse(v));
  EXPECT_EQ(g.T4, v / t);
  EXPECT_EQ(g.phi1, t / v);
  EXPECT_EQ(g.phi2, v);
  EXPECT_EQ(v * g.T3, R(1));
  auto back = param_map_inverse(g, u, s);
  EXPECT_EQ(back.N, in.N);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(back.qalpha[static_cast<std::size_t>(i)], in.qalpha[static_cast<std::size_t>(i)]);
}

TEST(ParamMap, RoundTripNumeric) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    Rational u = random_rational(rng), s = random_rational(rng);
    MapInput<Rational> in;
    for (auto& x : in.qalpha) x = random_rational(rng);
    in.N = {trial % 3 - 1, 2 - trial % 4, trial % 2};
    auto g = param_map_forward(in, u, s);
    auto back = param_map_inverse(g, u, s);
    EXPECT_EQ(back.N, in.N);
    EXPECT_EQ(back.qalpha, in.qalpha);
  }
}

TEST(ParamMap, NoSolution) {
  GaugeParams<Rational> g;
  g.T1 = Rational(7, 5);
  EXPECT_THROW(param_map_inverse(g, Rational(2), Rational(3)), NoSolutionError);
  g.Q = Rational(0);
  EXPECT_THROW(param_map_inverse(g, Rational(2), Rational(3)), NoSolutionError);
}

TEST(TodaLimit, ConstantTermAndNoPoles) {
  auto tab = SymbolTable::make({"eps"});
  ParamPoint<R> base;
  base.u = R(Rational(1, 2));
  base.s = R(Rational(3, 2));
  base.Q = R(Rational(5, 3));
  auto psi = toda_limit(base, {Rational(1), Rational(1), Rational(1), Rational(1)}, tab, Caps{3, 2});
  EXPECT_EQ(psi.extract(0, 0), R(1));
  for (int a = 0; a <= 1; ++a)
    for (int dx = -a; dx <= 2 - a; ++dx) EXPECT_TRUE(psi.extract(a, dx).is_constant());
}
