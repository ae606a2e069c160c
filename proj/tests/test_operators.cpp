#include <gtest/gtest.h>

#include <random>

#include "qvir/operators.hpp"

using namespace qvir;

namespace {

using R = RationalFunction;
using S = BiSeries<Rational>;

TodaParams<Rational> toda_numeric() { return {Rational(2, 5), Rational(3, 7), Rational(5, 3)}; }

struct SymToda {
  TablePtr table = SymbolTable::make({"u", "s", "Q"});
  TodaParams<R> p{R::symbol(table, "u", 2), R::symbol(table, "s", 2), R::symbol(table, "Q")};
};

ParamPoint<Rational> fixed_point() {
  ParamPoint<Rational> p;
  p.u = Rational(2, 5);
  p.s = Rational(3, 7);
  p.Q = Rational(5, 3);
  p.T1 = Rational(1, 2);
  p.T2 = Rational(1, 3);
  p.T3 = Rational(1, 5);
  p.T4 = Rational(1, 7);
  return p;
}

}  // namespace

TEST(Gamma, MonomialWeights) {
  Rational q(3, 4);
  EXPECT_EQ(gamma_apply(S::monomial(Rational(1), 0, 0), q).extract(0, 0), Rational(1));
  EXPECT_EQ(gamma_apply(S::monomial(Rational(1), 0, 1), q).extract(0, 1), q);
  EXPECT_EQ(gamma_apply(S::monomial(Rational(1), 0, -1), q).extract(0, -1), Rational(1));
  EXPECT_EQ(gamma_apply(S::monomial(Rational(1), 2, 3), q).extract(2, 3), q.pow(6));
}

TEST(Gamma, InverseRoundTrip) {
  Rational q(5, 2);
  auto f = S::from_terms({{0, 0, Rational(1)}, {1, -1, Rational(2, 3)}, {1, 2, Rational(-7)}, {2, 4, Rational(1, 9)}},
                         uniform_caps(2, 5));
  auto g = gamma_apply(gamma_apply(f, q, 1), q, -1);
  EXPECT_TRUE(series_equal(f, g, DegreeWindow{2, -2, 5}).equal);
  EXPECT_THROW(gamma_apply(f, q, 2), UsageError);
}

TEST(ShiftRelations, HoldAndMutationFails) {
  DegreeWindow w{1, -3, 3};
  EXPECT_TRUE(basic_shift_relations_check(w, Rational(2, 7)));
  EXPECT_FALSE(basic_shift_relations_check(w, Rational(2, 7), Mutation::GammaRelation));
  SymToda z;
  EXPECT_TRUE(basic_shift_relations_check(DegreeWindow{0, -3, 3}, z.p.q));
}

TEST(Prefactor, ConstantTerms) {
  auto p = fixed_point().higgsed();
  for (int k = 1; k <= 3; ++k) {
    auto a = prefactor_A(k, DegreeWindow{2, -2, 3}, p);
    EXPECT_EQ(a.extract(0, 0), Rational(1)) << k;
  }
  EXPECT_THROW(prefactor_A(4, DegreeWindow{1, 0, 1}, p), UsageError);
}

TEST(Prefactor, SpecialPointReductions) {
  auto tab = SymbolTable::make({"u", "s", "Q"});
  R u = R::symbol(tab, "u"), s = R::symbol(tab, "s"), Q = R::symbol(tab, "Q");
  auto p = ParamPoint<R>::special(u, s, Q);
  R q = p.q(), t = p.t();
  DegreeWindow w{2, -2, 3};
  Caps c = uniform_caps(2, 3);
  auto u1 = factor_product<R>({{false, {q / t, 0, 1}, true}, {false, {t, 1, -1}, true}}, q, t, c);
  EXPECT_TRUE(series_equal(prefactor_A(1, w, p), u1, w).equal);
  auto u2 = factor_product<R>({{false, {t, 1, 0}, false},
                               {false, {q / (t * t), 1, 0}, false},
                               {false, {-inverse(t), 0, 1}, true},
                               {false, {-inverse(Q), 0, 1}, true},
                               {false, {-(q * Q), 1, -1}, true},
                               {false, {-q, 1, -1}, true}},
                              q, t, c);
  EXPECT_TRUE(series_equal(prefactor_A(2, w, p), u2, w).equal);
}

TEST(Pipeline, PaddingIsComputedAndEnforced) {
  auto p = fixed_point().higgsed();
  auto op = nonstat_operator(p);
  Caps target = uniform_caps(2, 3);
  Caps need = op.need(target, kPsiBound);
  EXPECT_EQ(need, (Caps{5, 4, 3}));
  auto psi = higgs_psi(p, Caps{4, 3, 2});
  EXPECT_THROW(op.apply(psi, target, kPsiBound), WindowUnderflowError);
}

TEST(Theorem20, FixedNumericPoint) {
  auto rep = verify_theorem20(DegreeWindow{3, -3, 4}, fixed_point());
  EXPECT_TRUE(rep.pass) << rep.describe();
  EXPECT_EQ(rep.certified.xmax, 4);
}

TEST(Theorem20, RandomPoints) {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 2; ++k) {
    auto rep = verify_theorem20(DegreeWindow{2, -2, 4}, random_point(rng));
    EXPECT_TRUE(rep.pass) << rep.describe();
  }
}

TEST(Theorem20, TrivialWindow) {
  EXPECT_TRUE(verify_theorem20(DegreeWindow{0, 0, 0}, fixed_point()).pass);
}

TEST(Theorem20, MutationsFail) {
  EXPECT_FALSE(verify_theorem20(DegreeWindow{2, -2, 3}, fixed_point(), Mutation::ShiftArgument).pass);
  EXPECT_FALSE(verify_theorem20(DegreeWindow{2, -2, 3}, fixed_point(), Mutation::PrefactorA2).pass);
}

TEST(Theorem20, SymbolicSpecialPoint) {
  auto tab = SymbolTable::make({"u", "s", "Q"});
  auto p = ParamPoint<R>::special(R::symbol(tab, "u"), R::symbol(tab, "s"), R::symbol(tab, "Q"));
  auto rep = verify_theorem20(DegreeWindow{1, -2, 3}, p);
  EXPECT_TRUE(rep.pass) << rep.describe();
}

TEST(TodaHamiltonian, OnOneAndX) {
  SymToda z;
  const auto& p = z.p;
  auto h1 = toda_hamiltonian_apply(BiSeries<R>::one(), p);
  EXPECT_EQ(h1.extract(0, 0), R(1) + p.t * p.Q);
  EXPECT_EQ(h1.extract(0, 1), p.t);
  EXPECT_EQ(h1.extract(1, -1), R(1));
  EXPECT_EQ(h1.extract(1, 0), R(0));
  auto hx = toda_hamiltonian_apply(BiSeries<R>::monomial(R(1), 0, 1), p);
  EXPECT_EQ(hx.extract(0, 1), p.q + p.t * p.Q / p.q);
  EXPECT_EQ(hx.extract(0, 2), p.t);
  EXPECT_EQ(hx.extract(1, 0), R(1));
}

TEST(TodaHamiltonian, Linearity) {
  auto p = toda_numeric();
  auto f = S::from_terms({{0, 0, Rational(1)}, {0, 2, Rational(3)}, {1, -1, Rational(-2, 5)}}, uniform_caps(1, 4));
  auto g = S::from_terms({{0, 1, Rational(7)}, {1, 0, Rational(1, 3)}}, uniform_caps(1, 4));
  auto lhs = toda_hamiltonian_apply(f.scaled(Rational(2)) + g, p);
  auto rhs = toda_hamiltonian_apply(f, p).scaled(Rational(2)) + toda_hamiltonian_apply(g, p);
  EXPECT_TRUE(series_equal(lhs, rhs, lhs.certified_window(1, -2)).equal);
}

TEST(TodaH, OnOne) {
  SymToda z;
  auto h = SeriesOperator<R>::compose({toda_H_operator(z.p)})
               .apply_exact(BiSeries<R>::one(), uniform_caps(1, 2));
  EXPECT_EQ(h.extract(0, 0), R(1));
  EXPECT_EQ(h.extract(0, 1), -z.p.q / (z.p.Q * (R(1) - z.p.q)));
}

TEST(Commutator, NumericAndMutation) {
  auto p = toda_numeric();
  auto rep = commutator_check(DegreeWindow{1, -2, 2}, p);
  EXPECT_TRUE(rep.pass) << rep.failure;
  EXPECT_FALSE(commutator_check(DegreeWindow{0, 0, 0}, p, Mutation::TodaHamiltonian).pass);
}

TEST(Commutator, SymbolicSmallWindow) {
  SymToda z;
  auto rep = commutator_check(DegreeWindow{1, -1, 1}, z.p);
  EXPECT_TRUE(rep.pass) << rep.failure;
}

TEST(SolveToda, LowCoefficients) {
  SymToda z;
  const auto& p = z.p;
  auto s = solve_toda(1, 2, p);
  EXPECT_EQ(s.extract(0, 0), R(1));
  EXPECT_EQ(s.extract(0, 1), -p.q / (p.Q * (R(1) - p.q) * (R(1) - p.q / (p.t * p.Q))));
}

TEST(SolveToda, SatisfiesEquation) {
  auto p = toda_numeric();
  auto s = solve_toda(3, 3, p);
  auto lhs = s.rescaled(p.t, Rational(1));
  auto rhs = toda_H_apply(s, DegreeWindow{3, -3, 3}, p);
  EXPECT_TRUE(series_equal(lhs, rhs, DegreeWindow{3, -3, 3}).equal);
}

TEST(SolveToda, MatchesNekrasovLimit) {
  auto tab = SymbolTable::make({"eps"});
  ParamPoint<R> base;
  base.u = R(Rational(2, 3));
  base.s = R(Rational(5, 4));
  base.Q = R(Rational(5, 7));
  auto lim = toda_limit(base, {Rational(1), Rational(1), Rational(1), Rational(1)}, tab, Caps{4, 3, 2});
  TodaParams<R> tp{base.q(), base.t(), base.Q};
  auto s = solve_toda(2, 2, tp);
  EXPECT_TRUE(series_equal(lim, s, DegreeWindow{2, -2, 2}).equal);
}

TEST(SolveToda, Resonance) {
  // t = q^2 / (tqQ) at b = 1 with a = 0: 1 = q^2/(tqQ) when Q = q/t.
  TodaParams<Rational> p{Rational(1, 2), Rational(3), Rational(1, 6)};
  EXPECT_THROW(solve_toda(0, 2, p), DegenerateParameterError);
}

TEST(Wrep, ConstantTermAndM0) {
  TodaParams<Rational> p{Rational(1, 3), Rational(2), Rational(2)};
  DegreeWindow w{1, -1, 2};
  for (int M = 0; M <= 2; ++M) EXPECT_EQ(wrep_partial(M, w, p).extract(0, 0), Rational(1));
  auto direct = wrep_factor(0, p).apply_exact(S::one(), uniform_caps(1, 2));
  EXPECT_TRUE(series_equal(direct, wrep_partial(0, w, p), w).equal);
}

TEST(Wrep, ConvergesToSolution) {
  TodaParams<Rational> p{Rational(1, 3), Rational(2), Rational(2)};
  auto rep = wrep_convergence(8, DegreeWindow{2, -2, 2}, p);
  EXPECT_TRUE(rep.warnings.empty());
  EXPECT_TRUE(rep.pass) << rep.failure;
}

TEST(Wrep, RegionWarning) {
  EXPECT_FALSE(wrep_region_warnings(TodaParams<Rational>{Rational(2), Rational(1, 2), Rational(1)}).empty());
}
