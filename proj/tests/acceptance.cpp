// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qvir/qvir.hpp"

using namespace qvir;
using R = RationalFunction;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

Verdict run(const std::string& name, VerifyOptions o) { return find_identity(name).run(o); }

std::string first_mismatch(const Verdict& v) {
  for (const auto& t : v.trials)
    if (!t.pass) return v.identity + ": " + t.mismatch;
  return v.identity;
}

VerifyOptions window(int lmax, int xmin, int xmax) {
  VerifyOptions o;
  o.lmax = lmax;
  o.xmin = xmin;
  o.xmax = xmax;
  return o;
}

VerifyOptions symbolic(VerifyOptions o) {
  o.backend = Backend::Symbolic;
  return o;
}

VerifyOptions numeric(VerifyOptions o, std::uint64_t seed, int trials) {
  o.backend = Backend::Numeric;
  o.seed = seed;
  o.trials = trials;
  return o;
}

VerifyOptions mutated(VerifyOptions o, Mutation m) {
  o.mutation = m;
  return o;
}

void check(Outcome& out, const Verdict& v) { out.require(v.pass, first_mismatch(v)); }

Outcome criterion1() {
  Outcome o;
  auto v = run("theorem20", numeric(window(4, -5, 8), 20240601, 3));
  check(o, v);
  o.require(v.trials.size() == 3, "three points");
  for (const auto& t : v.trials) o.require(t.certified && t.certified->lmax == 4 && t.certified->xmax == 8, "window");
  o.detail << " 3 random points, lmax=4, x in [-5,8]";
  return o;
}

Outcome criterion2() {
  Outcome o;
  auto v = run("theorem20", symbolic(window(2, -3, 4)));
  check(o, v);
  o.detail << " special point symbolic in u,s,Q, lmax=2, x in [-3,4]";
  return o;
}

Outcome criterion3() {
  Outcome o;
  auto v = run("commutator22", symbolic(window(2, -3, 3)));
  check(o, v);
  o.detail << " symbolic in u,s,Q, basis Lambda^a x^b with a<=2, |b|<=3";
  return o;
}

Outcome criterion4() {
  Outcome o;
  auto v = run("toda21", numeric(window(5, -5, 5), 424242, 3));
  check(o, v);
  auto tab = SymbolTable::make({"eps"});
  ParamPoint<R> base;
  base.u = R(Rational(2, 3));
  base.s = R(Rational(5, 4));
  base.Q = R(Rational(5, 7));
  auto lim = toda_limit(base, {Rational(1), Rational(1), Rational(1), Rational(1)}, tab, Caps{6, 5, 4, 3});
  auto sol = solve_toda(3, 3, TodaParams<R>{base.q(), base.t(), base.Q});
  auto eq = series_equal(lim, sol, DegreeWindow{3, -3, 3});
  o.require(eq.equal, "toda_limit: " + eq.describe());
  o.detail << " equation at 3 seeded points on lmax=5, x in [-5,5]; Nekrasov limit on lmax=3";
  return o;
}

Outcome criterion5() {
  Outcome o;
  auto rep = wrep_convergence(8, DegreeWindow{2, -2, 2}, TodaParams<Rational>{Rational(1, 3), Rational(2), Rational(2)});
  o.require(rep.pass, rep.failure);
  o.require(rep.warnings.empty(), "parameters inside the region");
  o.detail << " q=1/3, t=2, Q=2, M=0..8, " << rep.coefficients.size() << " coefficients";
  return o;
}

Outcome criterion6() {
  Outcome o;
  auto tab = SymbolTable::make({"q", "t"});
  R q = R::symbol(tab, "q"), t = R::symbol(tab, "t"), one(1);
  auto p1 = macdonald_onerow(1, q, t), p2 = macdonald_onerow(2, q, t), p3 = macdonald_onerow(3, q, t);
  R c2 = (one + q) * (one - t) / (one - q * t);
  R c21 = (one + q + q * q) * (one - t) / (one - q * q * t);
  R c111 = (one + q) * (one + q + q * q) * (one - t) * (one - t) / ((one - q * t) * (one - q * q * t));
  SymmetricPolynomial3<R> e1{1, {{{1, 0, 0}, one}, {{0, 1, 0}, one}, {{0, 0, 1}, one}}};
  SymmetricPolynomial3<R> e2{2, {{{2, 0, 0}, one}, {{0, 2, 0}, one}, {{0, 0, 2}, one},
                                 {{1, 1, 0}, c2}, {{1, 0, 1}, c2}, {{0, 1, 1}, c2}}};
  SymmetricPolynomial3<R> e3{3, {{{3, 0, 0}, one}, {{0, 3, 0}, one}, {{0, 0, 3}, one}, {{2, 1, 0}, c21},
                                 {{1, 2, 0}, c21}, {{2, 0, 1}, c21}, {{1, 0, 2}, c21}, {{0, 2, 1}, c21},
                                 {{0, 1, 2}, c21}, {{1, 1, 1}, c111}}};
  o.require(p1 == e1, "P_[1]");
  o.require(p2 == e2, "P_[2]");
  o.require(p3 == e3, "P_[3]");
  check(o, run("macdonald_recurrence", symbolic(window(3, -3, 4))));
  check(o, run("macdonald_solution", symbolic(window(4, -4, 0))));
  o.detail << " P_[1..3] symbolic; recurrence lmax=3 symbolic; solution r=0..4";
  return o;
}

Outcome criterion7() {
  Outcome o;
  check(o, run("halves_v1", symbolic(window(3, -3, 3))));
  check(o, run("halves_v2", symbolic(window(3, -3, 3))));
  auto g = symbolic(window(2, -2, 2));
  g.n = 3;
  check(o, run("genfunc", g));
  check(o, run("qseries", symbolic(window(3, -3, 0))));
  check(o, run("qsaalschutz", symbolic({})));
  check(o, run("formula_gamma", symbolic(window(3, -4, 3))));
  o.detail << " halves lmax=3; genfunc to (z^3, Lambda^2); q-series to Lambda^3 with the Lambda^1 closed form;"
              " q-Saalschutz n=0..5; gamma formula k=-2..2";
  return o;
}

Outcome criterion8() {
  Outcome o;
  auto tab = SymbolTable::make({"u", "s", "Q"});
  R u = R::symbol(tab, "u"), s = R::symbol(tab, "s"), Q = R::symbol(tab, "Q");
  auto p = ParamPoint<R>::special(u, s, Q);
  DegreeWindow w{3, -3, 3};
  auto psi = higgs_psi(p, uniform_caps(w.lmax, w.xmax));
  auto U = u_series(w.lmax, MacParams<R>{p.q(), p.t(), Q});
  auto eq = series_equal(psi, U, w);
  o.require(eq.equal, eq.describe());
  o.detail << " symbolic in u,s,Q, lmax=3, x in [-3,3]";
  return o;
}

Outcome criterion9() {
  Outcome o;
  auto expect_fail = [&](const std::string& label, const Verdict& v) {
    o.require(!v.pass, label + " still passes");
    o.detail << " " << label;
  };
  expect_fail("1:shift_argument", run("theorem20", mutated(numeric(window(2, -2, 4), 20240601, 1),
                                                             Mutation::ShiftArgument)));
  expect_fail("3:toda_hamiltonian", run("commutator22", mutated(symbolic(window(1, -1, 1)), Mutation::TodaHamiltonian)));
  auto tab = SymbolTable::make({"q", "t"});
  R q = R::symbol(tab, "q"), t = R::symbol(tab, "t");
  bool p2_differs = !(macdonald_onerow(2, q, t, Mutation::OneRowP2) == macdonald_onerow(2, q, t));
  o.require(p2_differs, "6:onerow_p2 still matches");
  o.detail << " 6:onerow_p2";
  expect_fail("6:recurrence", run("macdonald_recurrence", mutated(symbolic(window(1, -1, 4)), Mutation::Recurrence)));
  expect_fail("6:solution", run("macdonald_solution", mutated(symbolic(window(2, -2, 0)), Mutation::Solution)));
  expect_fail("7:half_v1", run("halves_v1", mutated(symbolic(window(1, -1, 2)), Mutation::HalfV1)));
  auto g = mutated(symbolic(window(1, -1, 1)), Mutation::GenFunc);
  g.n = 2;
  expect_fail("7:genfunc", run("genfunc", g));
  expect_fail("7:qseries", run("qseries", mutated(symbolic(window(2, -2, 0)), Mutation::QSeries)));
  expect_fail("7:qsaalschutz", run("qsaalschutz", mutated(symbolic({}), Mutation::QSaalschutz)));
  expect_fail("7:formula_gamma", run("formula_gamma", mutated(symbolic(window(2, -3, 3)), Mutation::FormulaGamma)));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};
  bool all = true;
  for (const auto& [n, fn] : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " [exception: " << e.what() << "]";
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && out.pass;
    std::cout << "criterion " << n << ": " << (out.pass ? "PASS" : "FAIL") << " -" << out.detail.str() << " ("
              << static_cast<int>(secs + 0.5) << "s)" << std::endl;
  }
  return all ? 0 : 1;
}
