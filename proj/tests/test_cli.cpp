#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <set>
#include <string>

#include <json.hpp>

#include "qvir/macdonald.hpp"

using json = nlohmann::json;
using namespace qvir;

namespace {

struct Run {
  int code = -1;
  std::string out;
  json doc() const { return json::parse(out); }
};

Run qvir_cli(const std::string& args) {
  std::string cmd = std::string(QVIR_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const char* kPoint = "u=2/5,s=3/7,Q=5/3,T1=1/2,T2=1/3,T3=1/5,T4=1/7";

}  // namespace

TEST(CliExpand, PsiConstantTerm) {
  auto r = qvir_cli(std::string("expand --function psi --lmax 1 --xmax 2 --params ") + kPoint);
  ASSERT_EQ(r.code, 0);
  auto d = r.doc();
  EXPECT_EQ(d["function"], "psi");
  ASSERT_FALSE(d["terms"].empty());
  EXPECT_EQ(d["terms"][0]["dl"], 0);
  EXPECT_EQ(d["terms"][0]["dx"], 0);
  EXPECT_EQ(d["terms"][0]["coeff"], "1");
  EXPECT_EQ(d["certified_window"]["xmax"], 2);
}

TEST(CliExpand, TermsSortedAndDeterministic) {
  std::string args = std::string("expand --function psi --lmax 2 --xmax 3 --params ") + kPoint;
  auto a = qvir_cli(args), b = qvir_cli(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto terms = a.doc()["terms"];
  for (std::size_t i = 1; i < terms.size(); ++i) {
    auto p = std::pair{terms[i - 1]["dl"].get<int>(), terms[i - 1]["dx"].get<int>()};
    auto q = std::pair{terms[i]["dl"].get<int>(), terms[i]["dx"].get<int>()};
    EXPECT_LT(p, q);
  }
}

TEST(CliExpand, UMatchesMacdonaldRoute) {
  // Q = 1/(q t) with q = 4/9, t = 25/16: U is phi(q Lambda/(t^2 x))/phi(Lambda/x) P_[1](1, Lambda/t, Lambda/(t x)).
  Rational q(4, 9), t(25, 16), Q = (q * t).inverse();
  auto r = qvir_cli("expand --function u --lmax 3 --xmin -3 --xmax 0 --params u=2/3,s=5/4,Q=" + Q.to_string());
  ASSERT_EQ(r.code, 0);
  Caps caps = uniform_caps(3, 0);
  auto ratio = factor_product<Rational>({{false, {q / (t * t), 1, -1}, false}, {false, {Rational(1), 1, -1}, true}},
                                        q, t, uniform_caps(3, 3));
  auto p1 = BiSeries<Rational>::from_terms(
      {{0, 0, Rational(1)}, {1, 0, t.inverse()}, {1, -1, t.inverse()}}, Caps(4, kInf));
  auto rhs = BiSeries<Rational>::multiply(ratio, p1, &caps);
  std::set<std::pair<int, int>> seen;
  auto d = r.doc();
  for (const auto& term : d["terms"]) {
    int dl = term["dl"], dx = term["dx"];
    seen.insert({dl, dx});
    EXPECT_EQ(term["coeff"].get<std::string>(), rhs.extract(dl, dx).to_string()) << dl << "," << dx;
  }
  for (const auto& [dl, dx, c] : rhs.terms(DegreeWindow{3, -3, 0})) EXPECT_TRUE(seen.count({dl, dx})) << dl << "," << dx;
}

TEST(CliExpand, UsageAndDegenerateExitCodes) {
  EXPECT_EQ(qvir_cli("expand --function u --lmax -1 --params q=1/2,t=3,Q=5").code, 2);
  EXPECT_EQ(qvir_cli("expand --function nope").code, 2);
  EXPECT_EQ(qvir_cli("expand --function psi --params u=2/5").code, 2);
  EXPECT_EQ(qvir_cli("expand --function u --params q=1/2,t=3,Q=2").code, 3);
  EXPECT_EQ(qvir_cli("expand --function psi --params u=1,s=3/7,Q=5/3,T1=1/2,T2=1/3,T3=1/5,T4=1/7").code, 3);
}

TEST(CliExpand, TextFormat) {
  auto r = qvir_cli("expand --function v --lmax 1 --params q=1/2,t=3,Q=5 --format text");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, 6), "0 0 1\n");
}

TEST(CliVerify, QSaalschutz) {
  auto r = qvir_cli("verify --identity qsaalschutz --n 3");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.doc()["verdict"], "pass");
}

TEST(CliVerify, Theorem20SeededTrials) {
  auto r = qvir_cli("verify --identity theorem20 --lmax 3 --trials 3 --seed 7");
  EXPECT_EQ(r.code, 0);
  auto d = r.doc();
  EXPECT_EQ(d["verdict"], "pass");
  EXPECT_EQ(d["trials"].size(), 3u);
  EXPECT_EQ(d["certified_window"]["lmax"], 3);
}

TEST(CliVerify, MutationFails) {
  auto r = qvir_cli(std::string("verify --identity theorem20 --lmax 2 --xmax 3 --mutate a2 --params ") + kPoint);
  EXPECT_EQ(r.code, 1);
  auto d = r.doc();
  EXPECT_EQ(d["verdict"], "fail");
  EXPECT_TRUE(d.contains("mismatch"));
  EXPECT_EQ(qvir_cli("verify --identity commutator22 --lmax 0 --xmax 0 --mutate toda_hamiltonian").code, 1);
}

TEST(CliVerify, UsageErrors) {
  EXPECT_EQ(qvir_cli("verify --identity nope").code, 2);
  EXPECT_EQ(qvir_cli("verify --identity qsaalschutz --mutate nope").code, 2);
  EXPECT_EQ(qvir_cli("verify").code, 2);
  EXPECT_EQ(qvir_cli("verify --identity toda21 --params q=1/2").code, 2);
}

TEST(CliVerify, EveryCatalogNameListedOnce) {
  auto r = qvir_cli("list");
  ASSERT_EQ(r.code, 0);
  std::multiset<std::string> names;
  auto d = r.doc();
  for (const auto& e : d) names.insert(e["name"].get<std::string>());
  for (const char* n : {"theorem20", "toda21", "commutator22", "wrep24", "macdonald_recurrence", "macdonald_solution",
                        "halves_v1", "halves_v2", "genfunc", "qseries", "qsaalschutz", "formula_gamma", "qbinomial",
                        "phi_functional"})
    EXPECT_EQ(names.count(n), 1u) << n;
  EXPECT_EQ(names.size(), 14u);
}

TEST(CliWrep, ConvergenceTable) {
  auto r = qvir_cli("wrep --max-iterations 8 --params q=1/3,t=2,Q=2");
  ASSERT_EQ(r.code, 0);
  auto d = r.doc();
  EXPECT_TRUE(d["warnings"].empty());
  EXPECT_EQ(d["monotone"], true);
  bool found = false;
  for (const auto& c : d["coefficients"]) {
    if (c["dl"] == 0 && c["dx"] == 1) {
      found = true;
      EXPECT_EQ(c["decreasing"], true);
      EXPECT_EQ(c["errors"].size(), 9u);
    }
  }
  EXPECT_TRUE(found);
}

TEST(CliWrep, SingleRowAndRegionWarning) {
  auto r = qvir_cli("wrep --max-iterations 0");
  ASSERT_EQ(r.code, 0);
  auto d = r.doc();
  for (const auto& c : d["coefficients"]) EXPECT_EQ(c["errors"].size(), 1u);
  auto w = qvir_cli("wrep --max-iterations 2 --params q=1/3,t=1/2,Q=2");
  EXPECT_EQ(w.code, 0);
  EXPECT_FALSE(w.doc()["warnings"].empty());
}
