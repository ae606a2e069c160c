#pragma once

// Deliberate corruptions of single formulas, used to show that each
// verifier can fail. Never enabled in normal runs.

#include <string>
#include <vector>

#include "qvir/errors.hpp"

namespace qvir {

enum class Mutation {
  None,
  ShiftArgument,      // x/(tqQ) -> x/(tq) in the non-stationary equation
  PrefactorA2,        // phi(-q Lambda/x) -> phi(-Lambda/x) in A2
  TodaHamiltonian,    // tQ -> t^2 Q in the Toda Hamiltonian
  GammaRelation,      // gamma x = x gamma instead of p x gamma
  Recurrence,         // 1 + t + t/Q -> 1 + t + t Q in the Macdonald recurrence
  OneRowP2,           // wrong coefficient in the two-box one-row polynomial
  Solution,           // Q = q^-r t^-1 -> q^-r t^-2 in the polynomial solution
  HalfV1,             // dropped Lambda-shift in the first half equation
  GenFunc,            // phi(tz)/phi(z) -> phi(qz)/phi(z)
  QSeries,            // (t/x)_k -> (1/x)_k in the q-series identity
  QSaalschutz,        // (c/a)_n -> (ca)_n
  FormulaGamma,       // q^{1+k} -> q^k
};

struct MutationName {
  Mutation m;
  const char* name;
};

inline const std::vector<MutationName>& mutation_names() {
  static const std::vector<MutationName> names = {
      {Mutation::None, "none"},
      {Mutation::ShiftArgument, "shift_argument"},
      {Mutation::PrefactorA2, "prefactor_a2"},
      {Mutation::TodaHamiltonian, "toda_hamiltonian"},
      {Mutation::GammaRelation, "gamma_relation"},
      {Mutation::Recurrence, "recurrence"},
      {Mutation::OneRowP2, "onerow_p2"},
      {Mutation::Solution, "solution"},
      {Mutation::HalfV1, "half_v1"},
      {Mutation::GenFunc, "genfunc"},
      {Mutation::QSeries, "qseries"},
      {Mutation::QSaalschutz, "qsaalschutz"},
      {Mutation::FormulaGamma, "formula_gamma"},
  };
  return names;
}

inline Mutation parse_mutation(const std::string& s) {
  if (s == "a2") return Mutation::PrefactorA2;
  for (const auto& [m, n] : mutation_names())
    if (s == n) return m;
  throw UsageError("unknown mutation '" + s + "'");
}

inline std::string mutation_name(Mutation m) {
  for (const auto& [mm, n] : mutation_names())
    if (mm == m) return n;
  return "?";
}

}  // namespace qvir
