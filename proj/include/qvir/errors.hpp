#pragma once

#include <stdexcept>
#include <string>

namespace qvir {

// Error taxonomy shared by every module. The CLI maps these onto exit codes.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed expression text or literal.
struct ParseError : Error {
  using Error::Error;
};

/// Division by an exact zero.
struct DomainError : Error {
  using Error::Error;
};

/// API misuse: mismatched symbol tables, negative sizes, bad windows.
struct UsageError : Error {
  using Error::Error;
};

/// A denominator vanished after substituting numbers.
struct EvaluationPoleError : Error {
  using Error::Error;
};

/// The parameter point hits a resonance or a vanishing Nekrasov denominator.
/// Numeric callers re-randomize.
struct DegenerateParameterError : Error {
  using Error::Error;
};

/// A coefficient was requested outside the certified window.
struct OutOfWindowError : Error {
  using Error::Error;
};

/// A computation cannot certify any coefficient of the requested region.
struct WindowUnderflowError : Error {
  using Error::Error;
};

/// Series whose constant term is zero.
struct NonInvertibleError : Error {
  using Error::Error;
};

/// Quantum dilogarithm argument not small in the series grading.
struct NonExpandableError : Error {
  using Error::Error;
};

/// Parameter map equations have no solution.
struct NoSolutionError : Error {
  using Error::Error;
};

/// A limit coefficient has a pole at the limit point.
struct LimitFailureError : Error {
  using Error::Error;
};

}  // namespace qvir
