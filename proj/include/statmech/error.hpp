#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace statmech {

/// Failure categories shared by every module. The CLI maps these to exit
/// codes and to the `kind` field of its error JSON.
enum class ErrorKind {
  Domain,
  NonConvergence,
  NoBracket,
  Step,
  EmptyInput,
  Overflow,
  Infeasible,
  NoCondensation,
  Grid,
  Degeneracy,
  SingularRates,
  Stability,
  Unitarity,
  Branch,
  SupportMismatch,
  Config,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::Step: return "StepError";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::Overflow: return "OverflowGuard";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NoCondensation: return "NoCondensation";
    case ErrorKind::Grid: return "GridError";
    case ErrorKind::Degeneracy: return "DegeneracyError";
    case ErrorKind::SingularRates: return "SingularW";
    case ErrorKind::Stability: return "StabilityError";
    case ErrorKind::Unitarity: return "UnitarityError";
    case ErrorKind::Branch: return "BranchError";
    case ErrorKind::SupportMismatch: return "SupportMismatch";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Thrown by quadrature when the evaluation budget runs out. Carries the
/// best estimate so callers can report a partial value.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double partial, double error_estimate)
      : Error(ErrorKind::NonConvergence, what), partial_(partial), error_(error_estimate) {}

  double partial() const noexcept { return partial_; }
  double error_estimate() const noexcept { return error_; }

 private:
  double partial_;
  double error_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace statmech
