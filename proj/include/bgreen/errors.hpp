#pragma once
#include <stdexcept>
#include <string>

namespace bgreen {

/// Bad inputs: out-of-range arguments, violated preconditions, invalid phase functions.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Argument on the branch cut (-inf, 1] of the continued Legendre functions.
struct BranchCutError : DomainError {
  using DomainError::DomainError;
};

/// Two evaluation routes that must agree numerically did not, or an integrand
/// failed a reality/convergence check.  CLI maps this to exit code 2.
struct NumericalConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DispersionSingularityError : NumericalConsistencyError {
  using NumericalConsistencyError::NumericalConsistencyError;
};

struct TailDivergenceError : NumericalConsistencyError {
  using NumericalConsistencyError::NumericalConsistencyError;
};

} // namespace bgreen
