#pragma once

#include <stdexcept>
#include <string>

namespace volterra {

// Invalid user-supplied parameters (CLI exit code 1).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Ordering violations on time tuples (CLI exit code 1).
struct OrderingError : std::domain_error {
    using std::domain_error::domain_error;
};

// psi12 evaluated on the tau' = t diagonal with eta > zeta; callers must exclude it.
struct SingularEvaluationError : std::domain_error {
    using std::domain_error::domain_error;
};

// A requested verification failed, e.g. Chen residual above threshold (CLI exit code 2).
struct VerificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical breakdown: factorization failure, non-convergence (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace volterra
