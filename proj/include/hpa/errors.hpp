#pragma once

#include <stdexcept>
#include <string>

namespace hpa {

// Numeric failures: non-convergence, solver rejections, evaluation domain errors.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverRejection : NumericError {
    using NumericError::NumericError;
};

// Input that violates an operation's precondition.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedBody : PreconditionError {
    using PreconditionError::PreconditionError;
};

struct DegreeCapError : PreconditionError {
    using PreconditionError::PreconditionError;
};

} // namespace hpa
