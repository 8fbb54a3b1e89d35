#pragma once
#include <stdexcept>
#include <string>

namespace tasep {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad input: maps to CLI exit code 2
struct ValidationError : Error {
    using Error::Error;
};
struct OutOfRange : ValidationError {
    using ValidationError::ValidationError;
};
struct LabelOutOfRange : ValidationError {
    using ValidationError::ValidationError;
};
struct WindowUnderflow : ValidationError {
    using ValidationError::ValidationError;
};
struct SizeGuard : ValidationError {
    using ValidationError::ValidationError;
};
struct RangeGuard : ValidationError {
    using ValidationError::ValidationError;
};
struct PoleHit : ValidationError {
    using ValidationError::ValidationError;
};
struct RadiusInfeasible : ValidationError {
    using ValidationError::ValidationError;
};

// numerical failure: maps to CLI exit code 3
struct NumericalError : Error {
    using Error::Error;
};
struct NoConvergence : NumericalError {
    using NumericalError::NumericalError;
};
struct TruncationFailure : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace tasep
