#pragma once

#include <stdexcept>
#include <string>

namespace grouptrack {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A structural invariant was violated (duplicate labels, inconsistent
/// group centers, malformed truth, ...).
struct InvariantViolation : Error {
    using Error::Error;
};

/// Linear algebra failed (non-invertible innovation covariance, ...).
struct NumericalFailure : Error {
    using Error::Error;
};

/// Every association hypothesis has zero weight; the update cannot
/// produce a posterior.
struct DegenerateUpdate : Error {
    using Error::Error;
};

/// A scenario configuration failed validation.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace grouptrack
