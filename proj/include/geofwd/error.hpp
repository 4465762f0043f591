#pragma once

#include <stdexcept>
#include <string>

namespace geofwd {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside an operation's precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Rejected configuration (unknown key, unparsable or out-of-range value).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: a quadrature or normalization check exceeded its tolerance,
/// or a root finder did not converge.
class NumericError : public Error {
public:
    using Error::Error;
};

class ToleranceError : public NumericError {
public:
    using NumericError::NumericError;
};

class ConvergenceError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Network generation or routing could not complete.
class SimulationError : public Error {
public:
    using Error::Error;
};

} // namespace geofwd
