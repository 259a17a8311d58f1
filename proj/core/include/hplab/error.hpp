#pragma once

#include <stdexcept>
#include <string>

namespace hplab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad configuration, bad degree, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Two exact values from different quadratic fields were combined.
class FieldMismatch : public Error {
public:
    using Error::Error;
};

/// An exact identity that must hold failed; signals an upstream bug or bad input.
class InconsistencyError : public Error {
public:
    using Error::Error;
};

/// An iteration ran out of budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A path or evaluation point came too close to a singular point.
class ClearanceError : public Error {
public:
    using Error::Error;
};

}  // namespace hplab
