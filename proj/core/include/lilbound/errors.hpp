#pragma once

#include <stdexcept>
#include <string>

namespace lilbound {

/// Base of every error raised by the library. The CLI maps subclasses onto
/// its exit codes, so new subclasses should derive from one of the groups
/// below rather than from Error directly.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the operation's domain (negative u, p < 2, Q < 2, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An iterative solver hit its cap without meeting tolerance.
class NonconvergenceError : public Error {
public:
    NonconvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// phi_inverse asked for a value the function never reaches on [0, lambda0).
class UnreachableValueError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Sample mean too far from zero for a centered-space norm.
class CenteringError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Enumeration or sample size outside the supported range.
class SizeError : public DomainError {
public:
    using DomainError::DomainError;
};

/// sigma(n) vanishes somewhere in the requested index range.
class DegenerateSigmaError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Unknown model / phi / norming identifier.
class RegistryError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Calibration could not bracket a dominating constant.
class CalibrationError : public Error {
public:
    using Error::Error;
};

}  // namespace lilbound
