#pragma once

#include <stdexcept>
#include <string>

namespace locsec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario / uncertainty / config content violates a schema or invariant.
/// `field()` carries the dotted path of the offending field.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The constraint polytope is empty (e.g. budget below the cheapest selection).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// No feasible relaxed point has finite information (objective +inf everywhere tried).
class InformationInfeasibleError : public InfeasibleError {
public:
    using InfeasibleError::InfeasibleError;
};

/// Joint problem: no relaxed point with f(z^E) < rho was found.
class RhoInfeasibleError : public InfeasibleError {
public:
    using InfeasibleError::InfeasibleError;
};

/// Iterative solver failed to reach its tolerances.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Derivative requested at a point where the information matrix is singular.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Exhaustive enumeration refused because the subset count exceeds the cap.
class EnumerationCapError : public Error {
public:
    using Error::Error;
};

}  // namespace locsec
