#ifndef GROUPDIFF_ERRORS_HPP
#define GROUPDIFF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace groupdiff {

// Error families map to process exit codes: validation -> 2,
// resource guard -> 3, numerical failure -> 4.

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : Error {
    using Error::Error;
};

struct ResourceGuardError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

// -- validation family ------------------------------------------------------

struct ConfigError : ValidationError {
    using ValidationError::ValidationError;
};

struct DomainError : ValidationError {
    using ValidationError::ValidationError;
};

struct OrderError : ValidationError {
    using ValidationError::ValidationError;
};

struct IndexError : ValidationError {
    using ValidationError::ValidationError;
};

struct GroupCountError : ValidationError {
    using ValidationError::ValidationError;
};

struct IndivisibleError : ValidationError {
    using ValidationError::ValidationError;
};

struct LengthMismatchError : ValidationError {
    using ValidationError::ValidationError;
};

struct GridMismatchError : ValidationError {
    using ValidationError::ValidationError;
};

struct NonUniformGridError : ValidationError {
    using ValidationError::ValidationError;
};

struct ParseError : ValidationError {
    using ValidationError::ValidationError;
};

struct TooFewPointsError : ValidationError {
    using ValidationError::ValidationError;
};

// -- numerical family -------------------------------------------------------

struct SingularMatrixError : NumericalError {
    using NumericalError::NumericalError;
};

struct QuadratureError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace groupdiff

#endif
