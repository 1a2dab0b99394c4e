#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nanocav {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input files, flags or configuration values.
class ConfigError : public Error {
public:
    using Error::Error;
};

class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, std::size_t line);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class OrderingError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class InsufficientDataError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ValidationError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class PlacementError : public Error {
public:
    using Error::Error;
};

// Failures of the numerical pipeline.
class NumericalError : public Error {
public:
    using Error::Error;
};

class BelowCutoffError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class AmbiguityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InfeasibleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace nanocav
