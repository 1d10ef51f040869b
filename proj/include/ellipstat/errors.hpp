#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ellipstat {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Numerical parameters that cannot deliver the requested accuracy.
class ConfigurationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class ConvergenceError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error
{
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what)
        , line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Structurally readable data that violates an invariant (bad index, ...).
class ValidationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class OrientationError : public ValidationError
{
public:
    using ValidationError::ValidationError;
};

}  // namespace ellipstat
