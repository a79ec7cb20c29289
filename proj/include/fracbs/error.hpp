#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracbs {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed text, invalid parameters, mismatched shapes.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed expression text. `position()` is a byte offset into the input.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& message, std::size_t position)
        : ValidationError(message + " at position " + std::to_string(position)),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Evaluation outside a function's domain (ln of a non-positive value,
/// division by zero, unbound variable, non-finite result).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Quadrature or linear-solve failure, growth guards, overflow.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace fracbs
