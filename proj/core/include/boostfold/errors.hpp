#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace boostfold {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or configuration value is out of its admissible range.
class ValidationError : public Error {
public:
    ValidationError(std::string key, const std::string& message)
        : Error(key + ": " + message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Malformed configuration text.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Operation evaluated outside its mathematical domain (wrong scheme, D = 1 with r = 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The requested bifurcation does not exist for these parameters (e.g. SNB with r = 0).
class NoBifurcationError : public DomainError {
public:
    using DomainError::DomainError;
};

class SingularResolventError : public DomainError {
public:
    using DomainError::DomainError;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Switching instant too close to a clock edge for the map to be differentiated.
class GrazingError : public Error {
public:
    using Error::Error;
};

class NoBracketError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace boostfold
