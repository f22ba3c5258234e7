#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blender {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivisionByZeroError : public Error {
public:
    DivisionByZeroError() : Error("division by zero") {}
};

/// Malformed rational / interval literal.
class ParseError : public Error {
public:
    using Error::Error;
};

class InvalidIntervalError : public Error {
public:
    using Error::Error;
};

/// Affine map with zero slope.
class DegenerateMapError : public Error {
public:
    using Error::Error;
};

/// IFS violating contraction / arity requirements.
class InvalidSystemError : public Error {
public:
    using Error::Error;
};

class NotACoverError : public Error {
public:
    using Error::Error;
};

/// SystemParams violating a required inequality; the message names it.
class ParameterError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class OrbitEscapeError : public Error {
public:
    OrbitEscapeError(std::size_t step, std::string what)
        : Error("orbit escaped at step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class SteeringError : public Error {
public:
    SteeringError(std::size_t step, const std::string& what)
        : Error("steering failed at step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class ScheduleError : public Error {
public:
    using Error::Error;
};

/// Raised when a construction produces values that contradict its own bounds.
class CertificateAssemblyError : public Error {
public:
    using Error::Error;
};

class InvarianceError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace blender
