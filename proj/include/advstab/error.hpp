#pragma once

#include <stdexcept>
#include <string>

namespace advstab {

/// Base error. The message is prefixed with the module that raised it,
/// e.g. "steady: Newton iteration diverged".
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message)
        : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// Malformed input: bad expression, bad scenario file, invalid parameter.
class InputError : public Error {
public:
    using Error::Error;
};

/// Expression syntax error with a character offset into the source text.
class ParseError : public InputError {
public:
    ParseError(const std::string& message, std::size_t position)
        : InputError("profiles", message + " at position " + std::to_string(position)),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// A solver failed to converge or a cross-check disagreed.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Requested q is at or beyond the washout threshold, so no positive
/// single-species steady state exists.
class NoSteadyStateError : public Error {
public:
    explicit NoSteadyStateError(const std::string& detail)
        : Error("steady", "no positive steady state (q ≥ q*)" + (detail.empty() ? "" : "; " + detail)) {}
};

}  // namespace advstab
