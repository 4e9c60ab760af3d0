#pragma once

#include <stdexcept>
#include <string>

namespace mvs {

/// Invalid user input or configuration. The CLI maps this to exit code 1.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A data structure invariant does not hold (e.g. broken Hermitian symmetry).
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed or truncated artifact on disk.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The time integrator produced non-finite coefficients.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double time, const std::string& what)
        : std::runtime_error(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace mvs
