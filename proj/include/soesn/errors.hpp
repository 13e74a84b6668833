#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace soesn {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed a value outside an operation's precondition.
class InputError : public Error {
public:
    using Error::Error;
};

/// Matrix or vector shapes do not agree.
class DimensionError : public InputError {
public:
    using InputError::InputError;
};

/// A numeric kernel failed (non-finite value, no convergence, degenerate scaling).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Power iteration hit its cap; carries the last estimate.
class ConvergenceError : public NumericError {
public:
    ConvergenceError(const std::string& what, double last_estimate)
        : NumericError(what), last_estimate_(last_estimate) {}
    double last_estimate() const noexcept { return last_estimate_; }

private:
    double last_estimate_;
};

/// Spectral radius too small to rescale.
class CannotScaleError : public NumericError {
public:
    using NumericError::NumericError;
};

/// A reservoir update produced a non-finite value.
class NonFiniteStateError : public NumericError {
public:
    NonFiniteStateError(const std::string& what, std::size_t unit, std::size_t timestep)
        : NumericError(what), unit_(unit), timestep_(timestep) {}
    std::size_t unit() const noexcept { return unit_; }
    std::size_t timestep() const noexcept { return timestep_; }

private:
    std::size_t unit_;
    std::size_t timestep_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace soesn
