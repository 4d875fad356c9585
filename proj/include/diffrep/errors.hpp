#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diffrep {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Raised when an operation's documented precondition does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

/// The fiberwise antiderivative was requested for a function whose
/// z-integral is not numerically zero.
class SNotZeroError : public PreconditionError {
public:
    SNotZeroError(double max_abs_s, double threshold)
        : PreconditionError("S f not zero: max|Sf| = " + std::to_string(max_abs_s) +
                            " exceeds threshold " + std::to_string(threshold)),
          max_abs_s_(max_abs_s), threshold_(threshold) {}

    double max_abs_s() const noexcept { return max_abs_s_; }
    double threshold() const noexcept { return threshold_; }

private:
    double max_abs_s_;
    double threshold_;
};

class KMaxExceeded : public Error {
public:
    explicit KMaxExceeded(int k_max)
        : Error("minimal k search exceeded k_max = " + std::to_string(k_max) +
                " (input numerically zero or all z-moments below tolerance)"),
          k_max_(k_max) {}
    int k_max() const noexcept { return k_max_; }

private:
    int k_max_;
};

class FlowEscape : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

}  // namespace diffrep
