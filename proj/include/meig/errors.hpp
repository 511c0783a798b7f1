#pragma once

#include <stdexcept>
#include <string>

namespace meig {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operand shapes are incompatible (tensor vs. vector dimensions).
struct DimensionError : Error {
    using Error::Error;
};

/// Input data violates a value-level contract (non-finite entries,
/// broken symmetry beyond tolerance, non-unit vectors, ...).
struct ValueError : Error {
    using Error::Error;
};

/// A configuration struct or flag set violates its invariants.
struct ConfigError : Error {
    using Error::Error;
};

/// A file could not be parsed; the message carries location context.
struct ParseError : Error {
    using Error::Error;
};

/// An eigenpair was requested at a point with a zero block, where the
/// objective is stationary but no M-eigenpair exists.
struct DegeneratePointError : Error {
    using Error::Error;
};

/// The Wolfe line search exhausted its bisection budget. Carries the
/// bracket state at the point of failure.
struct LineSearchError : Error {
    double bracket_lo;
    double bracket_hi;
    double last_alpha;
    int evals;

    LineSearchError(const std::string& msg, double lo, double hi, double alpha, int n_evals)
        : Error(msg), bracket_lo(lo), bracket_hi(hi), last_alpha(alpha), evals(n_evals) {}
};

/// The power iteration tried to normalize a (numerically) zero vector.
struct BreakdownError : Error {
    using Error::Error;
};

} // namespace meig
