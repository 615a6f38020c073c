#pragma once

#include <stdexcept>
#include <string>

namespace oclade {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A documented precondition was violated by the caller.
struct precondition_error : error {
    using error::error;
};

/// Adaptive integration exhausted its evaluation budget before converging.
struct quadrature_error : error {
    using error::error;
};

/// The dust/no-dust class of a custom density could not be decided.
struct classification_error : error {
    using error::error;
};

/// An asymptotic formula was requested outside its regime of validity.
struct regime_error : error {
    using error::error;
};

/// Two total rates coincide, so the exponential mixture is degenerate.
struct degenerate_spectrum_error : error {
    using error::error;
};

/// Structurally inconsistent inputs (e.g. a mutation on an unknown block).
struct structure_error : error {
    using error::error;
};

/// Invalid or malformed run configuration.
struct config_error : error {
    using error::error;
};

} // namespace oclade
