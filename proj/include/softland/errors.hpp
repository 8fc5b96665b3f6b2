#pragma once

#include <stdexcept>
#include <string>

namespace softland {

/// Base class for all library-specific failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A reference trajectory demands a flux the model cannot produce
/// (negative or near-zero force radicand). Carries the first offending time.
struct InfeasibleTrajectoryError : Error {
    double time_s;
    InfeasibleTrajectoryError(double t, const std::string& what)
        : Error(what), time_s(t) {}
};

/// Commanded or simulated flux linkage reached the saturation bound.
struct SaturationError : Error {
    double time_s;  // NaN when the error is not tied to a time instant
    double flux_Wb;
    SaturationError(double t, double lam, const std::string& what)
        : Error(what), time_s(t), flux_Wb(lam) {}
};

/// Flux magnitude too small for the flux-rate inversion (division by lam).
struct FluxSingularityError : Error {
    using Error::Error;
};

/// Simulated state became non-finite.
struct NumericalFault : Error {
    double time_s;
    NumericalFault(double t, const std::string& what) : Error(what), time_s(t) {}
};

/// An operation finished without touching the destination stop.
struct NoContactError : Error {
    using Error::Error;
};

}  // namespace softland
