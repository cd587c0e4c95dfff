#pragma once

#include <stdexcept>
#include <string>

namespace hardyid {

/// Evaluation requested too close to a pole of a rational symbol (or a zero
/// of the Blaschke shift during reconstruction).
struct NearPole : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A denominator root lies on or too close to the unit circle; the shifted
/// subspace construction needs poles bounded away from the boundary.
struct NoInteriorPole : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Initial condition violates the simulation guards.
struct InvalidStart : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed trajectory file. Carries the 1-based line number.
struct ParseError : std::runtime_error {
    int line;
    ParseError(const std::string& msg, int line_no)
        : std::runtime_error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

/// Data violates a domain-type invariant (e.g. samples outside the closed disk).
struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sample count incompatible with the requested quadrature rule.
struct BadSampleCount : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// data_integral right-hand side requested without velocity data.
struct MissingVelocities : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A baseline window holds fewer than three samples.
struct BadWindowCount : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hardyid
