#pragma once

#include <stdexcept>
#include <string>

namespace annuity {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Annuity quadrature truncated too early: the discarded tail bound exceeds tail_tol.
struct QuadratureTailError : std::runtime_error {
    explicit QuadratureTailError(const std::string& what) : std::runtime_error(what) {}
};

/// The boundary level gamma is undefined or infinite at the effective horizon,
/// so the backward sweep has no finite terminal seed.
struct DegenerateTerminal : std::runtime_error {
    explicit DegenerateTerminal(const std::string& what) : std::runtime_error(what) {}
};

/// No sign change of the step residual was found inside [x_floor, x_cap].
/// The message carries a residual landscape scan for diagnosis.
struct BracketFailure : std::runtime_error {
    explicit BracketFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Requested evaluation time is not a node of the solved boundary grid.
struct GridMismatch : std::runtime_error {
    explicit GridMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct PsorDivergence : std::runtime_error {
    explicit PsorDivergence(const std::string& what) : std::runtime_error(what) {}
};

struct StabilityViolation : std::runtime_error {
    explicit StabilityViolation(const std::string& what) : std::runtime_error(what) {}
};

} // namespace annuity
