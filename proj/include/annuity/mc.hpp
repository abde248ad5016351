#pragma once

#include <cstdint>

#include "annuity/boundary.hpp"

namespace annuity {

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0; // sample std / sqrt(n_paths)
    long n_paths = 0;
    std::uint64_t seed = 0;
};

/// Simulates exact GBM on the boundary grid from (t, x), stops at the first
/// node on the stopping side (the start node counts), accumulates discounted
/// dividends by per-step trapezoid and the discounted payoff G at stopping.
McEstimate mc_policy_value(const ProblemConfig& cfg, const Boundary& boundary, double t,
                           double x, long n_paths, std::uint64_t seed);

/// Three policies on common random numbers.
struct StrategyComparison {
    McEstimate boundary_rule;
    McEstimate stop_now;  // tau = 0: payoff G(t,x), zero variance
    McEstimate hold_to_T; // tau = T_eff - t
    double se_diff_stop_now = 0.0; // SE of (boundary - stop_now) pathwise
    double se_diff_hold = 0.0;     // SE of (boundary - hold_to_T) pathwise
};

StrategyComparison mc_strategy_comparison(const ProblemConfig& cfg, const Boundary& boundary,
                                          double t, double x, long n_paths,
                                          std::uint64_t seed);

/// Per-path payoffs of the boundary rule; pathwise comparable across
/// different boundaries under the same seed (common random numbers).
std::vector<double> mc_policy_payoffs(const ProblemConfig& cfg, const Boundary& boundary,
                                      double t, double x, long n_paths, std::uint64_t seed);

} // namespace annuity
