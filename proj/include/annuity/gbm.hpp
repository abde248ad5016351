#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "annuity/coeffs.hpp"

namespace annuity {

/// Standard normal CDF, Phi(z) = erfc(-z/sqrt(2))/2.
double normal_cdf(double z);

/// Lognormal step parameters of X_s given X_0 = x:
/// ln X_s = ln x + m + v*Z with m = (theta-alpha-sigma^2/2)s, v = sigma*sqrt(s).
struct GbmStep {
    double m;
    double v;
    GbmStep(const ProblemConfig& cfg, double s)
        : m((cfg.theta - cfg.alpha - 0.5 * cfg.sigma * cfg.sigma) * s),
          v(cfg.sigma * std::sqrt(s)) {}
};

/// E[X_s | X_0 = x] = x * exp((theta-alpha) s).
double gbm_mean(const ProblemConfig& cfg, double x, double s);

/// P(X_s <= c | X_0 = x), s > 0.
double gbm_cdf_below(const ProblemConfig& cfg, double x, double s, double c);

/// E[X_s 1{X_s <= c} | X_0 = x], s > 0.
double gbm_partial_mean_below(const ProblemConfig& cfg, double x, double s, double c);

/// exp(-rho*s - int_0^s mu^S(eta+t+u) du), the subjective discount over [t, t+s].
double discount(const ProblemConfig& cfg, double t, double s);

/// Counter-based generator: every draw is a pure function of
/// (seed, path, step, lane), so paths are reproducible under any scheduling.
struct CounterRng {
    std::uint64_t seed;

    static std::uint64_t mix(std::uint64_t z);
    double uniform(std::uint64_t path, std::uint64_t step, std::uint64_t lane) const;
    /// Box-Muller from lanes (2*draw, 2*draw+1).
    double normal(std::uint64_t path, std::uint64_t step, std::uint64_t draw = 0) const;
};

/// Exact GBM sampling on a strictly increasing grid starting at 0.
/// path[k] holds X at t_grid[k]; deterministic given (seed, path_id).
std::vector<double> sample_path(const ProblemConfig& cfg, double x,
                                std::span<const double> t_grid, std::uint64_t seed,
                                std::uint64_t path_id = 0);

} // namespace annuity
