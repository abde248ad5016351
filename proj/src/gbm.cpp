#include "annuity/gbm.hpp"

#include <cmath>

namespace annuity {

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * M_SQRT1_2);
}

double gbm_mean(const ProblemConfig& cfg, double x, double s) {
    return x * std::exp((cfg.theta - cfg.alpha) * s);
}

double gbm_cdf_below(const ProblemConfig& cfg, double x, double s, double c) {
    if (!(c > 0.0)) return 0.0;
    if (std::isinf(c)) return 1.0;
    const GbmStep step(cfg, s);
    return normal_cdf((std::log(c / x) - step.m) / step.v);
}

double gbm_partial_mean_below(const ProblemConfig& cfg, double x, double s, double c) {
    if (!(c > 0.0)) return 0.0;
    if (std::isinf(c)) return gbm_mean(cfg, x, s);
    const GbmStep step(cfg, s);
    const double z = (std::log(c / x) - step.m) / step.v;
    return gbm_mean(cfg, x, s) * normal_cdf(z - step.v);
}

double discount(const ProblemConfig& cfg, double t, double s) {
    return std::exp(-cfg.rho * s - integrated_hazard(cfg.subjective, cfg.eta + t, s));
}

std::uint64_t CounterRng::mix(std::uint64_t z) {
    // splitmix64 finalizer
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t path, std::uint64_t step, std::uint64_t lane) const {
    std::uint64_t h = mix(seed);
    h = mix(h ^ path);
    h = mix(h ^ step);
    h = mix(h ^ lane);
    // 53-bit mantissa, offset keeps the value strictly inside (0,1)
    return (h >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double CounterRng::normal(std::uint64_t path, std::uint64_t step, std::uint64_t draw) const {
    const double u1 = uniform(path, step, 2 * draw);
    const double u2 = uniform(path, step, 2 * draw + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<double> sample_path(const ProblemConfig& cfg, double x,
                                std::span<const double> t_grid, std::uint64_t seed,
                                std::uint64_t path_id) {
    const CounterRng rng{seed};
    std::vector<double> path(t_grid.size());
    if (path.empty()) return path;
    path[0] = x;
    const double drift = cfg.theta - cfg.alpha - 0.5 * cfg.sigma * cfg.sigma;
    for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
        const double dt = t_grid[k + 1] - t_grid[k];
        const double xi = rng.normal(path_id, k);
        path[k + 1] = path[k] * std::exp(drift * dt + cfg.sigma * std::sqrt(dt) * xi);
    }
    return path;
}

} // namespace annuity
