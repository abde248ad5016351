#include "annuity/mc.hpp"

#include <atomic>
#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

#include "detail/coeff_table.hpp"

namespace annuity {

namespace {

struct PathPayoffs {
    double boundary_rule;
    double hold_to_T;
};

/// One path from node i0; both the boundary rule and hold-to-T evaluated on
/// the same draws. With early_stop the walk ends at the stopping node and the
/// hold payoff is not meaningful.
PathPayoffs walk_path(const ProblemConfig& cfg, const Boundary& bd,
                      const detail::CoeffTable& tab, std::size_t i0, double x,
                      const CounterRng& rng, std::uint64_t path_id, bool early_stop) {
    const std::size_t n = bd.t.size() - 1;
    const double drift = cfg.theta - cfg.alpha - 0.5 * cfg.sigma * cfg.sigma;

    double X = x;
    double dividends = 0.0;
    double boundary_payoff = 0.0;
    bool stopped = false;

    auto disc = [&](std::size_t k) { return tab.disc(i0, k); };
    auto payoff_G = [&](std::size_t k, double wealth) {
        return tab.f[k] * (wealth - cfg.K);
    };

    for (std::size_t k = i0; k <= n; ++k) {
        if (!stopped && (bd.stops(k, X) || k == n)) {
            boundary_payoff = dividends + disc(k) * payoff_G(k, X);
            stopped = true;
            if (early_stop) return {boundary_payoff, 0.0};
        }
        if (k == n) break;
        const double dt = bd.t[k + 1] - bd.t[k];
        const double X_next =
            X * std::exp(drift * dt + cfg.sigma * std::sqrt(dt) * rng.normal(path_id, k));
        dividends += 0.5 * dt *
                     (disc(k) * tab.beta[k] * X + disc(k + 1) * tab.beta[k + 1] * X_next);
        X = X_next;
    }
    const double hold_payoff = dividends + disc(n) * payoff_G(n, X);
    return {boundary_payoff, hold_payoff};
}

McEstimate summarize(double sum, double sum_sq, long n, std::uint64_t seed) {
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    McEstimate est;
    est.mean = mean;
    est.std_error = std::sqrt(var / n);
    est.n_paths = n;
    est.seed = seed;
    return est;
}

// Fixed-size chunks accumulated in chunk order keep the reduction
// deterministic for any thread count.
constexpr long kChunk = 4096;

template <typename Accum, typename Work>
void run_chunked(long n_paths, std::vector<Accum>& chunks, Work&& work) {
    const long n_chunks = (n_paths + kChunk - 1) / kChunk;
    chunks.assign(n_chunks, Accum{});
    const unsigned n_threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    std::atomic<long> next{0};
    for (unsigned w = 0; w < n_threads; ++w) {
        pool.emplace_back([&] {
            for (long c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) {
                const long lo = c * kChunk;
                const long hi = std::min(n_paths, lo + kChunk);
                work(lo, hi, chunks[c]);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

McEstimate mc_policy_value(const ProblemConfig& cfg, const Boundary& boundary, double t,
                           double x, long n_paths, std::uint64_t seed) {
    const std::size_t i0 = boundary.index_of(t);
    const detail::CoeffTable tab(cfg, boundary.t);
    const CounterRng rng{seed};

    struct Sums {
        double sum = 0.0, sum_sq = 0.0;
    };
    std::vector<Sums> chunks;
    run_chunked(n_paths, chunks, [&](long lo, long hi, Sums& acc) {
        for (long p = lo; p < hi; ++p) {
            const double payoff =
                walk_path(cfg, boundary, tab, i0, x, rng, p, true).boundary_rule;
            acc.sum += payoff;
            acc.sum_sq += payoff * payoff;
        }
    });
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& c : chunks) {
        sum += c.sum;
        sum_sq += c.sum_sq;
    }
    return summarize(sum, sum_sq, n_paths, seed);
}

std::vector<double> mc_policy_payoffs(const ProblemConfig& cfg, const Boundary& boundary,
                                      double t, double x, long n_paths, std::uint64_t seed) {
    const std::size_t i0 = boundary.index_of(t);
    const detail::CoeffTable tab(cfg, boundary.t);
    const CounterRng rng{seed};
    std::vector<double> payoffs(n_paths);
    for (long p = 0; p < n_paths; ++p) {
        payoffs[p] = walk_path(cfg, boundary, tab, i0, x, rng, p, true).boundary_rule;
    }
    return payoffs;
}

StrategyComparison mc_strategy_comparison(const ProblemConfig& cfg, const Boundary& boundary,
                                          double t, double x, long n_paths,
                                          std::uint64_t seed) {
    const std::size_t i0 = boundary.index_of(t);
    const detail::CoeffTable tab(cfg, boundary.t);
    const CounterRng rng{seed};
    const double stop_now_payoff = tab.f[i0] * (x - cfg.K);

    struct Sums {
        double b = 0.0, b2 = 0.0, h = 0.0, h2 = 0.0;
        double ds = 0.0, ds2 = 0.0, dh = 0.0, dh2 = 0.0;
    };
    std::vector<Sums> chunks;
    run_chunked(n_paths, chunks, [&](long lo, long hi, Sums& acc) {
        for (long p = lo; p < hi; ++p) {
            const auto pay = walk_path(cfg, boundary, tab, i0, x, rng, p, false);
            acc.b += pay.boundary_rule;
            acc.b2 += pay.boundary_rule * pay.boundary_rule;
            acc.h += pay.hold_to_T;
            acc.h2 += pay.hold_to_T * pay.hold_to_T;
            const double ds = pay.boundary_rule - stop_now_payoff;
            acc.ds += ds;
            acc.ds2 += ds * ds;
            const double dh = pay.boundary_rule - pay.hold_to_T;
            acc.dh += dh;
            acc.dh2 += dh * dh;
        }
    });
    Sums all;
    for (const auto& c : chunks) {
        all.b += c.b; all.b2 += c.b2;
        all.h += c.h; all.h2 += c.h2;
        all.ds += c.ds; all.ds2 += c.ds2;
        all.dh += c.dh; all.dh2 += c.dh2;
    }

    StrategyComparison cmp;
    cmp.boundary_rule = summarize(all.b, all.b2, n_paths, seed);
    cmp.hold_to_T = summarize(all.h, all.h2, n_paths, seed);
    cmp.stop_now.mean = stop_now_payoff;
    cmp.stop_now.std_error = 0.0;
    cmp.stop_now.n_paths = n_paths;
    cmp.stop_now.seed = seed;
    cmp.se_diff_stop_now = summarize(all.ds, all.ds2, n_paths, seed).std_error;
    cmp.se_diff_hold = summarize(all.dh, all.dh2, n_paths, seed).std_error;
    return cmp;
}

} // namespace annuity
