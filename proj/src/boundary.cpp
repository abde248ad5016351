#include "annuity/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "detail/coeff_table.hpp"

namespace annuity {

TimeGrid TimeGrid::uniform(double t_start, double t_end, int n_steps) {
    TimeGrid grid;
    grid.nodes.resize(n_steps + 1);
    for (int i = 0; i <= n_steps; ++i) {
        grid.nodes[i] = t_start + (t_end - t_start) * i / n_steps;
    }
    grid.nodes.back() = t_end;
    return grid;
}

TimeGrid TimeGrid::clustered_near_end(double t_start, double t_end, int n_steps,
                                      double ratio) {
    const int n_tail = std::max(1, n_steps / 10);
    const int n_head = n_steps - n_tail;
    // Spacings: uniform h over the head, then h*ratio^j over the tail,
    // rescaled so the total span is exact.
    std::vector<double> spacing(n_steps, 1.0);
    double w = 1.0;
    for (int j = 0; j < n_tail; ++j) {
        w *= ratio;
        spacing[n_head + j] = w;
    }
    double total = 0.0;
    for (double s : spacing) total += s;
    TimeGrid grid;
    grid.nodes.resize(n_steps + 1);
    grid.nodes[0] = t_start;
    double acc = 0.0;
    for (int i = 0; i < n_steps; ++i) {
        acc += spacing[i];
        grid.nodes[i + 1] = t_start + (t_end - t_start) * acc / total;
    }
    grid.nodes.back() = t_end;
    return grid;
}

double TimeGrid::max_step() const {
    double h = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) h = std::max(h, nodes[i] - nodes[i - 1]);
    return h;
}

std::size_t Boundary::index_of(double time) const {
    const double tol = 1e-9 * (1.0 + std::abs(time));
    // nodes are sorted; nearest by binary search
    auto it = std::lower_bound(t.begin(), t.end(), time);
    for (auto probe : {it, it == t.begin() ? it : std::prev(it)}) {
        if (probe != t.end() && std::abs(*probe - time) <= tol) {
            return static_cast<std::size_t>(probe - t.begin());
        }
    }
    std::ostringstream msg;
    msg << "t=" << time << " is not a boundary grid node (no interpolation)";
    throw GridMismatch(msg.str());
}

double terminal_value(const ProblemConfig& cfg, const Regime& regime) {
    if (!regime.is_boundary()) {
        throw ConfigError("terminal_value: regime has no boundary to seed");
    }
    const double t_end =
        (regime.kind == RegimeKind::RestrictedHorizon && !regime.solve_after_t0)
            ? regime.t0
            : cfg.T;
    const auto gamma = gamma_level(cfg, t_end);
    if (!gamma) {
        std::ostringstream msg;
        msg << "gamma undefined at effective horizon t=" << t_end
            << " (g vanishes there); no finite terminal seed";
        throw DegenerateTerminal(msg.str());
    }
    if (!std::isfinite(*gamma) || !(*gamma > 0.0)) {
        std::ostringstream msg;
        msg << "gamma(" << t_end << ") = " << *gamma << " is not a positive finite seed";
        throw DegenerateTerminal(msg.str());
    }
    return *gamma;
}

double kernel_Y(const ProblemConfig& cfg, double t, double x, double s, double c,
                Orientation orientation) {
    const double disc = discount(cfg, t, s);
    const double mean = gbm_mean(cfg, x, s);
    const auto [g, ell] = g_ell(cfg, t + s);
    const double beta = rate_beta(cfg, t + s);
    double pm = gbm_partial_mean_below(cfg, x, s, c);
    double p = gbm_cdf_below(cfg, x, s, c);
    if (orientation == Orientation::StopAbove) {
        pm = mean - pm;
        p = 1.0 - p;
    }
    return disc * (beta * mean - (g * pm + cfg.K * ell * p));
}

double residual(const ProblemConfig& cfg, const std::vector<double>& t_nodes,
                const std::vector<double>& boundary_values, std::size_t i, double x,
                Orientation orientation, TimeQuadrature quad) {
    const detail::CoeffTable tab(cfg, t_nodes);
    return detail::table_residual(cfg, tab, boundary_values, i, x, orientation, quad);
}

namespace {

using detail::CoeffTable;
using detail::table_residual;

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    int expansions = 0;
};

template <typename Fn>
std::pair<double, int> brent(Fn&& fn, double a, double b, double fa, double fb,
                             double rtol) {
    double c = a, fc = fa, d = b - a, e = d;
    int iter = 0;
    for (; iter < 200; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            e = d = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                            0.5 * rtol * (1.0 + std::abs(b));
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) break;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = fn(b);
    }
    return {b, iter};
}

template <typename Fn>
RootResult bracket_and_solve(Fn&& fn, double seed, double lo_limit, double hi_limit,
                             double rtol, int max_expansions, double node_t) {
    if (!(lo_limit < hi_limit)) {
        std::ostringstream msg;
        msg << "empty root domain at t=" << node_t << ": [" << lo_limit << ", " << hi_limit
            << "] (x_cap below the gamma-side floor?)";
        throw BracketFailure(msg.str());
    }
    seed = std::clamp(seed, lo_limit, hi_limit);
    constexpr double grow = 1.5;
    double a = std::max(lo_limit, seed / grow);
    double b = std::min(hi_limit, seed * grow);
    if (a == b) { // seed pinned at a degenerate domain
        a = lo_limit;
        b = hi_limit;
    }
    double fa = fn(a), fb = fn(b);
    int expansions = 0;
    while ((fa > 0.0) == (fb > 0.0) && expansions < max_expansions) {
        bool moved = false;
        if (a > lo_limit) {
            a = std::max(lo_limit, a / grow);
            fa = fn(a);
            moved = true;
            if ((fa > 0.0) != (fb > 0.0)) { ++expansions; break; }
        }
        if (b < hi_limit) {
            b = std::min(hi_limit, b * grow);
            fb = fn(b);
            moved = true;
        }
        ++expansions;
        if (!moved) break;
    }
    if ((fa > 0.0) == (fb > 0.0) && fa != 0.0 && fb != 0.0) {
        std::ostringstream msg;
        msg << "no sign change of the step residual at t=" << node_t << " in ["
            << lo_limit << ", " << hi_limit << "] after " << expansions
            << " expansions; residual landscape:";
        for (int j = 0; j <= 16; ++j) {
            const double x = lo_limit * std::pow(hi_limit / lo_limit, j / 16.0);
            msg << "\n  x=" << x << "  residual=" << fn(x);
        }
        throw BracketFailure(msg.str());
    }
    auto [root, iters] = brent(fn, a, b, fa, fb, rtol);
    return {root, fn(root), iters, expansions};
}

} // namespace

std::pair<Boundary, SolveReport> solve(const ProblemConfig& cfg, const SolverOptions& opts) {
    return solve(cfg, classify(cfg), opts);
}

std::pair<double, double> solve_interval(const ProblemConfig& cfg, const Regime& regime) {
    double t_start = 0.0, t_end = cfg.T;
    if (regime.kind == RegimeKind::RestrictedHorizon) {
        if (regime.solve_after_t0) {
            // gamma blows up like 1/(t - t0); enter the interval where it has
            // decayed to a level the sweep can resolve.
            const double b_end = terminal_value(cfg, regime);
            const double span = cfg.T - regime.t0;
            double margin = 1e-3 * span;
            while (margin < 0.25 * span) {
                const auto gamma = gamma_level(cfg, regime.t0 + margin);
                if (gamma && std::isfinite(*gamma) && *gamma <= 20.0 * b_end) break;
                margin *= 2.0;
            }
            t_start = regime.t0 + margin;
        } else {
            t_end = regime.t0;
        }
    }
    return {t_start, t_end};
}

std::pair<Boundary, SolveReport> solve(const ProblemConfig& cfg, const Regime& regime,
                                       const SolverOptions& opts) {
    if (!regime.is_boundary()) {
        throw ConfigError("solve: classify did not yield a boundary regime (" +
                          to_string(regime.kind) + ")");
    }
    if (opts.n_steps < 16) throw ConfigError("solve requires n_steps >= 16");

    const double b_end = terminal_value(cfg, regime); // throws for infinite seeds
    const auto [t_start, t_end] = solve_interval(cfg, regime);

    const Orientation orientation = orientation_of(regime.boundary_kind());
    TimeGrid grid = opts.refine_near_T
                        ? TimeGrid::clustered_near_end(t_start, t_end, opts.n_steps)
                        : TimeGrid::uniform(t_start, t_end, opts.n_steps);
    const std::size_t n = grid.nodes.size() - 1;

    const CoeffTable tab(cfg, grid.nodes);
    const double x_cap = opts.x_cap_factor * std::max(1.0, std::abs(cfg.K));
    const double geps = gamma_eps(cfg);

    Boundary bd;
    bd.t = grid.nodes;
    bd.values.assign(n + 1, 0.0);
    bd.orientation = orientation;
    bd.quadrature = opts.time_quadrature;
    bd.regime = regime;
    bd.values[n] = b_end;

    SolveReport report;
    report.residuals.assign(n + 1, 0.0);
    report.root_iterations.assign(n + 1, 0);
    report.h = grid.max_step();

    for (std::size_t ii = n; ii-- > 0;) {
        const std::size_t i = ii;
        // gamma bounds the root on the regime side (R is inside C).
        double lo = opts.x_floor, hi = x_cap;
        if (std::abs(tab.g[i]) > geps) {
            const double gamma_i = -tab.K * tab.ell[i] / tab.g[i];
            if (std::isfinite(gamma_i) && gamma_i > 0.0) {
                if (orientation == Orientation::StopAbove) {
                    lo = std::max(lo, gamma_i * (1.0 - 1e-6));
                } else {
                    hi = std::min(hi, gamma_i * (1.0 + 1e-6));
                }
            }
        }
        auto fn = [&](double x) {
            return table_residual(cfg, tab, bd.values, i, x, orientation,
                                  opts.time_quadrature);
        };
        RootResult res;
        try {
            res = bracket_and_solve(fn, bd.values[i + 1], lo, hi, opts.root_tol,
                                    opts.max_expansions, grid.nodes[i]);
        } catch (const BracketFailure&) {
            // On coarse grids the discrete root can sit just off the gamma
            // side near the horizon; retry on the full domain.
            if (lo == opts.x_floor && hi == x_cap) throw;
            res = bracket_and_solve(fn, bd.values[i + 1], opts.x_floor, x_cap, opts.root_tol,
                                    opts.max_expansions, grid.nodes[i]);
            ++report.gamma_side_retries;
        }
        bd.values[i] = res.x;
        report.residuals[i] = res.fx;
        report.root_iterations[i] = res.iterations;
        report.bracket_expansions += res.expansions;
    }

    for (std::size_t i = 0; i <= n; ++i) {
        const double G = tab.f[i] * (bd.values[i] - tab.K);
        const double norm = std::abs(report.residuals[i]) / (1.0 + std::abs(G));
        report.max_normalized_residual = std::max(report.max_normalized_residual, norm);
    }
    return {std::move(bd), std::move(report)};
}

} // namespace annuity
