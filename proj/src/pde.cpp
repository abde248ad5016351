#include "annuity/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "detail/coeff_table.hpp"

namespace annuity {

PdeGrid PdeGrid::auto_for(const ProblemConfig& cfg, const Regime& regime, int n_y, int n_t,
                          PdeScheme scheme) {
    const auto [t_lo, t_hi] = solve_interval(cfg, regime);
    double gamma_min = 1e300, gamma_max = 0.0;
    const int scan = 257;
    for (int j = 0; j < scan; ++j) {
        const double t = t_lo + (t_hi - t_lo) * j / (scan - 1);
        if (auto gamma = gamma_level(cfg, t); gamma && std::isfinite(*gamma) && *gamma > 0.0) {
            gamma_min = std::min(gamma_min, *gamma);
            gamma_max = std::max(gamma_max, *gamma);
        }
    }
    if (!(gamma_max > 0.0)) throw ConfigError("pde grid: gamma has no positive finite values");
    // keep a blow-up of gamma (sign change of g nearby) from inflating the box
    gamma_max = std::min(gamma_max, 100.0 * gamma_min);
    PdeGrid grid;
    grid.y_min = std::log(gamma_min) - 2.5;
    if (orientation_of(regime.boundary_kind()) == Orientation::StopBelow) {
        // the stopping region sits at small x on the K monetary scale, which
        // can be far below gamma when gamma explodes
        grid.y_min = std::min(grid.y_min,
                              std::log(std::max(1.0, std::abs(cfg.K))) - 2.5);
    }
    grid.y_max = std::log(gamma_max) + 2.0 + 3.0 * cfg.sigma * std::sqrt(cfg.T);
    grid.n_y = n_y;
    grid.n_t = n_t;
    grid.scheme = scheme;
    return grid;
}

namespace {

struct SliceCoeffs {
    std::vector<double> f, r, beta;
};

double extract_boundary(const std::vector<double>& V, const std::vector<double>& G,
                        const std::vector<double>& x, Orientation orientation) {
    const int n = static_cast<int>(V.size());
    // The scan starts a few nodes inside the continuation edge: the one-sided
    // extrapolation row there can pin to the obstacle on wide grids, which is
    // a truncation artifact rather than a boundary.
    if (orientation == Orientation::StopAbove) {
        // continuation lives at small x: scan upward
        for (int j = 3; j < n; ++j) {
            if (V[j] - G[j] <= pde_contact_tol * (1.0 + std::abs(G[j]))) return x[j];
        }
    } else {
        for (int j = n - 4; j >= 0; --j) {
            if (V[j] - G[j] <= pde_contact_tol * (1.0 + std::abs(G[j]))) return x[j];
        }
    }
    return PdeResult::no_contact;
}

} // namespace

PdeResult pde_solve(const ProblemConfig& cfg, const Regime& regime, const PdeGrid& grid) {
    if (!regime.is_boundary()) throw ConfigError("pde_solve: regime has no boundary");
    cfg.validate();

    const auto [t_lo, t_hi] = solve_interval(cfg, regime);
    const Orientation orientation = orientation_of(regime.boundary_kind());

    const int n_y = grid.n_y;
    const int n_t = grid.n_t;
    const double dy = (grid.y_max - grid.y_min) / (n_y - 1);
    const double dt = (t_hi - t_lo) / n_t;

    if (grid.scheme == PdeScheme::ExplicitProjected && dt > dy * dy / (cfg.sigma * cfg.sigma)) {
        std::ostringstream msg;
        msg << "explicit scheme unstable: dt=" << dt << " > dy^2/sigma^2="
            << dy * dy / (cfg.sigma * cfg.sigma);
        throw StabilityViolation(msg.str());
    }

    std::vector<double> y(n_y), x(n_y);
    for (int j = 0; j < n_y; ++j) {
        y[j] = grid.y_min + j * dy;
        x[j] = std::exp(y[j]);
    }

    // slice times and per-slice coefficients
    std::vector<double> times(n_t + 1);
    for (int m = 0; m <= n_t; ++m) times[m] = t_lo + (t_hi - t_lo) * m / n_t;
    SliceCoeffs sc;
    sc.f.resize(n_t + 1);
    sc.r.resize(n_t + 1);
    sc.beta.resize(n_t + 1);
    for (int m = 0; m <= n_t; ++m) {
        sc.f[m] = moneys_worth(cfg, times[m]).f;
        sc.r[m] = rate_r(cfg, times[m]);
        sc.beta[m] = rate_beta(cfg, times[m]);
    }

    const double a = 0.5 * cfg.sigma * cfg.sigma;            // diffusion
    const double c = cfg.theta - cfg.alpha - a;              // advection in y
    const double lo_coef = a / (dy * dy) - c / (2.0 * dy);   // V_{j-1}
    const double hi_coef = a / (dy * dy) + c / (2.0 * dy);   // V_{j+1}
    const double mid_coef = -2.0 * a / (dy * dy);            // V_j (minus r per slice)

    auto obstacle = [&](int m, int j) { return sc.f[m] * (x[j] - cfg.K); };

    // stop side: where V = G holds at the domain edge
    const bool stop_side_high = orientation == Orientation::StopAbove;

    std::vector<double> V(n_y), Vn(n_y), G_now(n_y), rhs(n_y);
    for (int j = 0; j < n_y; ++j) V[j] = obstacle(n_t, j);

    PdeResult result;
    result.t_grid = times;
    result.y_grid = y;
    result.orientation = orientation;
    result.extracted_boundary.assign(n_t + 1, PdeResult::no_contact);
    result.surface.t_grid = times;
    result.surface.x_grid = x;
    result.surface.V.assign((n_t + 1) * n_y, 0.0);
    result.surface.G.assign((n_t + 1) * n_y, 0.0);
    result.surface.stop.assign((n_t + 1) * n_y, 0);

    auto commit_slice = [&](int m, const std::vector<double>& Vm) {
        for (int j = 0; j < n_y; ++j) {
            const double G = obstacle(m, j);
            result.surface.V[m * n_y + j] = Vm[j];
            result.surface.G[m * n_y + j] = G;
            result.surface.stop[m * n_y + j] =
                Vm[j] - G <= pde_contact_tol * (1.0 + std::abs(G)) ? 1 : 0;
        }
        std::vector<double> Gs(n_y);
        for (int j = 0; j < n_y; ++j) Gs[j] = obstacle(m, j);
        result.extracted_boundary[m] = extract_boundary(Vm, Gs, x, orientation);
    };
    commit_slice(n_t, V);

    for (int m = n_t - 1; m >= 0; --m) {
        for (int j = 0; j < n_y; ++j) G_now[j] = obstacle(m, j);

        if (grid.scheme == PdeScheme::ExplicitProjected) {
            for (int j = 1; j < n_y - 1; ++j) {
                const double Lv = lo_coef * V[j - 1] + (mid_coef - sc.r[m + 1]) * V[j] +
                                  hi_coef * V[j + 1];
                Vn[j] = V[j] + dt * (Lv + sc.beta[m + 1] * x[j]);
            }
            // stop-side Dirichlet, continuation-side one-sided extrapolation
            if (stop_side_high) {
                Vn[n_y - 1] = G_now[n_y - 1];
                Vn[0] = 2.0 * Vn[1] - Vn[2];
            } else {
                Vn[0] = G_now[0];
                Vn[n_y - 1] = 2.0 * Vn[n_y - 2] - Vn[n_y - 3];
            }
            for (int j = 0; j < n_y; ++j) Vn[j] = std::max(Vn[j], G_now[j]);
            V.swap(Vn);
        } else {
            // Crank-Nicolson rows: (I - dt/2 A_m) V^m = (I + dt/2 A_{m+1}) V^{m+1} + src
            const double half = 0.5 * dt;
            for (int j = 1; j < n_y - 1; ++j) {
                const double Lv = lo_coef * V[j - 1] + (mid_coef - sc.r[m + 1]) * V[j] +
                                  hi_coef * V[j + 1];
                rhs[j] = V[j] + half * Lv + half * (sc.beta[m] + sc.beta[m + 1]) * x[j];
            }
            const double diag = 1.0 - half * (mid_coef - sc.r[m]);
            const double lo = -half * lo_coef;
            const double hi = -half * hi_coef;

            // PSOR with obstacle projection; start from the old slice.
            std::copy(V.begin(), V.end(), Vn.begin());
            const auto& ps = grid.psor;
            int it = 0;
            for (; it < ps.max_iter; ++it) {
                double max_change = 0.0, max_abs = 1.0;
                if (stop_side_high) {
                    Vn[n_y - 1] = G_now[n_y - 1];
                } else {
                    Vn[0] = G_now[0];
                }
                for (int j = 1; j < n_y - 1; ++j) {
                    const double gs = (rhs[j] - lo * Vn[j - 1] - hi * Vn[j + 1]) / diag;
                    double v_new = Vn[j] + ps.omega * (gs - Vn[j]);
                    v_new = std::max(v_new, G_now[j]);
                    max_change = std::max(max_change, std::abs(v_new - Vn[j]));
                    max_abs = std::max(max_abs, std::abs(v_new));
                    Vn[j] = v_new;
                }
                if (stop_side_high) {
                    Vn[0] = std::max(2.0 * Vn[1] - Vn[2], G_now[0]);
                } else {
                    Vn[n_y - 1] = std::max(2.0 * Vn[n_y - 2] - Vn[n_y - 3], G_now[n_y - 1]);
                }
                if (max_change <= ps.tol * max_abs) break;
            }
            if (it >= ps.max_iter) {
                std::ostringstream msg;
                msg << "PSOR did not converge in " << ps.max_iter << " sweeps at slice t="
                    << times[m];
                throw PsorDivergence(msg.str());
            }
            V = Vn;
        }
        commit_slice(m, V);
    }
    return result;
}

} // namespace annuity
