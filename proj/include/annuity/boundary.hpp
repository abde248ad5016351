#pragma once

#include <cstddef>
#include <vector>

#include "annuity/coeffs.hpp"
#include "annuity/gbm.hpp"

namespace annuity {

enum class Orientation { StopBelow, StopAbove };

/// Quadrature of the time sum in the discretized equation. RightRectangle is
/// the scheme as published; Trapezoid converges one order faster on presets
/// whose contact is nearly degenerate (H ~ 0 at the boundary).
enum class TimeQuadrature { RightRectangle, Trapezoid };

inline Orientation orientation_of(RegimeKind boundary_kind) {
    return boundary_kind == RegimeKind::LowerBoundary ? Orientation::StopBelow
                                                      : Orientation::StopAbove;
}

/// Time grid of the backward sweep. Uniform by default; the clustered variant
/// shrinks the spacing of the last tenth of the nodes geometrically towards
/// the horizon, where the boundary gradient can be steep.
struct TimeGrid {
    std::vector<double> nodes;

    static TimeGrid uniform(double t_start, double t_end, int n_steps);
    static TimeGrid clustered_near_end(double t_start, double t_end, int n_steps,
                                       double ratio = 0.85);

    double max_step() const;
};

struct Boundary {
    std::vector<double> t;      // solve nodes, strictly increasing
    std::vector<double> values; // b(t_i); +inf sentinel = "never stop" at that node
    Orientation orientation = Orientation::StopAbove;
    TimeQuadrature quadrature = TimeQuadrature::RightRectangle;
    Regime regime;

    std::size_t index_of(double time) const; // throws GridMismatch
    bool stops(std::size_t i, double x) const {
        return orientation == Orientation::StopBelow ? x <= values[i] : x >= values[i];
    }
    double effective_horizon() const { return t.back(); }
};

struct SolveReport {
    std::vector<double> residuals;    // signed residual at the solved node
    std::vector<int> root_iterations; // per node
    double h = 0.0;                   // max grid spacing
    int bracket_expansions = 0;       // total across nodes
    int gamma_side_retries = 0;       // nodes whose root fell off the gamma side
    double max_normalized_residual = 0.0;
};

struct SolverOptions {
    int n_steps = 600;
    double root_tol = 1e-8; // relative on x
    bool refine_near_T = false;
    TimeQuadrature time_quadrature = TimeQuadrature::RightRectangle;
    int max_expansions = 60;
    double x_floor = 1e-10;
    double x_cap_factor = 1e6; // x_cap = factor * max(1, |K|)
};

/// gamma at the effective horizon of the boundary regime; the terminal seed
/// b(T_eff) of the sweep. Throws DegenerateTerminal when gamma is undefined
/// or infinite there (single sign change with the solvable side ending at t0).
double terminal_value(const ProblemConfig& cfg, const Regime& regime);

/// Time interval the boundary is solved on. Full [0,T] for plain regimes;
/// RestrictedHorizon solves its sub-interval, entered far enough past t0
/// that the blow-up of gamma is resolvable.
std::pair<double, double> solve_interval(const ProblemConfig& cfg, const Regime& regime);

/// One term of the discretized Volterra equation:
/// Y = disc(t,s) * [beta(t+s) E[X_s] - E[H(t+s, X_s) 1{stop side of c}]]
/// with X started at x, evaluated in closed form.
double kernel_Y(const ProblemConfig& cfg, double t, double x, double s, double c,
                Orientation orientation);

/// Residual of the value-matching equation at node i given boundary values at
/// nodes i+1..n: G(t_i,x) - disc*E[G(T_eff, X)] - sum of kernel terms.
double residual(const ProblemConfig& cfg, const std::vector<double>& t_nodes,
                const std::vector<double>& boundary_values, std::size_t i, double x,
                Orientation orientation,
                TimeQuadrature quad = TimeQuadrature::RightRectangle);

/// Backward sweep: b(t_n) = gamma(T_eff), then solve node by node with a
/// bracketed Brent iteration seeded at the previous node's value.
std::pair<Boundary, SolveReport> solve(const ProblemConfig& cfg,
                                       const SolverOptions& opts = {});
std::pair<Boundary, SolveReport> solve(const ProblemConfig& cfg, const Regime& regime,
                                       const SolverOptions& opts = {});

} // namespace annuity
