#pragma once

#include <limits>
#include <vector>

#include "annuity/boundary.hpp"
#include "annuity/valuation.hpp"

namespace annuity {

enum class PdeScheme { ExplicitProjected, CrankNicolsonPSOR };

struct PsorParams {
    double omega = 1.5;
    int max_iter = 4000;
    double tol = 1e-10;
};

/// Log-space grid y = ln x. Constant diffusion/advection coefficients per
/// slice; only r(t), beta(t) vary in time.
struct PdeGrid {
    double y_min = 0.0;
    double y_max = 1.0;
    int n_y = 400;  // spatial nodes
    int n_t = 2000; // time steps
    PdeScheme scheme = PdeScheme::CrankNicolsonPSOR;
    PsorParams psor;

    /// Domain sized from the gamma range of the regime's solve interval, with
    /// margins wide enough to contain [ln(b_min/5), ln(5*b_max)].
    static PdeGrid auto_for(const ProblemConfig& cfg, const Regime& regime, int n_y = 400,
                            int n_t = 2000, PdeScheme scheme = PdeScheme::CrankNicolsonPSOR);
};

struct PdeResult {
    std::vector<double> t_grid; // slice times, ascending
    std::vector<double> y_grid;
    ValueSurface surface;                 // x_grid = exp(y_grid)
    std::vector<double> extracted_boundary; // per slice; inf when no contact in domain
    Orientation orientation;

    static constexpr double no_contact = std::numeric_limits<double>::infinity();
};

/// Backward induction on max{V_t + LV - rV + beta*x, G - V} = 0 from
/// V(T,.) = G(T,.), with obstacle projection (explicit) or PSOR (CN).
/// The boundary is read off each slice as the first node, scanning from the
/// continuation side, with V - G <= pde_contact_tol*(1+|G|).
PdeResult pde_solve(const ProblemConfig& cfg, const Regime& regime, const PdeGrid& grid);

constexpr double pde_contact_tol = 1e-6;

} // namespace annuity
