#pragma once

#include <cstdint>
#include <vector>

#include "annuity/boundary.hpp"

namespace annuity {

/// V (and G) sampled on boundary-grid times x a wealth grid, with the
/// stopping-side label per node.
struct ValueSurface {
    std::vector<double> t_grid;
    std::vector<double> x_grid;
    std::vector<double> V;            // row-major, [it * x_grid.size() + ix]
    std::vector<double> G;
    std::vector<std::uint8_t> stop;   // 1 = stopping side of the boundary

    double v(std::size_t it, std::size_t ix) const { return V[it * x_grid.size() + ix]; }
    double g(std::size_t it, std::size_t ix) const { return G[it * x_grid.size() + ix]; }
};

/// V(t,x) from the representation formula, on the same grid and rectangle
/// rule as the boundary solve. t must be a boundary node (GridMismatch).
double value_at(const ProblemConfig& cfg, const Boundary& boundary, double t, double x);

/// Early-exercise premium v = V - G; >= -valuation_tol.
double premium(const ProblemConfig& cfg, const Boundary& boundary, double t, double x);

/// Defect of the two closed-form identities the discrete time sum must
/// reproduce deep inside the stopping region (where V = G exactly):
/// the annuity identity (constant part, scaled by K) and the discounted
/// drift identity (slope part). |K·a| + |slope|·x is the representation
/// error floor of value_at away from the boundary.
struct RepresentationDefect {
    double annuity = 0.0; // defect of sum w*disc*ell vs f_i - disc*f_n
    double drift = 0.0;   // defect of sum w*disc*(beta-g)*e^{(theta-alpha)s}
};
RepresentationDefect representation_defect(const ProblemConfig& cfg,
                                           const Boundary& boundary, double t);

/// Floor for V >= G - tol checks: 10*root_tol*(1+|G|) plus the quadrature
/// identity defect at (t, x).
double valuation_tol(const ProblemConfig& cfg, const Boundary& boundary, double t,
                     double x, double root_tol = 1e-8);

/// Fill a surface over every stride-th boundary node and the given x grid.
ValueSurface value_surface(const ProblemConfig& cfg, const Boundary& boundary,
                           const std::vector<double>& x_grid, std::size_t t_stride = 1);

} // namespace annuity
