#include "annuity/valuation.hpp"

#include <cmath>

#include "detail/coeff_table.hpp"

namespace annuity {

namespace {

// s=0 indicator mass of the trapezoid end point. The raw indicator jumps
// across the boundary and the endpoint weight would turn that into a kink of
// V in x; mollify with the half-step transition probability instead, which
// is ~1/2 on the boundary itself, matching the solver's convention.
double mass_at(const ProblemConfig& cfg, const Boundary& bd, std::size_t i, double x) {
    const std::size_t n = bd.t.size() - 1;
    if (i == n) return bd.stops(i, x) ? 1.0 : 0.0;
    const double half_step = 0.5 * (bd.t[i + 1] - bd.t[i]);
    const double p_below = gbm_cdf_below(cfg, x, half_step, bd.values[i]);
    return bd.orientation == Orientation::StopBelow ? p_below : 1.0 - p_below;
}

} // namespace

double value_at(const ProblemConfig& cfg, const Boundary& boundary, double t, double x) {
    const std::size_t i = boundary.index_of(t);
    const detail::CoeffTable tab(cfg, boundary.t);
    return tab.f[i] * (x - cfg.K) -
           detail::table_residual(cfg, tab, boundary.values, i, x, boundary.orientation,
                                  boundary.quadrature, mass_at(cfg, boundary, i, x));
}

double premium(const ProblemConfig& cfg, const Boundary& boundary, double t, double x) {
    const std::size_t i = boundary.index_of(t);
    const detail::CoeffTable tab(cfg, boundary.t);
    // V - G is minus the value-matching residual at (t_i, x).
    return -detail::table_residual(cfg, tab, boundary.values, i, x, boundary.orientation,
                                   boundary.quadrature, mass_at(cfg, boundary, i, x));
}

RepresentationDefect representation_defect(const ProblemConfig& cfg,
                                           const Boundary& boundary, double t) {
    const std::size_t i = boundary.index_of(t);
    const detail::CoeffTable tab(cfg, boundary.t);
    const std::size_t n = tab.t.size() - 1;
    RepresentationDefect defect;
    if (i == n) return defect;
    const double ta = tab.theta_minus_alpha;
    const bool trapezoid = boundary.quadrature == TimeQuadrature::Trapezoid;
    // exact values: int disc*ell = f_i - disc f_n ; int disc*(beta-g)e^{ta s}
    // = f_i - disc f_n e^{ta span}
    double sum_ell = 0.0, sum_drift = 0.0;
    for (std::size_t k = i + 1; k <= n; ++k) {
        double w;
        if (trapezoid) {
            w = k == n ? 0.5 * (tab.t[n] - tab.t[n - 1])
                       : 0.5 * (tab.t[k + 1] - tab.t[k - 1]);
        } else {
            w = tab.t[k] - tab.t[k - 1];
        }
        const double s = tab.t[k] - tab.t[i];
        sum_ell += w * tab.disc(i, k) * tab.ell[k];
        sum_drift += w * tab.disc(i, k) * (tab.beta[k] - tab.g[k]) * std::exp(ta * s);
    }
    if (trapezoid) {
        const double w0 = 0.5 * (tab.t[i + 1] - tab.t[i]);
        sum_ell += w0 * tab.ell[i];
        sum_drift += w0 * (tab.beta[i] - tab.g[i]);
    }
    const double span = tab.t[n] - tab.t[i];
    defect.annuity = (tab.f[i] - tab.disc(i, n) * tab.f[n]) - sum_ell;
    defect.drift = (tab.f[i] - tab.disc(i, n) * tab.f[n] * std::exp(ta * span)) - sum_drift;
    return defect;
}

double valuation_tol(const ProblemConfig& cfg, const Boundary& boundary, double t, double x,
                     double root_tol) {
    const auto defect = representation_defect(cfg, boundary, t);
    const double G = stop_payoff_G(cfg, t, x);
    return 10.0 * root_tol * (1.0 + std::abs(G)) + std::abs(cfg.K * defect.annuity) +
           std::abs(defect.drift) * x;
}

ValueSurface value_surface(const ProblemConfig& cfg, const Boundary& boundary,
                           const std::vector<double>& x_grid, std::size_t t_stride) {
    const detail::CoeffTable tab(cfg, boundary.t);
    ValueSurface surf;
    surf.x_grid = x_grid;
    for (std::size_t i = 0; i < boundary.t.size(); i += t_stride) {
        surf.t_grid.push_back(boundary.t[i]);
        for (double x : x_grid) {
            const double G = tab.f[i] * (x - cfg.K);
            const double res =
                detail::table_residual(cfg, tab, boundary.values, i, x, boundary.orientation,
                                       boundary.quadrature, mass_at(cfg, boundary, i, x));
            surf.V.push_back(G - res);
            surf.G.push_back(G);
            surf.stop.push_back(boundary.stops(i, x) ? 1 : 0);
        }
    }
    return surf;
}

} // namespace annuity
