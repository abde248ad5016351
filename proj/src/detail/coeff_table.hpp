#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "annuity/boundary.hpp"
#include "annuity/coeffs.hpp"
#include "annuity/gbm.hpp"

namespace annuity::detail {

/// Coefficients at the sweep nodes, precomputed once per grid.
/// lambda is the cumulative subjective hazard from age eta, so discount
/// factors between nodes come from differences.
struct CoeffTable {
    std::vector<double> t, f, g, ell, beta, lambda;
    double rho, theta_minus_alpha, K;

    CoeffTable(const ProblemConfig& cfg, const std::vector<double>& nodes)
        : t(nodes), rho(cfg.rho), theta_minus_alpha(cfg.theta - cfg.alpha), K(cfg.K) {
        const std::size_t m = nodes.size();
        f.resize(m);
        g.resize(m);
        ell.resize(m);
        beta.resize(m);
        lambda.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            const auto mw = moneys_worth(cfg, nodes[i]);
            f[i] = mw.f;
            const auto ge = g_ell(cfg, nodes[i]);
            g[i] = ge.g;
            ell[i] = ge.ell;
            beta[i] = rate_beta(cfg, nodes[i]);
            lambda[i] = integrated_hazard(cfg.subjective, cfg.eta, nodes[i]);
        }
    }

    double disc(std::size_t i, std::size_t k) const {
        return std::exp(-rho * (t[k] - t[i]) - (lambda[k] - lambda[i]));
    }
};

/// G(t_i, x) - disc * E[G(T_eff, X)] - time-quadrature kernel sum; the
/// discretized value-matching residual with boundary values fixed at k > i.
/// mass0 is the s=0 indicator weight of the trapezoid rule: 1/2 when x sits
/// on the boundary itself, else the plain stop-side indicator.
inline double table_residual(const ProblemConfig& cfg, const CoeffTable& tab,
                             const std::vector<double>& b, std::size_t i, double x,
                             Orientation orientation,
                             TimeQuadrature quad = TimeQuadrature::RightRectangle,
                             double mass0 = 0.5) {
    const std::size_t n = tab.t.size() - 1;
    double value = tab.f[i] * (x - tab.K);
    if (i == n) return 0.0;
    const double span = tab.t[n] - tab.t[i];
    value -= tab.disc(i, n) * tab.f[n] * (x * std::exp(tab.theta_minus_alpha * span) - tab.K);
    const bool trapezoid = quad == TimeQuadrature::Trapezoid;
    for (std::size_t k = i + 1; k <= n; ++k) {
        const double s = tab.t[k] - tab.t[i];
        double w;
        if (trapezoid) {
            w = k == n ? 0.5 * (tab.t[n] - tab.t[n - 1])
                       : 0.5 * (tab.t[k + 1] - tab.t[k - 1]);
        } else {
            w = tab.t[k] - tab.t[k - 1];
        }
        const double mean = x * std::exp(tab.theta_minus_alpha * s);
        double pm = gbm_partial_mean_below(cfg, x, s, b[k]);
        double p = gbm_cdf_below(cfg, x, s, b[k]);
        if (orientation == Orientation::StopAbove) {
            pm = mean - pm;
            p = 1.0 - p;
        }
        value -= w * tab.disc(i, k) * (tab.beta[k] * mean - (tab.g[k] * pm + tab.K * tab.ell[k] * p));
    }
    if (trapezoid) {
        const double w0 = 0.5 * (tab.t[i + 1] - tab.t[i]);
        const double H0 = tab.g[i] * x + tab.K * tab.ell[i];
        value -= w0 * (tab.beta[i] * x - mass0 * H0);
    }
    return value;
}

} // namespace annuity::detail
