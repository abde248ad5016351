#include "annuity/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace annuity {

void ProblemConfig::validate() const {
    if (!(sigma > 0.0)) throw ConfigError("ProblemConfig requires sigma > 0");
    if (!(rho > 0.0)) throw ConfigError("ProblemConfig requires rho > 0");
    if (!(rho_hat > 0.0)) throw ConfigError("ProblemConfig requires rho_hat > 0");
    if (!(T > 0.0)) throw ConfigError("ProblemConfig requires T > 0");
    if (!(eta > 0.0)) throw ConfigError("ProblemConfig requires eta > 0");
    subjective.validate();
    objective.validate();
    if (scenario == Scenario::ConstantF && !(f_constant > 0.0)) {
        throw ConfigError("scenario ConstantF requires f_constant > 0");
    }
}

MoneysWorth moneys_worth(const ProblemConfig& cfg, double t) {
    if (cfg.scenario == Scenario::ConstantF) {
        return {cfg.f_constant, 0.0};
    }
    const double age = cfg.eta + t;
    const auto quad_s = AnnuityQuadrature::auto_for(cfg.subjective, cfg.rho, age);
    const auto quad_o = AnnuityQuadrature::auto_for(cfg.objective, cfg.rho_hat, age);
    const double a_s = annuity_factor(cfg.subjective, cfg.rho, age, quad_s);
    const double a_o = annuity_factor(cfg.objective, cfg.rho_hat, age, quad_o);
    const double da_s = (cfg.rho + hazard(cfg.subjective, age)) * a_s - 1.0;
    const double da_o = (cfg.rho_hat + hazard(cfg.objective, age)) * a_o - 1.0;
    const double f = a_s / a_o;
    const double f_prime = (da_s * a_o - a_s * da_o) / (a_o * a_o);
    return {f, f_prime};
}

double rate_r(const ProblemConfig& cfg, double t) {
    return cfg.rho + hazard(cfg.subjective, cfg.eta + t);
}

double rate_beta(const ProblemConfig& cfg, double t) {
    return cfg.alpha + hazard(cfg.subjective, cfg.eta + t);
}

GEll g_ell(const ProblemConfig& cfg, double t) {
    const auto [f, f_prime] = moneys_worth(cfg, t);
    const double beta = rate_beta(cfg, t);
    const double r = rate_r(cfg, t);
    return {f_prime + beta * (1.0 - f) + (cfg.theta - cfg.rho) * f, r * f - f_prime};
}

double running_gain_H(const ProblemConfig& cfg, double t, double x) {
    const auto [g, ell] = g_ell(cfg, t);
    return g * x + cfg.K * ell;
}

double stop_payoff_G(const ProblemConfig& cfg, double t, double x) {
    return moneys_worth(cfg, t).f * (x - cfg.K);
}

double gamma_eps(const ProblemConfig& cfg) {
    return 1e-12 * (1.0 + std::abs(cfg.theta - cfg.rho));
}

std::optional<double> gamma_level(const ProblemConfig& cfg, double t) {
    const auto [g, ell] = g_ell(cfg, t);
    if (std::abs(g) <= gamma_eps(cfg)) return std::nullopt;
    return -cfg.K * ell / g;
}

std::string to_string(RegimeKind kind) {
    switch (kind) {
        case RegimeKind::StopEverywhere: return "StopEverywhere";
        case RegimeKind::NeverStopEarly: return "NeverStopEarly";
        case RegimeKind::DeterministicK0: return "DeterministicK0";
        case RegimeKind::LowerBoundary: return "LowerBoundary";
        case RegimeKind::UpperBoundary: return "UpperBoundary";
        case RegimeKind::RestrictedHorizon: return "RestrictedHorizon";
        case RegimeKind::Unsupported: return "Unsupported";
    }
    return "?";
}

namespace {

double bisect_g_zero(const ProblemConfig& cfg, double lo, double hi) {
    double g_lo = g_ell(cfg, lo).g;
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        const double g_mid = g_ell(cfg, mid).g;
        if ((g_lo < 0.0) == (g_mid < 0.0)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

Regime classify(const ProblemConfig& cfg, int scan_points) {
    cfg.validate();
    if (scan_points < 64) throw ConfigError("classify requires scan_points >= 64");

    std::vector<double> ts(scan_points), gs(scan_points);
    bool ell_positive = true;
    for (int j = 0; j < scan_points; ++j) {
        const double t = cfg.T * j / (scan_points - 1);
        const auto [g, ell] = g_ell(cfg, t);
        ts[j] = t;
        gs[j] = g;
        if (!(ell > 0.0)) ell_positive = false;
    }
    if (!ell_positive) {
        Regime out;
        out.kind = RegimeKind::Unsupported;
        out.reason = "ell(t) is not positive on the scan grid";
        return out;
    }

    // Sign runs of g; exact zeros join the following run.
    std::vector<std::pair<int, int>> runs; // (sign, first index)
    for (int j = 0; j < scan_points; ++j) {
        const int s = gs[j] > 0.0 ? 1 : (gs[j] < 0.0 ? -1 : 0);
        if (s == 0) continue;
        if (runs.empty() || runs.back().first != s) runs.emplace_back(s, j);
    }

    Regime out;
    if (runs.empty()) {
        out.kind = RegimeKind::Unsupported;
        out.reason = "g vanishes on the whole scan grid";
        return out;
    }

    if (runs.size() == 1) {
        const bool g_positive = runs.front().first > 0;
        if (g_positive) {
            out.kind = cfg.K < 0.0 ? RegimeKind::LowerBoundary : RegimeKind::NeverStopEarly;
        } else {
            out.kind = cfg.K > 0.0 ? RegimeKind::UpperBoundary : RegimeKind::StopEverywhere;
        }
        return out;
    }

    if (runs.size() > 2) {
        out.kind = RegimeKind::Unsupported;
        out.reason = "g changes sign more than once on the scan grid";
        return out;
    }

    // Exactly one sign change, at t0 in (0,T).
    const int j_hi = runs[1].second;
    const double t0 = bisect_g_zero(cfg, ts[j_hi - 1], ts[j_hi]);
    const bool increasing = runs[1].first > 0; // g goes negative -> positive

    if (cfg.K == 0.0) {
        out.kind = RegimeKind::DeterministicK0;
        out.t0 = t0;
        return out;
    }

    out.kind = RegimeKind::RestrictedHorizon;
    out.t0 = t0;
    if (increasing) {
        if (cfg.K < 0.0) {
            // g>0 on (t0,T]: lower boundary there; on [0,t0] a lower boundary
            // exists but falls outside the solvable setting.
            out.inner = RegimeKind::LowerBoundary;
            out.solve_after_t0 = true;
            out.outer = OuterPolicy::ApproximateLower;
        } else {
            out.kind = RegimeKind::Unsupported;
            out.reason = "K>0 with increasing g: stopping set may be a band; unsupported";
        }
    } else {
        if (cfg.K < 0.0) {
            // g>0 on [0,t0): lower boundary with effective horizon t0;
            // S fills [t0,T] x R+ so stopping is immediate there.
            out.inner = RegimeKind::LowerBoundary;
            out.solve_after_t0 = false;
            out.outer = OuterPolicy::StopImmediately;
        } else {
            // g<0 on (t0,T]: upper boundary there; R fills [0,t0] x R+ so
            // continuation is forced before t0.
            out.inner = RegimeKind::UpperBoundary;
            out.solve_after_t0 = true;
            out.outer = OuterPolicy::ForcedContinuation;
        }
    }
    return out;
}

double k0_optimal_time(const ProblemConfig& cfg, double t) {
    if (cfg.K != 0.0) throw ConfigError("k0_optimal_time requires K = 0");
    cfg.validate();
    const double span = cfg.T - t;
    if (span <= 0.0) return 0.0;

    // F'(s) has the sign of g(t+s), so maximizers sit at the endpoints or at
    // downward zero crossings of g. Scan, refine crossings, compare F there.
    const int n_scan = 2048;
    std::vector<double> cand{0.0};
    double g_prev = g_ell(cfg, t).g;
    double u_prev = 0.0;
    for (int j = 1; j <= n_scan; ++j) {
        const double u = span * j / n_scan;
        const double g = g_ell(cfg, t + u).g;
        if (g_prev > 0.0 && g <= 0.0) {
            cand.push_back(bisect_g_zero(cfg, t + u_prev, t + u) - t);
        }
        g_prev = g;
        u_prev = u;
    }
    cand.push_back(span);

    // F via composite Gauss-Legendre on <=1-year panels.
    const auto& nw = gauss_legendre(8);
    auto F = [&](double s) {
        if (s <= 0.0) return 0.0;
        const int n_panels = std::max(1, static_cast<int>(std::ceil(s)));
        const double lambda0 = integrated_hazard(cfg.subjective, cfg.eta, t);
        double acc = 0.0;
        for (int p = 0; p < n_panels; ++p) {
            const double lo = s * p / n_panels;
            const double hi = s * (p + 1) / n_panels;
            const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (const auto& [node, weight] : nw) {
                const double u = mid + half * node;
                const double disc = std::exp(
                    -cfg.rho * u -
                    (integrated_hazard(cfg.subjective, cfg.eta, t + u) - lambda0));
                acc += half * weight * disc * g_ell(cfg, t + u).g *
                       std::exp((cfg.theta - cfg.alpha) * u);
            }
        }
        return acc;
    };

    double best_val = -1e300;
    for (double s : cand) best_val = std::max(best_val, F(s));
    const double tol = 1e-12 * (1.0 + std::abs(best_val));
    for (double s : cand) {
        if (F(s) >= best_val - tol) return s; // earliest maximizer
    }
    return span;
}

} // namespace annuity
