#pragma once

#include <optional>
#include <string>
#include <vector>

#include "annuity/mortality.hpp"

namespace annuity {

enum class Scenario {
    ConstantF,          // money's worth f(t) = const, subjective law = base law
    ProportionalHazard, // objective = base law, subjective = (1+mu_bar)*objective
};

struct ProblemConfig {
    double theta = 0.045;   // 1/year, fund drift
    double alpha = 0.035;   // 1/year, dividend rate
    double sigma = 0.10;    // 1/sqrt(year)
    double rho = 0.04;      // 1/year, agent discount
    double rho_hat = 0.04;  // 1/year, insurer rate
    double K = 0.0;         // currency; fee if >0, incentive if <0
    double T = 30.0;        // years
    double eta = 50.0;      // years, age at t=0

    MortalityLaw subjective;
    MortalityLaw objective;

    Scenario scenario = Scenario::ConstantF;
    double f_constant = 1.0; // scenario ConstantF only

    void validate() const;
};

struct MoneysWorth {
    double f;       // dimensionless
    double f_prime; // 1/year
};

/// f(t) = a^S_{eta+t} (discounted at rho) / a^O_{eta+t} (discounted at rho_hat),
/// f' by the quotient rule from the annuity-factor ODE identity.
/// Scenario ConstantF returns the stored constant and f' = 0.
MoneysWorth moneys_worth(const ProblemConfig& cfg, double t);

double rate_r(const ProblemConfig& cfg, double t);    // rho + mu^S(eta+t)
double rate_beta(const ProblemConfig& cfg, double t); // alpha + mu^S(eta+t)

struct GEll {
    double g;   // 1/year
    double ell; // 1/year
};

/// g = f' + beta*(1-f) + (theta-rho)*f,  ell = r*f - f'.
GEll g_ell(const ProblemConfig& cfg, double t);

double running_gain_H(const ProblemConfig& cfg, double t, double x); // g(t)x + K ell(t)
double stop_payoff_G(const ProblemConfig& cfg, double t, double x);  // f(t)(x - K)

/// Zero level of H: gamma(t) = -K ell(t)/g(t). Returns nullopt inside the
/// sign-change neighbourhood |g| <= g_eps where gamma blows up.
std::optional<double> gamma_level(const ProblemConfig& cfg, double t);

double gamma_eps(const ProblemConfig& cfg); // singularity guard for gamma

enum class RegimeKind {
    StopEverywhere,
    NeverStopEarly,
    DeterministicK0,
    LowerBoundary, // g > 0: stop when wealth falls below b
    UpperBoundary, // g < 0: stop when wealth exceeds b
    RestrictedHorizon,
    Unsupported,
};

/// What holds on the complement of the solvable sub-interval of a
/// RestrictedHorizon regime.
enum class OuterPolicy {
    None,
    StopImmediately,    // S fills [t0,T] x R+
    ForcedContinuation, // C fills [0,t0] x R+
    ApproximateLower,   // lower boundary exists on [0,t0] but is out of reach
};

struct Regime {
    RegimeKind kind = RegimeKind::Unsupported;
    // RestrictedHorizon fields
    double t0 = 0.0;
    RegimeKind inner = RegimeKind::Unsupported; // LowerBoundary or UpperBoundary
    bool solve_after_t0 = false;                // sub-interval is (t0,T] if true, [0,t0) otherwise
    OuterPolicy outer = OuterPolicy::None;
    std::string reason; // Unsupported diagnostics

    bool is_boundary() const {
        return kind == RegimeKind::LowerBoundary || kind == RegimeKind::UpperBoundary ||
               kind == RegimeKind::RestrictedHorizon;
    }
    /// Orientation of the solvable boundary (LowerBoundary or UpperBoundary).
    RegimeKind boundary_kind() const {
        return kind == RegimeKind::RestrictedHorizon ? inner : kind;
    }
};

std::string to_string(RegimeKind kind);

/// Classify the instance from the signs of g, K*ell and gamma on a scan grid.
/// Sign changes of g are refined by bisection to 1e-8 years.
Regime classify(const ProblemConfig& cfg, int scan_points = 256);

/// K=0 case: the problem reduces to maximising
/// F(s) = int_0^s exp(-int_0^u r(t+v)dv) g(t+u) e^{(theta-alpha)u} du
/// over s in [0, T-t]. Returns the earliest maximizer.
double k0_optimal_time(const ProblemConfig& cfg, double t);

} // namespace annuity
