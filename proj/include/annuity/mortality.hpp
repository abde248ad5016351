#pragma once

#include <vector>

#include "annuity/errors.hpp"

namespace annuity {

/// Gompertz-Makeham force of mortality mu(t) = A + B*C^t, t in years of age.
struct GompertzMakeham {
    double A = 0.0; // 1/year, hazard floor
    double B = 0.0; // 1/year, hazard scale
    double C = 1.1; // dimensionless growth base per year, C > 1

    void validate() const;
};

/// A Gompertz-Makeham law with an optional proportional hazard load:
/// effective hazard is (1 + proportional_load) * (A + B*C^age).
struct MortalityLaw {
    GompertzMakeham base;
    double proportional_load = 0.0; // mu_bar in (-1, +inf); 0 = identity

    void validate() const;
};

double hazard(const MortalityLaw& law, double age);

/// Closed form of int_0^s mu(age+u) du:
/// (1+mu_bar) * [A*s + B*C^age*(C^s - 1)/ln C].
double integrated_hazard(const MortalityLaw& law, double age, double s);

/// exp(-integrated_hazard); the survival probability {}_s p_age.
double survival(const MortalityLaw& law, double age, double s);

/// Composite Gauss-Legendre rule over 1-year panels on [0, U].
struct AnnuityQuadrature {
    double truncation_horizon = 80.0; // U, years
    int nodes_per_panel = 8;

    /// Default truncation rule: the smallest multiple of 5 years such that
    /// age+U >= 130 and survival(age,U) < 1e-8. Laws whose survival never
    /// decays (e.g. B=0 with tiny A) instead grow U until the discarded tail
    /// bound survival(age,U)*exp(-discount*U)/discount drops below tail_tol.
    static AnnuityQuadrature auto_for(const MortalityLaw& law, double discount, double age);

    static constexpr double tail_tol = 1e-9;
};

/// Truncated value of int_0^U exp(-discount*u) * survival(age,u) du.
/// Throws QuadratureTailError when the discarded tail bound exceeds tail_tol.
double annuity_factor(const MortalityLaw& law, double discount, double age,
                      const AnnuityQuadrature& quad);

/// d/dt a_{age+t} via the ODE identity (discount + mu(age)) * a_age - 1,
/// exact for the untruncated integral.
double annuity_factor_derivative(const MortalityLaw& law, double discount, double age,
                                 const AnnuityQuadrature& quad);

/// Gauss-Legendre nodes/weights on [-1,1]; cached per n.
const std::vector<std::pair<double, double>>& gauss_legendre(int n);

} // namespace annuity
