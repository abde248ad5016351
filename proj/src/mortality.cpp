#include "annuity/mortality.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace annuity {

void GompertzMakeham::validate() const {
    if (!(A >= 0.0) || !(B >= 0.0) || !(C > 1.0)) {
        std::ostringstream msg;
        msg << "GompertzMakeham requires A>=0, B>=0, C>1; got A=" << A
            << " B=" << B << " C=" << C;
        throw ConfigError(msg.str());
    }
}

void MortalityLaw::validate() const {
    base.validate();
    if (!(proportional_load > -1.0)) {
        throw ConfigError("MortalityLaw proportional_load must be > -1");
    }
}

double hazard(const MortalityLaw& law, double age) {
    return (1.0 + law.proportional_load) *
           (law.base.A + law.base.B * std::pow(law.base.C, age));
}

double integrated_hazard(const MortalityLaw& law, double age, double s) {
    const double lnC = std::log(law.base.C);
    // C^s - 1 via expm1 keeps accuracy for small s
    const double growth = law.base.B * std::pow(law.base.C, age) * std::expm1(s * lnC) / lnC;
    return (1.0 + law.proportional_load) * (law.base.A * s + growth);
}

double survival(const MortalityLaw& law, double age, double s) {
    return std::exp(-integrated_hazard(law, age, s));
}

const std::vector<std::pair<double, double>>& gauss_legendre(int n) {
    static std::map<int, std::vector<std::pair<double, double>>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    // Roots of P_n by Newton from the Chebyshev-like initial guess.
    std::vector<std::pair<double, double>> nw(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        nw[i] = {-x, w};
        nw[n - 1 - i] = {x, w};
    }
    auto [pos, inserted] = cache.emplace(n, std::move(nw));
    (void)inserted;
    return pos->second;
}

namespace {

double tail_bound(const MortalityLaw& law, double discount, double age, double U) {
    return survival(law, age, U) * std::exp(-discount * U) / discount;
}

} // namespace

AnnuityQuadrature AnnuityQuadrature::auto_for(const MortalityLaw& law, double discount,
                                              double age) {
    constexpr double survival_floor = 1e-8;
    constexpr double U_max = 1000.0;
    for (double U = 5.0; U <= U_max; U += 5.0) {
        if (age + U >= 130.0 && survival(law, age, U) < survival_floor) {
            return AnnuityQuadrature{U, 8};
        }
    }
    // Survival never decays (e.g. B=0 with tiny A): push U until the
    // discounted tail alone is negligible.
    for (double U = 5.0; U <= U_max; U += 5.0) {
        if (tail_bound(law, discount, age, U) <= tail_tol) {
            return AnnuityQuadrature{U, 8};
        }
    }
    return AnnuityQuadrature{U_max, 8}; // annuity_factor reports the tail error
}

double annuity_factor(const MortalityLaw& law, double discount, double age,
                      const AnnuityQuadrature& quad) {
    if (!(discount > 0.0)) throw ConfigError("annuity_factor requires discount > 0");
    const double U = quad.truncation_horizon;
    if (!(U > 0.0)) throw ConfigError("annuity_factor requires truncation_horizon > 0");

    const double tail = tail_bound(law, discount, age, U);
    if (tail > AnnuityQuadrature::tail_tol) {
        std::ostringstream msg;
        msg << "annuity tail bound " << tail << " exceeds " << AnnuityQuadrature::tail_tol
            << " at U=" << U << " (age " << age << ", discount " << discount << ")";
        throw QuadratureTailError(msg.str());
    }

    const int n_panels = static_cast<int>(std::ceil(U - 1e-12));
    if (quad.nodes_per_panel * n_panels < 16) {
        throw ConfigError("annuity quadrature needs at least 16 nodes in total");
    }
    const auto& nw = gauss_legendre(quad.nodes_per_panel);

    double value = 0.0;
    for (int p = 0; p < n_panels; ++p) {
        const double lo = p;
        const double hi = std::min<double>(p + 1, U);
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        double panel = 0.0;
        for (const auto& [node, weight] : nw) {
            const double u = mid + half * node;
            panel += weight * std::exp(-discount * u) * survival(law, age, u);
        }
        value += half * panel;
    }
    return value;
}

double annuity_factor_derivative(const MortalityLaw& law, double discount, double age,
                                 const AnnuityQuadrature& quad) {
    return (discount + hazard(law, age)) * annuity_factor(law, discount, age, quad) - 1.0;
}

} // namespace annuity
