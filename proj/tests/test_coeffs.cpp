#include <cmath>
#include <random>

#include "doctest.h"

#include "annuity/coeffs.hpp"
#include "test_helpers.hpp"

using namespace annuity;

namespace {

const GompertzMakeham kGM{0.00055845, 0.000025670, 1.1011};

ProblemConfig scenario_a(double f, double K, double theta = 0.045, double T = 30.0) {
    ProblemConfig cfg;
    cfg.theta = theta;
    cfg.K = K;
    cfg.T = T;
    cfg.scenario = Scenario::ConstantF;
    cfg.f_constant = f;
    cfg.subjective = {kGM, 0.0};
    cfg.objective = {kGM, 0.0};
    return cfg;
}

ProblemConfig scenario_b(double mu_bar, double K, double theta = 0.045, double T = 9.0) {
    ProblemConfig cfg;
    cfg.theta = theta;
    cfg.K = K;
    cfg.T = T;
    cfg.scenario = Scenario::ProportionalHazard;
    cfg.subjective = {kGM, mu_bar};
    cfg.objective = {kGM, 0.0};
    return cfg;
}

// f = 1 exactly: flat-hazard laws make subjective == objective
ProblemConfig unit_f(double theta, double K, double hazard_level = 0.0) {
    ProblemConfig cfg;
    cfg.theta = theta;
    cfg.K = K;
    cfg.scenario = Scenario::ProportionalHazard;
    GompertzMakeham flat{hazard_level, 0.0, 1.1};
    cfg.subjective = {flat, 0.0};
    cfg.objective = {flat, 0.0};
    return cfg;
}

} // namespace

TEST_CASE("r and beta shift the hazard by rho and alpha") {
    auto cfg = scenario_a(1.0, 0.0);
    const MortalityLaw flat{{0.0, 0.0, 1.1}, 0.0};
    cfg.subjective = flat;
    CHECK(rate_r(cfg, 3.0) == doctest::Approx(cfg.rho).epsilon(1e-15));
    CHECK(rate_beta(cfg, 3.0) == doctest::Approx(cfg.alpha).epsilon(1e-15));

    const auto gm = scenario_a(1.2, 2.0);
    for (double t = 0.0; t <= 30.0; t += 2.5) {
        CHECK(rate_r(gm, t) - rate_beta(gm, t) ==
              doctest::Approx(gm.rho - gm.alpha).epsilon(1e-12));
    }
    const double mu10 = hazard(gm.subjective, 60.0);
    CHECK(rate_r(gm, 10.0) == doctest::Approx(0.04 + mu10).epsilon(1e-14));
}

TEST_CASE("money's worth: identical laws give f=1, loads move it the right way") {
    auto same = scenario_b(0.0, 0.0);
    const auto [f0, fp0] = moneys_worth(same, 4.0);
    CHECK(f0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(fp0) < 1e-12);

    auto stored = scenario_a(1.2, 0.0);
    const auto [fa, fpa] = moneys_worth(stored, 11.0);
    CHECK(fa == 1.2);
    CHECK(fpa == 0.0);

    auto healthy = scenario_b(-0.05, 0.0, 0.045, 30.0);
    auto sick = scenario_b(0.05, 0.0, 0.045, 30.0);
    for (double t = 0.0; t <= 30.0; t += 3.0) {
        CHECK(moneys_worth(healthy, t).f > 1.0);
        CHECK(moneys_worth(sick, t).f < 1.0);
    }
    // frozen from a scipy quadrature oracle of a^S/a^O at age 50
    CHECK(moneys_worth(healthy, 0.0).f == doctest::Approx(1.00877454355905).epsilon(1e-6));
}

TEST_CASE("money's worth derivative matches finite differences of f") {
    auto cfg = scenario_b(-0.05, 0.0, 0.045, 30.0);
    const double h = 1e-4;
    for (double t = 1.0; t <= 29.0; t += 4.0) {
        const double fp = moneys_worth(cfg, t).f_prime;
        const double fd =
            (moneys_worth(cfg, t + h).f - moneys_worth(cfg, t - h).f) / (2.0 * h);
        CHECK(testutil::rel_err(fp, fd) < 1e-5);
    }
}

TEST_CASE("g and ell: unit money's worth reduces them to theta-rho and r") {
    auto cfg = unit_f(0.035, 1.0, 0.02);
    for (double t = 0.0; t <= 30.0; t += 5.0) {
        const auto [g, ell] = g_ell(cfg, t);
        CHECK(g == doctest::Approx(cfg.theta - cfg.rho).epsilon(1e-12));
        CHECK(ell == doctest::Approx(rate_r(cfg, t)).epsilon(1e-12));
    }
}

TEST_CASE("sign structure of g in scenario (a)") {
    const auto high = scenario_a(1.2, 2.0);
    const auto low = scenario_a(0.8, -2.0);
    for (int j = 0; j < 512; ++j) {
        const double t = 30.0 * j / 511;
        CHECK(g_ell(high, t).g < 0.0);
        CHECK(g_ell(low, t).g > 0.0);
    }
}

TEST_CASE("scenario (b): g near zero has the sign of theta-rho") {
    const auto up = scenario_b(0.05, -2.0, 0.045);
    CHECK(g_ell(up, 0.0).g > 0.0);
    const auto down = scenario_b(0.05, -2.0, 0.035);
    CHECK(g_ell(down, 0.0).g < 0.0);
}

TEST_CASE("H and G evaluate the running gain and the stop payoff") {
    const auto cfg = scenario_a(0.8, -2.0);
    for (double t : {0.0, 12.0, 30.0}) {
        const auto [g, ell] = g_ell(cfg, t);
        CHECK(running_gain_H(cfg, t, 0.0) == doctest::Approx(cfg.K * ell).epsilon(1e-12));
        CHECK(running_gain_H(cfg, t, 10.0) ==
              doctest::Approx(g * 10.0 + cfg.K * ell).epsilon(1e-12));
        CHECK(stop_payoff_G(cfg, t, 10.0) ==
              doctest::Approx(0.8 * (10.0 - cfg.K)).epsilon(1e-12));
    }
}

TEST_CASE("gamma: zero level of H") {
    const auto k0 = scenario_a(1.2, 0.0);
    CHECK(gamma_level(k0, 5.0).value() == 0.0);

    // f == 1, theta < rho, K > 0: gamma = -K r/(theta-rho) > 0
    auto cfg = unit_f(0.035, 1.5, 0.01);
    for (double t : {0.0, 10.0, 25.0}) {
        const double want = -1.5 * rate_r(cfg, t) / (cfg.theta - cfg.rho);
        CHECK(gamma_level(cfg, t).value() == doctest::Approx(want).epsilon(1e-12));
        CHECK(gamma_level(cfg, t).value() > 0.0);
    }

    const auto fee = scenario_a(1.2, 2.0);
    for (double t = 0.0; t <= 30.0; t += 1.5) {
        const auto gamma = gamma_level(fee, t);
        REQUIRE(gamma.has_value());
        CHECK(*gamma > 0.0);
        // H vanishes on the gamma curve
        CHECK(std::abs(running_gain_H(fee, t, *gamma)) < 1e-10);
    }
}

TEST_CASE("classify: published scenario (a) cases") {
    CHECK(classify(scenario_a(1.2, 2.0)).kind == RegimeKind::UpperBoundary);
    CHECK(classify(scenario_a(0.8, -2.0)).kind == RegimeKind::LowerBoundary);
    CHECK(classify(scenario_a(1.2, -1.0)).kind == RegimeKind::StopEverywhere);
    CHECK(classify(scenario_a(1.2, 0.0)).kind == RegimeKind::StopEverywhere);
    CHECK(classify(scenario_a(0.8, 2.0)).kind == RegimeKind::NeverStopEarly);
    CHECK(classify(scenario_a(0.8, 0.0)).kind == RegimeKind::NeverStopEarly);
}

TEST_CASE("classify is stable under scan refinement") {
    for (const auto& cfg :
         {scenario_a(1.2, 2.0), scenario_a(0.8, -2.0), scenario_b(-0.05, 2.0, 0.035),
          scenario_a(0.9, -1.0, 0.035), scenario_a(1.1, 2.0, 0.045)}) {
        const auto coarse = classify(cfg, 64);
        const auto fine = classify(cfg, 512);
        CHECK(coarse.kind == fine.kind);
        if (coarse.kind == RegimeKind::RestrictedHorizon) {
            CHECK(coarse.inner == fine.inner);
            CHECK(std::abs(coarse.t0 - fine.t0) < 1e-6);
        }
    }
    CHECK_THROWS_AS(classify(scenario_a(1.2, 2.0), 32), ConfigError);
}

TEST_CASE("classify: single sign change maps to the four K/monotonicity cases") {
    // f slightly below 1 with theta < rho: g increasing through zero
    const auto inc = scenario_a(0.9, -1.0, 0.035);
    REQUIRE(g_ell(inc, 0.0).g < 0.0);
    REQUIRE(g_ell(inc, 30.0).g > 0.0);
    const auto inc_regime = classify(inc);
    CHECK(inc_regime.kind == RegimeKind::RestrictedHorizon);
    CHECK(inc_regime.inner == RegimeKind::LowerBoundary);
    CHECK(inc_regime.solve_after_t0);
    CHECK(inc_regime.outer == OuterPolicy::ApproximateLower);
    CHECK(std::abs(g_ell(inc, inc_regime.t0).g) < 1e-9);

    auto inc_fee = inc;
    inc_fee.K = 1.0;
    CHECK(classify(inc_fee).kind == RegimeKind::Unsupported);

    // f slightly above 1 with theta > rho: g decreasing through zero
    const auto dec = scenario_a(1.1, 2.0, 0.045);
    REQUIRE(g_ell(dec, 0.0).g > 0.0);
    REQUIRE(g_ell(dec, 30.0).g < 0.0);
    const auto dec_regime = classify(dec);
    CHECK(dec_regime.kind == RegimeKind::RestrictedHorizon);
    CHECK(dec_regime.inner == RegimeKind::UpperBoundary);
    CHECK(dec_regime.solve_after_t0);
    CHECK(dec_regime.outer == OuterPolicy::ForcedContinuation);

    auto dec_incentive = dec;
    dec_incentive.K = -2.0;
    const auto dec_regime2 = classify(dec_incentive);
    CHECK(dec_regime2.kind == RegimeKind::RestrictedHorizon);
    CHECK(dec_regime2.inner == RegimeKind::LowerBoundary);
    CHECK_FALSE(dec_regime2.solve_after_t0);
    CHECK(dec_regime2.outer == OuterPolicy::StopImmediately);

    auto dec_k0 = dec;
    dec_k0.K = 0.0;
    CHECK(classify(dec_k0).kind == RegimeKind::DeterministicK0);
}

TEST_CASE("lower boundary regime: K*ell <= 0 keeps H(t,0) <= 0") {
    const auto cfg = scenario_a(0.8, -2.0);
    REQUIRE(classify(cfg).kind == RegimeKind::LowerBoundary);
    for (int j = 0; j < 128; ++j) {
        const double t = 30.0 * j / 127;
        CHECK(cfg.K * g_ell(cfg, t).ell <= 0.0);
        CHECK(running_gain_H(cfg, t, 0.0) <= 0.0);
    }
}

namespace {

// brute force: cumulative trapezoid of the F integrand on a dense grid
double k0_brute_force(const ProblemConfig& cfg, double t, int grid_points) {
    const double span = cfg.T - t;
    double best_val = 0.0, best_s = 0.0, acc = 0.0, prev = 0.0;
    auto integrand = [&](double u) {
        const double disc = std::exp(-cfg.rho * u - (integrated_hazard(cfg.subjective,
                                                                       cfg.eta, t + u) -
                                                     integrated_hazard(cfg.subjective,
                                                                       cfg.eta, t)));
        return disc * g_ell(cfg, t + u).g * std::exp((cfg.theta - cfg.alpha) * u);
    };
    prev = integrand(0.0);
    for (int j = 1; j <= grid_points; ++j) {
        const double u = span * j / grid_points;
        const double cur = integrand(u);
        acc += 0.5 * (prev + cur) * span / grid_points;
        prev = cur;
        if (acc > best_val) {
            best_val = acc;
            best_s = u;
        }
    }
    return best_s;
}

} // namespace

TEST_CASE("k0_optimal_time: monotone g gives the endpoints") {
    auto neg = scenario_a(1.2, 0.0); // g < 0 everywhere
    CHECK(k0_optimal_time(neg, 0.0) == 0.0);
    CHECK(k0_optimal_time(neg, 12.0) == 0.0);

    auto pos = scenario_a(0.8, 0.0); // g > 0 everywhere
    CHECK(k0_optimal_time(pos, 0.0) == doctest::Approx(30.0));
    CHECK(k0_optimal_time(pos, 12.0) == doctest::Approx(18.0));

    CHECK_THROWS_AS(k0_optimal_time(scenario_a(1.2, 2.0), 0.0), ConfigError);
}

TEST_CASE("k0_optimal_time: one sign change, against brute force") {
    // decreasing g: stop at the zero crossing
    auto dec = scenario_a(1.1, 0.0, 0.045);
    const double s_dec = k0_optimal_time(dec, 0.0);
    CHECK(std::abs(s_dec - k0_brute_force(dec, 0.0, 10000)) < 30.0 / 10000 + 1e-9);
    CHECK(std::abs(g_ell(dec, s_dec).g) < 1e-8);

    // increasing g: wait until T
    auto inc = scenario_a(0.9, 0.0, 0.035);
    CHECK(k0_optimal_time(inc, 0.0) == doctest::Approx(30.0));
}

TEST_CASE("k0_optimal_time agrees with brute force on randomized configs") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> f_d(0.7, 1.3), theta_d(0.02, 0.06),
        T_d(5.0, 35.0);
    for (int rep = 0; rep < 20; ++rep) {
        auto cfg = scenario_a(f_d(rng), 0.0, theta_d(rng), T_d(rng));
        const double t = 0.25 * cfg.T * (rep % 4);
        const double got = k0_optimal_time(cfg, t);
        const double brute = k0_brute_force(cfg, t, 10000);
        CHECK(std::abs(got - brute) <= (cfg.T - t) / 10000 + 1e-9);
    }
}
