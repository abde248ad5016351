#include <cmath>

#include "doctest.h"

#include "annuity/boundary.hpp"
#include "annuity/run_config.hpp"
#include "test_helpers.hpp"

using namespace annuity;

namespace {

// f == 1 exactly via identical flat-hazard laws; theta < rho and K > 0 give
// an upper boundary with gamma = K r / (rho - theta) in closed form.
ProblemConfig degenerate_cfg() {
    ProblemConfig cfg;
    cfg.theta = 0.035;
    cfg.K = 1.5;
    cfg.T = 10.0;
    cfg.scenario = Scenario::ProportionalHazard;
    GompertzMakeham flat{0.01, 0.0, 1.1};
    cfg.subjective = {flat, 0.0};
    cfg.objective = {flat, 0.0};
    return cfg;
}

} // namespace

TEST_CASE("terminal_value: closed form and error paths") {
    const auto cfg = degenerate_cfg();
    const auto regime = classify(cfg);
    REQUIRE(regime.kind == RegimeKind::UpperBoundary);
    const double want = -cfg.K * rate_r(cfg, cfg.T) / (cfg.theta - cfg.rho);
    CHECK(terminal_value(cfg, regime) == doctest::Approx(want).epsilon(1e-12));

    const auto low = preset_config("a-f08-Kneg2").problem;
    const auto low_regime = classify(low);
    CHECK(terminal_value(low, low_regime) > 0.0);

    // K<0 with decreasing g: effective horizon t0 where gamma blows up
    auto restricted = preset_config("a-f12-K2").problem;
    restricted.f_constant = 1.1;
    restricted.K = -2.0;
    const auto r2 = classify(restricted);
    REQUIRE(r2.kind == RegimeKind::RestrictedHorizon);
    REQUIRE_FALSE(r2.solve_after_t0);
    CHECK_THROWS_AS(terminal_value(restricted, r2), DegenerateTerminal);
    CHECK_THROWS_AS(solve(restricted, r2, SolverOptions{}), DegenerateTerminal);

    Regime trivial;
    trivial.kind = RegimeKind::StopEverywhere;
    CHECK_THROWS_AS(terminal_value(cfg, trivial), ConfigError);
}

TEST_CASE("kernel_Y limits collapse the indicator") {
    const auto cfg = preset_config("a-f12-K2").problem;
    const double t = 3.0, x = 25.0, s = 2.0;
    const double disc = discount(cfg, t, s);
    const double mean = gbm_mean(cfg, x, s);
    const auto [g, ell] = g_ell(cfg, t + s);
    const double beta = rate_beta(cfg, t + s);

    // c -> 0 with StopBelow: indicator mass vanishes
    CHECK(kernel_Y(cfg, t, x, s, 1e-12, Orientation::StopBelow) ==
          doctest::Approx(disc * beta * mean).epsilon(1e-9));
    // c -> inf with StopBelow: full mass
    const double full = disc * ((beta - g) * mean - cfg.K * ell);
    CHECK(kernel_Y(cfg, t, x, s, 1e12, Orientation::StopBelow) ==
          doctest::Approx(full).epsilon(1e-9));
    // StopAbove mirrors
    CHECK(kernel_Y(cfg, t, x, s, std::numeric_limits<double>::infinity(),
                   Orientation::StopAbove) ==
          doctest::Approx(disc * beta * mean).epsilon(1e-12));
}

TEST_CASE("kernel_Y against a Monte Carlo oracle") {
    const auto cfg = preset_config("a-f12-K2").problem;
    const double t = 0.0, s = 1.0;
    const double c = gamma_level(cfg, t).value();
    const double x = c;
    const double got = kernel_Y(cfg, t, x, s, c, Orientation::StopAbove);

    const auto [g, ell] = g_ell(cfg, t + s);
    const double beta = rate_beta(cfg, t + s);
    const double disc = discount(cfg, t, s);
    const CounterRng rng{777};
    const long n = 1000000;
    const double m = (cfg.theta - cfg.alpha - 0.5 * cfg.sigma * cfg.sigma) * s;
    const double v = cfg.sigma * std::sqrt(s);
    double sum = 0.0, sq = 0.0;
    for (long p = 0; p < n; ++p) {
        const double X = x * std::exp(m + v * rng.normal(p, 0));
        const double H = g * X + cfg.K * ell;
        const double y = disc * (beta * X - (X >= c ? H : 0.0));
        sum += y;
        sq += y * y;
    }
    const double mc = sum / n;
    const double se = std::sqrt((sq / n - mc * mc) / n);
    CHECK(std::abs(got - mc) < 3.0 * se);
}

TEST_CASE("residual: zero horizon and terminal bracket sign change") {
    const auto cfg = preset_config("a-f12-K2").problem;
    const int n = 600;
    std::vector<double> t(n + 1), b(n + 1, 0.0);
    for (int i = 0; i <= n; ++i) t[i] = cfg.T * i / n;
    const double gT = gamma_level(cfg, cfg.T).value();
    b[n] = gT;

    for (double x : {1.0, 20.0, 300.0}) {
        CHECK(residual(cfg, t, b, n, x, Orientation::StopAbove) == 0.0);
    }

    const double delta = 0.05;
    const double lo = residual(cfg, t, b, n - 1, gT * (1.0 - delta), Orientation::StopAbove);
    const double hi = residual(cfg, t, b, n - 1, gT * (1.0 + delta), Orientation::StopAbove);
    CHECK(lo < 0.0);
    CHECK(hi > 0.0);
}

TEST_CASE("solve: degenerate constant-coefficient config brackets cheaply") {
    const auto cfg = degenerate_cfg();
    SolverOptions opts;
    opts.n_steps = 400;
    opts.time_quadrature = TimeQuadrature::Trapezoid;
    const auto [bd, rep] = solve(cfg, opts);
    CHECK(bd.orientation == Orientation::StopAbove);
    CHECK(rep.bracket_expansions <= 3 * opts.n_steps);
    CHECK(rep.gamma_side_retries == 0);
    // root stays on the gamma side half-line (gamma is constant here)
    for (std::size_t i = 0; i < bd.t.size(); ++i) {
        const double gamma = gamma_level(cfg, bd.t[i]).value();
        CHECK(bd.values[i] >= gamma * (1.0 - 1e-6));
    }
}

TEST_CASE("solve: published scenario (a) presets") {
    auto fee = preset_config("a-f12-K2");
    fee.solver.n_steps = 300;
    const auto [bd_fee, rep_fee] = solve(fee.problem, fee.solver);
    CHECK(bd_fee.orientation == Orientation::StopAbove);
    CHECK(bd_fee.regime.kind == RegimeKind::UpperBoundary);
    // terminal node assigned exactly
    CHECK(bd_fee.values.back() == gamma_level(fee.problem, 30.0).value());
    // residual audit
    CHECK(rep_fee.max_normalized_residual <= 10.0 * fee.solver.root_tol);

    auto incentive = preset_config("a-f08-Kneg2");
    incentive.solver.n_steps = 300;
    const auto [bd_inc, rep_inc] = solve(incentive.problem, incentive.solver);
    CHECK(bd_inc.orientation == Orientation::StopBelow);
    CHECK(bd_inc.regime.kind == RegimeKind::LowerBoundary);
    CHECK(rep_inc.max_normalized_residual <= 10.0 * incentive.solver.root_tol);
    // gamma-side bound for the stop-below orientation
    for (std::size_t i = 0; i < bd_inc.t.size(); ++i) {
        const double gamma = gamma_level(incentive.problem, bd_inc.t[i]).value();
        CHECK(bd_inc.values[i] <= gamma * (1.0 + 1e-6));
    }
}

TEST_CASE("solve: scenario (b) short-horizon preset") {
    auto rc = preset_config("b-mu-neg005-K2-lo");
    rc.solver.n_steps = 300;
    const auto [bd, rep] = solve(rc.problem, rc.solver);
    CHECK(bd.orientation == Orientation::StopAbove);
    CHECK(bd.values.front() > bd.values.back()); // decreasing on this preset
    CHECK(rep.max_normalized_residual <= 10.0 * rc.solver.root_tol);
}

TEST_CASE("solve requires a boundary regime and enough steps") {
    const auto stop_all = preset_config("a-f12-Kneg").problem;
    CHECK_THROWS_AS(solve(stop_all, SolverOptions{}), ConfigError);

    auto rc = preset_config("a-f12-K2");
    SolverOptions opts;
    opts.n_steps = 8;
    CHECK_THROWS_AS(solve(rc.problem, opts), ConfigError);
}

TEST_CASE("bracket failure reported when the cap excludes the root") {
    auto rc = preset_config("a-f12-K2");
    rc.solver.n_steps = 32;
    rc.solver.x_cap_factor = 1.0; // cap = |K| = 2, far below gamma ~ 19..60
    CHECK_THROWS_AS(solve(rc.problem, rc.solver), BracketFailure);
}

TEST_CASE("refinement self-consistency away from the horizon") {
    // trapezoid time sum: the boundary is grid-converged, so doubling the
    // grid moves nodes by far less than h
    auto rc = preset_config("a-f08-Kneg2");
    rc.solver.time_quadrature = TimeQuadrature::Trapezoid;
    rc.solver.n_steps = 150;
    const auto [coarse, rep_c] = solve(rc.problem, rc.solver);
    rc.solver.n_steps = 300;
    const auto [fine, rep_f] = solve(rc.problem, rc.solver);
    const double h = rep_c.h;
    double sup = 0.0;
    for (std::size_t i = 0; i < coarse.t.size(); ++i) {
        if (coarse.t[i] > rc.problem.T - 5.0 * h) break;
        sup = std::max(sup, std::abs(coarse.values[i] - fine.values[2 * i]));
    }
    CHECK(sup <= 1.0 * h);

    // rectangle rule: first-order drift, still O(h) with a config constant
    rc.solver.time_quadrature = TimeQuadrature::RightRectangle;
    rc.solver.n_steps = 150;
    const auto [rc_coarse, r1] = solve(rc.problem, rc.solver);
    rc.solver.n_steps = 300;
    const auto [rc_fine, r2] = solve(rc.problem, rc.solver);
    double sup_rect = 0.0;
    for (std::size_t i = 0; i < rc_coarse.t.size(); ++i) {
        if (rc_coarse.t[i] > rc.problem.T - 5.0 * r1.h) break;
        sup_rect = std::max(sup_rect, std::abs(rc_coarse.values[i] - rc_fine.values[2 * i]));
    }
    CHECK(sup_rect <= 2.0 * r1.h);
}

TEST_CASE("clustered grid keeps the terminal node next to gamma(T)") {
    auto rc = preset_config("a-f08-Kneg2");
    rc.solver.n_steps = 300;
    rc.solver.refine_near_T = true;
    const auto [bd, rep] = solve(rc.problem, rc.solver);
    const std::size_t n = bd.t.size() - 1;
    const double gT = gamma_level(rc.problem, bd.t[n]).value();
    const double h_last = bd.t[n] - bd.t[n - 1];
    CHECK(h_last < rep.h / 100.0);
    CHECK(std::abs(bd.values[n - 1] - gT) < 0.02 * gT);
}

TEST_CASE("restricted horizon solves its sub-interval") {
    // f slightly above 1, theta > rho: g decreasing through zero, K > 0
    auto cfg = preset_config("a-f12-K2").problem;
    cfg.f_constant = 1.1;
    const auto regime = classify(cfg);
    REQUIRE(regime.kind == RegimeKind::RestrictedHorizon);
    REQUIRE(regime.solve_after_t0);
    REQUIRE(regime.inner == RegimeKind::UpperBoundary);
    SolverOptions opts;
    opts.n_steps = 256;
    opts.time_quadrature = TimeQuadrature::Trapezoid;
    const auto [bd, rep] = solve(cfg, regime, opts);
    CHECK(bd.t.front() > regime.t0);
    CHECK(bd.t.back() == cfg.T);
    CHECK(bd.orientation == Orientation::StopAbove);
    CHECK(rep.max_normalized_residual <= 10.0 * opts.root_tol);
    // boundary blows up toward t0 where gamma does
    CHECK(bd.values.front() > 3.0 * bd.values.back());
    // off-gamma-side roots are confined to the blow-up layer near t0
    CHECK(rep.gamma_side_retries <= opts.n_steps / 5);
}

TEST_CASE("boundary grid lookup") {
    auto rc = preset_config("a-f08-Kneg2");
    rc.solver.n_steps = 64;
    const auto [bd, rep] = solve(rc.problem, rc.solver);
    CHECK(bd.index_of(0.0) == 0);
    CHECK(bd.index_of(30.0) == 64);
    CHECK(bd.index_of(15.0) == 32);
    CHECK_THROWS_AS(bd.index_of(15.1), GridMismatch);
}
