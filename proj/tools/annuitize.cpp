// Command line front end: regime reports, boundary solves, value probes,
// oracle cross-checks and mu_bar sweeps, with CSV/JSON output.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "annuity/boundary.hpp"
#include "annuity/mc.hpp"
#include "annuity/pde.hpp"
#include "annuity/run_config.hpp"
#include "annuity/valuation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace annuity;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const auto start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

struct Options {
    std::string config_path;
    std::string preset;
    std::string out_dir = ".";
    std::optional<long> seed;
    std::optional<int> n_steps;
};

RunConfig load_config(const Options& opt) {
    if (opt.config_path.empty() == opt.preset.empty()) {
        throw ConfigError("exactly one of --config or --preset is required");
    }
    RunConfig rc = opt.config_path.empty() ? preset_config(opt.preset)
                                           : RunConfig::from_file(opt.config_path);
    if (opt.seed) rc.seed = static_cast<std::uint64_t>(*opt.seed);
    if (opt.n_steps) rc.solver.n_steps = *opt.n_steps;
    return rc;
}

std::ofstream open_out(const Options& opt, const std::string& name) {
    fs::create_directories(opt.out_dir);
    const fs::path path = fs::path(opt.out_dir) / name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::string orientation_name(Orientation o) {
    return o == Orientation::StopBelow ? "stop_below" : "stop_above";
}

json regime_json(const Regime& regime) {
    json j;
    j["kind"] = to_string(regime.kind);
    if (regime.kind == RegimeKind::RestrictedHorizon) {
        j["t0"] = regime.t0;
        j["inner"] = to_string(regime.inner);
        j["solve_after_t0"] = regime.solve_after_t0;
        switch (regime.outer) {
            case OuterPolicy::StopImmediately: j["outer"] = "stop_immediately"; break;
            case OuterPolicy::ForcedContinuation: j["outer"] = "forced_continuation"; break;
            case OuterPolicy::ApproximateLower: j["outer"] = "approximate_lower"; break;
            case OuterPolicy::None: break;
        }
    }
    if (!regime.reason.empty()) j["reason"] = regime.reason;
    return j;
}

int cmd_regime(const Options& opt) {
    const RunConfig rc = load_config(opt);
    const auto& cfg = rc.problem;
    const Regime regime = classify(cfg);

    double g_min = 1e300, g_max = -1e300, ell_min = 1e300, ell_max = -1e300;
    double gamma_min = 1e300, gamma_max = -1e300;
    const int scan = 256;
    for (int j = 0; j < scan; ++j) {
        const double t = cfg.T * j / (scan - 1);
        const auto [g, ell] = g_ell(cfg, t);
        g_min = std::min(g_min, g);
        g_max = std::max(g_max, g);
        ell_min = std::min(ell_min, ell);
        ell_max = std::max(ell_max, ell);
        if (auto gm = gamma_level(cfg, t); gm && std::isfinite(*gm)) {
            gamma_min = std::min(gamma_min, *gm);
            gamma_max = std::max(gamma_max, *gm);
        }
    }
    std::cout << "regime: " << to_string(regime.kind) << "\n";
    if (regime.kind == RegimeKind::RestrictedHorizon) {
        std::cout << "  sign change of g at t0 = " << regime.t0 << "\n"
                  << "  inner regime: " << to_string(regime.inner) << " on "
                  << (regime.solve_after_t0 ? "(t0, T]" : "[0, t0)") << "\n";
    }
    if (!regime.reason.empty()) std::cout << "  reason: " << regime.reason << "\n";
    std::cout << "g    in [" << num(g_min) << ", " << num(g_max) << "]\n"
              << "ell  in [" << num(ell_min) << ", " << num(ell_max) << "]\n";
    if (gamma_max >= gamma_min) {
        std::cout << "gamma in [" << num(gamma_min) << ", " << num(gamma_max) << "]\n";
    } else {
        std::cout << "gamma undefined on the scan grid\n";
    }
    return 0;
}

void write_gfun_csv(const Options& opt, const ProblemConfig& cfg,
                    const std::vector<double>& t_nodes) {
    auto out = open_out(opt, "gfun.csv");
    out << "t,g,ell,f,f_prime\n";
    for (double t : t_nodes) {
        const auto [g, ell] = g_ell(cfg, t);
        const auto mw = moneys_worth(cfg, t);
        out << num(t) << ',' << num(g) << ',' << num(ell) << ',' << num(mw.f) << ','
            << num(mw.f_prime) << "\n";
    }
}

void write_boundary_csv(std::ofstream out, const ProblemConfig& cfg, const Boundary& bd) {
    out << "t,b,gamma,orientation\n";
    for (std::size_t i = 0; i < bd.t.size(); ++i) {
        const auto gamma = gamma_level(cfg, bd.t[i]);
        out << num(bd.t[i]) << ',' << num(bd.values[i]) << ','
            << (gamma ? num(*gamma) : "nan") << ',' << orientation_name(bd.orientation)
            << "\n";
    }
}

int cmd_solve(const Options& opt) {
    const RunConfig rc = load_config(opt);
    const auto& cfg = rc.problem;
    const Regime regime = classify(cfg);

    json report;
    report["regime"] = regime_json(regime);
    report["n_steps"] = rc.solver.n_steps;

    if (regime.kind == RegimeKind::DeterministicK0) {
        // K=0: stopping time is deterministic; report tau*(t) per node.
        auto out = open_out(opt, "k0.csv");
        out << "t,tau_star,stop_at\n";
        const int n = rc.solver.n_steps;
        for (int i = 0; i <= n; ++i) {
            const double t = cfg.T * i / n;
            const double tau = k0_optimal_time(cfg, t);
            out << num(t) << ',' << num(tau) << ',' << num(t + tau) << "\n";
        }
        std::cout << "deterministic K=0 rule written to k0.csv\n";
        auto rep = open_out(opt, "report.json");
        rep << report.dump(2) << "\n";
        return 0;
    }
    if (!regime.is_boundary()) {
        std::cout << "regime " << to_string(regime.kind)
                  << ": no boundary to solve (see report.json)\n";
        auto rep = open_out(opt, "report.json");
        rep << report.dump(2) << "\n";
        return 0;
    }

    const double t_solve0 = now_seconds();
    const auto [bd, rep] = solve(cfg, regime, rc.solver);
    const double solve_seconds = now_seconds() - t_solve0;

    write_boundary_csv(open_out(opt, "boundary.csv"), cfg, bd);
    write_gfun_csv(opt, cfg, bd.t);

    report["orientation"] = orientation_name(bd.orientation);
    report["h"] = rep.h;
    report["max_normalized_residual"] = rep.max_normalized_residual;
    report["bracket_expansions"] = rep.bracket_expansions;
    report["solve_seconds"] = solve_seconds;
    {
        json resid = json::array();
        for (double r : rep.residuals) resid.push_back(r);
        report["residuals"] = std::move(resid);
    }

    if (regime.kind == RegimeKind::RestrictedHorizon &&
        regime.outer == OuterPolicy::ApproximateLower) {
        // The integral equation covers (t0, T] only; a full-horizon PDE pass
        // supplies the [0, t0] part, labelled approximate.
        Regime full = regime;
        full.kind = regime.inner;
        const PdeGrid grid =
            PdeGrid::auto_for(cfg, full, rc.pde_n_y, rc.pde_n_t, rc.pde_scheme);
        const PdeResult pde = pde_solve(cfg, full, grid);
        auto out = open_out(opt, "boundary_approx.csv");
        out << "t,b_pde\n";
        for (std::size_t m = 0; m < pde.t_grid.size(); ++m) {
            if (pde.t_grid[m] > regime.t0) break;
            out << num(pde.t_grid[m]) << ',' << num(pde.extracted_boundary[m]) << "\n";
        }
        report["approx_boundary_below_t0"] = "boundary_approx.csv";
        std::cout << "[0, t0] part is approximate (PDE); see boundary_approx.csv\n";
    }

    auto repout = open_out(opt, "report.json");
    repout << report.dump(2) << "\n";
    std::cout << "solved " << bd.t.size() - 1 << " steps, orientation "
              << orientation_name(bd.orientation)
              << ", max normalized residual " << num(rep.max_normalized_residual) << "\n";
    return 0;
}

int cmd_value(const Options& opt, double t, double x, bool dump_surface) {
    const RunConfig rc = load_config(opt);
    const auto& cfg = rc.problem;
    const Regime regime = classify(cfg);
    if (!regime.is_boundary()) {
        throw ConfigError("value: regime " + to_string(regime.kind) + " has no boundary");
    }
    const auto [bd, rep] = solve(cfg, regime, rc.solver);
    const double V = value_at(cfg, bd, t, x);
    const double G = stop_payoff_G(cfg, t, x);
    std::cout << "t = " << num(t) << "  x = " << num(x) << "\n"
              << "V = " << num(V) << "\n"
              << "G = " << num(G) << "\n"
              << "premium = " << num(V - G) << "\n";

    if (dump_surface) {
        double b_lo = bd.values.front(), b_hi = bd.values.front();
        for (double v : bd.values) {
            b_lo = std::min(b_lo, v);
            b_hi = std::max(b_hi, v);
        }
        std::vector<double> xs(200);
        for (int j = 0; j < 200; ++j) {
            xs[j] = 0.2 * b_lo + (3.0 * b_hi - 0.2 * b_lo) * j / 199;
        }
        const std::size_t stride = std::max<std::size_t>(1, (bd.t.size() - 1) / 60);
        const auto surf = value_surface(cfg, bd, xs, stride);
        auto out = open_out(opt, "surface.csv");
        out << "t,x,V,G,region\n";
        for (std::size_t it = 0; it < surf.t_grid.size(); ++it) {
            for (std::size_t ix = 0; ix < xs.size(); ++ix) {
                out << num(surf.t_grid[it]) << ',' << num(xs[ix]) << ','
                    << num(surf.v(it, ix)) << ',' << num(surf.g(it, ix)) << ','
                    << (surf.stop[it * xs.size() + ix] ? "stop" : "continue") << "\n";
            }
        }
        std::cout << "surface written to surface.csv\n";
    }
    return 0;
}

int cmd_oracle(const Options& opt) {
    RunConfig rc = load_config(opt);
    // cross-validation wants the grid-converged boundary
    rc.solver.time_quadrature = TimeQuadrature::Trapezoid;
    const auto& cfg = rc.problem;
    const Regime regime = classify(cfg);
    if (!regime.is_boundary()) {
        throw ConfigError("oracle: regime " + to_string(regime.kind) + " has no boundary");
    }
    const auto [bd, rep] = solve(cfg, regime, rc.solver);

    const PdeGrid grid = PdeGrid::auto_for(cfg, regime, rc.pde_n_y, rc.pde_n_t, rc.pde_scheme);
    const PdeResult pde = pde_solve(cfg, regime, grid);

    // sup-relative gap on [t_start, T_eff - 1]
    double gap = 0.0;
    for (std::size_t i = 0; i < bd.t.size(); ++i) {
        if (bd.t[i] > bd.effective_horizon() - 1.0) break;
        const auto it = std::lower_bound(pde.t_grid.begin(), pde.t_grid.end(), bd.t[i]);
        const std::size_t m = std::min<std::size_t>(it - pde.t_grid.begin(),
                                                    pde.t_grid.size() - 1);
        const double b_pde = pde.extracted_boundary[m];
        if (!std::isfinite(b_pde)) continue;
        gap = std::max(gap, std::abs(bd.values[i] - b_pde) / std::abs(bd.values[i]));
    }
    const bool pde_ok = gap <= 0.05;

    // extracted PDE boundary dump
    {
        auto out = open_out(opt, "pde_boundary.csv");
        out << "t,b_pde\n";
        for (std::size_t m = 0; m < pde.t_grid.size(); ++m) {
            out << num(pde.t_grid[m]) << ',' << num(pde.extracted_boundary[m]) << "\n";
        }
    }

    // MC probes in the continuation region
    const double b0 = bd.values.front();
    std::vector<double> probes;
    if (bd.orientation == Orientation::StopAbove) {
        probes = {0.3 * b0, 0.5 * b0, 0.7 * b0, 0.9 * b0};
    } else {
        probes = {1.2 * b0, 1.5 * b0, 2.0 * b0, 3.0 * b0};
    }
    bool mc_ok = true;
    std::cout << "pde sup-relative boundary gap on [0, T-1]: " << num(gap)
              << (pde_ok ? "  (<= 5%)" : "  (EXCEEDS 5%)") << "\n";
    auto mc_csv = open_out(opt, "mc_compare.csv");
    mc_csv << "x,value_at,mc_mean,mc_se,z,boundary_rule,stop_now,hold_to_T,"
              "se_diff_stop_now,se_diff_hold\n";
    for (double x : probes) {
        const McEstimate est =
            mc_policy_value(cfg, bd, bd.t.front(), x, rc.mc_paths, rc.seed);
        const double V = value_at(cfg, bd, bd.t.front(), x);
        const double z = est.std_error > 0.0 ? (V - est.mean) / est.std_error : 0.0;
        const bool ok = std::abs(z) <= 3.0;
        mc_ok = mc_ok && ok;
        std::cout << "mc probe x=" << num(x) << ": value_at=" << num(V) << " mc="
                  << num(est.mean) << " +- " << num(est.std_error) << "  z=" << num(z)
                  << (ok ? "" : "  (|z| > 3)") << "\n";
        const auto cmp = mc_strategy_comparison(cfg, bd, bd.t.front(), x, rc.mc_paths, rc.seed);
        mc_csv << num(x) << ',' << num(V) << ',' << num(est.mean) << ','
               << num(est.std_error) << ',' << num(z) << ',' << num(cmp.boundary_rule.mean)
               << ',' << num(cmp.stop_now.mean) << ',' << num(cmp.hold_to_T.mean) << ','
               << num(cmp.se_diff_stop_now) << ',' << num(cmp.se_diff_hold) << "\n";
    }
    std::cout << (pde_ok && mc_ok ? "oracle agreement: PASS" : "oracle agreement: FAIL")
              << "\n";
    return pde_ok && mc_ok ? 0 : 1;
}

int cmd_sweep(const Options& opt, std::vector<double> mu_bars) {
    const RunConfig rc = load_config(opt);
    if (rc.problem.scenario != Scenario::ProportionalHazard) {
        throw ConfigError("sweep varies mu_bar and needs a proportional_hazard config");
    }
    if (mu_bars.empty()) mu_bars = {0.01, 0.05, 0.10};

    std::vector<Boundary> boundaries;
    for (double mu_bar : mu_bars) {
        RunConfig run = rc;
        run.problem.subjective.proportional_load = mu_bar;
        auto [bd, rep] = solve(run.problem, run.solver);
        boundaries.push_back(std::move(bd));
    }
    for (std::size_t k = 1; k < boundaries.size(); ++k) {
        if (boundaries[k].t != boundaries[0].t) {
            throw ConfigError("sweep grids differ between mu_bar runs");
        }
    }

    auto out = open_out(opt, "sweep.csv");
    out << "t";
    for (double mu_bar : mu_bars) {
        char label[32];
        std::snprintf(label, sizeof label, "%g", mu_bar);
        out << ",b_mu_bar_" << label;
    }
    out << "\n";
    for (std::size_t i = 0; i < boundaries[0].t.size(); ++i) {
        out << num(boundaries[0].t[i]);
        for (const auto& bd : boundaries) out << ',' << num(bd.values[i]);
        out << "\n";
    }

    bool monotone = true;
    for (std::size_t k = 1; k < boundaries.size(); ++k) {
        for (std::size_t i = 0; i < boundaries[0].t.size(); ++i) {
            if (boundaries[k].values[i] >
                boundaries[k - 1].values[i] + 1e-6 * (1.0 + boundaries[k - 1].values[i])) {
                monotone = false;
            }
        }
    }
    std::cout << "sweep over mu_bar in {";
    for (std::size_t k = 0; k < mu_bars.size(); ++k) {
        std::cout << (k ? ", " : "") << num(mu_bars[k]);
    }
    std::cout << "}: boundaries " << (monotone ? "pointwise nonincreasing" : "NOT monotone")
              << " in mu_bar\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal annuitization boundary solver"};
    app.require_subcommand(1);

    Options opt;
    double value_t = 0.0, value_x = 1.0;
    std::vector<double> mu_bars;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "config file path");
        sub->add_option("--preset", opt.preset, "named preset (see --list)");
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", opt.seed, "Monte Carlo seed override");
        sub->add_option("--n-steps", opt.n_steps, "boundary grid steps override");
    };

    auto* regime = app.add_subcommand("regime", "classify the problem instance");
    add_common(regime);
    auto* solve_cmd = app.add_subcommand("solve", "solve the boundary integral equation");
    add_common(solve_cmd);
    auto* value = app.add_subcommand("value", "value function at (t, x)");
    add_common(value);
    value->add_option("--t", value_t, "time in years (boundary grid node)")->required();
    value->add_option("--x", value_x, "wealth")->required();
    bool dump_surface = false;
    value->add_flag("--surface", dump_surface, "also write surface.csv to --out");
    auto* oracle = app.add_subcommand("oracle", "cross-validate against PDE and MC oracles");
    add_common(oracle);
    auto* sweep = app.add_subcommand("sweep", "solve across a list of mu_bar values");
    add_common(sweep);
    sweep->add_option("--mu-bars", mu_bars, "mu_bar values (default 0.01 0.05 0.10)");
    auto* list = app.add_subcommand("list", "list built-in presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& p : presets()) {
                std::cout << p.name << "\n  " << p.description << "\n";
            }
            return 0;
        }
        if (regime->parsed()) return cmd_regime(opt);
        if (solve_cmd->parsed()) return cmd_solve(opt);
        if (value->parsed()) return cmd_value(opt, value_t, value_x, dump_surface);
        if (oracle->parsed()) return cmd_oracle(opt);
        if (sweep->parsed()) return cmd_sweep(opt, mu_bars);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const BracketFailure& e) {
        std::cerr << "bracket failure: " << e.what() << "\n";
        return 3;
    } catch (const GridMismatch& e) {
        std::cerr << "grid mismatch: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
