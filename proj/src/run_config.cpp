#include "annuity/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace annuity {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double out = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long out = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for " + key + ": '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError("bad boolean value for " + key + ": '" + value + "'");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

RunConfig RunConfig::from_string(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
        }
        if (!kv.emplace(key, value).second) {
            throw ConfigError("duplicate key " + key);
        }
    }

    RunConfig rc;
    GompertzMakeham gm;
    double mu_bar = 0.0;
    bool has_mu_bar = false, has_f = false;

    for (const auto& [key, value] : kv) {
        auto& p = rc.problem;
        if (key == "scenario") {
            if (value == "constant_f") p.scenario = Scenario::ConstantF;
            else if (value == "proportional_hazard") p.scenario = Scenario::ProportionalHazard;
            else throw ConfigError("unknown scenario '" + value + "'");
        } else if (key == "f_constant") {
            p.f_constant = parse_double(key, value);
            has_f = true;
        } else if (key == "mu_bar") {
            mu_bar = parse_double(key, value);
            has_mu_bar = true;
        } else if (key == "K_currency") {
            p.K = parse_double(key, value);
        } else if (key == "T_years") {
            p.T = parse_double(key, value);
        } else if (key == "eta_years") {
            p.eta = parse_double(key, value);
        } else if (key == "theta_per_year") {
            p.theta = parse_double(key, value);
        } else if (key == "alpha_per_year") {
            p.alpha = parse_double(key, value);
        } else if (key == "sigma_per_sqrt_year") {
            p.sigma = parse_double(key, value);
        } else if (key == "rho_per_year") {
            p.rho = parse_double(key, value);
        } else if (key == "rho_hat_per_year") {
            p.rho_hat = parse_double(key, value);
        } else if (key == "gm_A_per_year") {
            gm.A = parse_double(key, value);
        } else if (key == "gm_B_per_year") {
            gm.B = parse_double(key, value);
        } else if (key == "gm_C_growth") {
            gm.C = parse_double(key, value);
        } else if (key == "n_steps") {
            rc.solver.n_steps = static_cast<int>(parse_long(key, value));
        } else if (key == "root_tol") {
            rc.solver.root_tol = parse_double(key, value);
        } else if (key == "refine_near_T") {
            rc.solver.refine_near_T = parse_bool(key, value);
        } else if (key == "pde_n_y") {
            rc.pde_n_y = static_cast<int>(parse_long(key, value));
        } else if (key == "pde_n_t") {
            rc.pde_n_t = static_cast<int>(parse_long(key, value));
        } else if (key == "pde_scheme") {
            if (value == "explicit_projected") rc.pde_scheme = PdeScheme::ExplicitProjected;
            else if (value == "crank_nicolson_psor") rc.pde_scheme = PdeScheme::CrankNicolsonPSOR;
            else throw ConfigError("unknown pde_scheme '" + value + "'");
        } else if (key == "psor_omega") {
            rc.psor.omega = parse_double(key, value);
        } else if (key == "psor_max_iter") {
            rc.psor.max_iter = static_cast<int>(parse_long(key, value));
        } else if (key == "psor_tol") {
            rc.psor.tol = parse_double(key, value);
        } else if (key == "mc_paths") {
            rc.mc_paths = parse_long(key, value);
        } else if (key == "seed") {
            rc.seed = static_cast<std::uint64_t>(parse_long(key, value));
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }

    auto& p = rc.problem;
    p.objective = MortalityLaw{gm, 0.0};
    if (p.scenario == Scenario::ConstantF) {
        if (!has_f) throw ConfigError("scenario constant_f requires f_constant");
        if (has_mu_bar) throw ConfigError("mu_bar is only valid for proportional_hazard");
        p.subjective = MortalityLaw{gm, 0.0};
    } else {
        if (!has_mu_bar) throw ConfigError("scenario proportional_hazard requires mu_bar");
        if (has_f) throw ConfigError("f_constant is only valid for constant_f");
        p.subjective = MortalityLaw{gm, mu_bar};
    }
    p.validate();
    return rc;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return from_string(text.str());
}

std::string RunConfig::to_string() const {
    std::ostringstream out;
    const auto& p = problem;
    out << "scenario = "
        << (p.scenario == Scenario::ConstantF ? "constant_f" : "proportional_hazard") << "\n";
    if (p.scenario == Scenario::ConstantF) {
        out << "f_constant = " << fmt(p.f_constant) << "\n";
    } else {
        out << "mu_bar = " << fmt(p.subjective.proportional_load) << "\n";
    }
    out << "K_currency = " << fmt(p.K) << "\n";
    out << "T_years = " << fmt(p.T) << "\n";
    out << "eta_years = " << fmt(p.eta) << "\n";
    out << "theta_per_year = " << fmt(p.theta) << "\n";
    out << "alpha_per_year = " << fmt(p.alpha) << "\n";
    out << "sigma_per_sqrt_year = " << fmt(p.sigma) << "\n";
    out << "rho_per_year = " << fmt(p.rho) << "\n";
    out << "rho_hat_per_year = " << fmt(p.rho_hat) << "\n";
    out << "gm_A_per_year = " << fmt(p.objective.base.A) << "\n";
    out << "gm_B_per_year = " << fmt(p.objective.base.B) << "\n";
    out << "gm_C_growth = " << fmt(p.objective.base.C) << "\n";
    out << "n_steps = " << solver.n_steps << "\n";
    out << "root_tol = " << fmt(solver.root_tol) << "\n";
    out << "refine_near_T = " << (solver.refine_near_T ? "true" : "false") << "\n";
    out << "pde_n_y = " << pde_n_y << "\n";
    out << "pde_n_t = " << pde_n_t << "\n";
    out << "pde_scheme = "
        << (pde_scheme == PdeScheme::ExplicitProjected ? "explicit_projected"
                                                       : "crank_nicolson_psor")
        << "\n";
    out << "psor_omega = " << fmt(psor.omega) << "\n";
    out << "psor_max_iter = " << psor.max_iter << "\n";
    out << "psor_tol = " << fmt(psor.tol) << "\n";
    out << "mc_paths = " << mc_paths << "\n";
    out << "seed = " << seed << "\n";
    return out.str();
}

} // namespace annuity
