#pragma once

#include <string>

#include "annuity/boundary.hpp"
#include "annuity/pde.hpp"

namespace annuity {

/// Everything a run needs: problem, solver, and oracle settings.
/// File format is flat key = value text with '#' comments; keys carry units.
/// Unknown keys are rejected.
struct RunConfig {
    ProblemConfig problem;
    SolverOptions solver;

    int pde_n_y = 400;
    int pde_n_t = 2000;
    PdeScheme pde_scheme = PdeScheme::CrankNicolsonPSOR;
    PsorParams psor;

    long mc_paths = 100000;
    std::uint64_t seed = 20080;

    static RunConfig from_string(const std::string& text);
    static RunConfig from_file(const std::string& path);
    std::string to_string() const;
};

struct Preset {
    std::string name;
    std::string description;
    std::string text; // config file contents
};

const std::vector<Preset>& presets();
RunConfig preset_config(const std::string& name); // ConfigError if unknown

} // namespace annuity
