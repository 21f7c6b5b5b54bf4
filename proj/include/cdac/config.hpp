#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "cdac/observation.hpp"
#include "cdac/solver.hpp"
#include "cdac/trials.hpp"

namespace cdac {

// Environment description shared by the CLI subcommands and the config-file
// format. Locations and fixation actions are 1-based on this surface.
struct EnvironmentConfig {
    std::string task = "simple"; // simple | peripheral
    double c = 0.1;
    double cs = 0.0;
    double beta = 0.9;                                   // simple task
    Eigen::Vector4d betas{0.62, 0.6, 0.55, 0.5};         // peripheral task
    int grid_n = 200;
    int initial_fixation = 0; // 1-based; 0 = task default (l1 / l123)
    Eigen::VectorXd prior;    // empty = uniform
    int trial_cap = 300;
    int trials = 10000;
    std::uint64_t seed = 12345;
    double tol = 1e-6;
    int max_sweeps = 2000;
    int infomax_horizon = 20;

    TaskModel build_model() const;
    CostParams cost_params() const { return CostParams(c, cs); }
    TrialSetup trial_setup() const; // resolves defaults, 0-based fixation
};

// Strict JSON parse: every field explicit, unknown keys rejected.
EnvironmentConfig parse_config_json(const std::string& text);
EnvironmentConfig load_config_file(const std::string& path);

} // namespace cdac
