// Command-line front end: solve, simulate, compare, approx, export-map.
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdac/approx.hpp"
#include "cdac/baselines.hpp"
#include "cdac/compare.hpp"
#include "cdac/config.hpp"
#include "cdac/errors.hpp"
#include "cdac/policy_map.hpp"
#include "cdac/solver.hpp"
#include "cdac/table_io.hpp"
#include "cdac/trials.hpp"

namespace {

struct EnvOptions {
    std::string config_path;
    std::string task;
    double c = -1.0, cs = -1.0, beta = -1.0;
    std::vector<double> betas;
    int grid_n = 0;
    double tol = 0.0;
    int trials = 0;
    long long seed = -1;
    int horizon = 0;
    int initial_fixation = 0;
};

void add_env_options(CLI::App* cmd, EnvOptions& opt) {
    cmd->add_option("--config", opt.config_path, "JSON environment config file");
    cmd->add_option("--task", opt.task, "Task kind: simple | peripheral");
    cmd->add_option("--c", opt.c, "Cost per time step");
    cmd->add_option("--cs", opt.cs, "Cost per fixation switch");
    cmd->add_option("--beta", opt.beta, "Target Bernoulli parameter (simple task)");
    cmd->add_option("--betas", opt.betas, "Four acuity parameters (peripheral task)")
        ->expected(4);
    cmd->add_option("--grid-n", opt.grid_n, "Simplex grid subdivisions per edge");
    cmd->add_option("--tol", opt.tol, "Value-iteration convergence tolerance");
    cmd->add_option("--trials", opt.trials, "Monte Carlo trials per batch");
    cmd->add_option("--seed", opt.seed, "Master seed");
    cmd->add_option("--horizon", opt.horizon, "Infomax lookahead horizon");
    cmd->add_option("--initial-fixation", opt.initial_fixation,
                    "Initial fixation action, 1-based (default: l1, or l123 when peripheral)");
}

cdac::EnvironmentConfig resolve_env(const EnvOptions& opt) {
    cdac::EnvironmentConfig cfg;
    if (!opt.config_path.empty()) {
        cfg = cdac::load_config_file(opt.config_path);
    }
    if (!opt.task.empty()) cfg.task = opt.task;
    if (opt.c >= 0.0) cfg.c = opt.c;
    if (opt.cs >= 0.0) cfg.cs = opt.cs;
    if (opt.beta >= 0.0) cfg.beta = opt.beta;
    if (!opt.betas.empty()) {
        for (int i = 0; i < 4; ++i) cfg.betas[i] = opt.betas[i];
    }
    if (opt.grid_n > 0) cfg.grid_n = opt.grid_n;
    if (opt.tol > 0.0) cfg.tol = opt.tol;
    if (opt.trials > 0) cfg.trials = opt.trials;
    if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
    if (opt.horizon > 0) cfg.infomax_horizon = opt.horizon;
    if (opt.initial_fixation > 0) cfg.initial_fixation = opt.initial_fixation;
    // Revalidate the merged configuration.
    cfg.build_model();
    cfg.cost_params();
    cfg.trial_setup();
    return cfg;
}

cdac::SolvedPolicy solve_env(const cdac::EnvironmentConfig& cfg) {
    auto grid = std::make_shared<const cdac::SimplexGrid>(cfg.build_model().k, cfg.grid_n);
    return cdac::value_iteration(cfg.build_model(), cfg.cost_params(), grid, cfg.tol,
                                 cfg.max_sweeps);
}

int run(int argc, char** argv) {
    CLI::App app{"Context-dependent active sensing: solvers, baselines, simulation"};
    app.require_subcommand(1);

    EnvOptions opt;
    std::string out_path, policy_path, pgm_path, repr_path, method = "rbf";
    int fixation = 1;
    bool include_greedy = false;

    auto* solve = app.add_subcommand("solve", "Solve the optimal policy by value iteration");
    add_env_options(solve, opt);
    solve->add_option("--out", out_path, "Output table file")->required();

    auto* simulate = app.add_subcommand("simulate", "Run seeded Monte Carlo trials");
    add_env_options(simulate, opt);
    simulate->add_option("--policy", policy_path,
                         "Solved table file (solved in memory when omitted)");
    simulate->add_option("--out", out_path, "Write batch statistics CSV here");

    auto* compare = app.add_subcommand(
        "compare", "Accuracy-matched comparison of C-DAC against the statistical baselines");
    add_env_options(compare, opt);
    compare->add_option("--out", out_path, "Write the comparison CSV here");
    compare->add_flag("--greedy", include_greedy, "Include greedy MAP (slow, poor policy)");

    auto* approx = app.add_subcommand("approx", "Approximate value iteration (RBF or GPR)");
    add_env_options(approx, opt);
    approx->add_option("--method", method, "rbf | gpr | gpr-ard");
    approx->add_option("--out", out_path, "Output table file for the extracted policy");
    approx->add_option("--repr-out", repr_path, "Write the fitted representation JSON here");

    auto* export_map = app.add_subcommand("export-map", "Export a policy-map slice");
    export_map->add_option("--policy", policy_path, "Solved table file")->required();
    export_map->add_option("--fixation", fixation, "Fixation slice, 1-based (default 1)");
    export_map->add_option("--out", out_path, "CSV output path")->required();
    export_map->add_option("--pgm", pgm_path, "Also rasterize to this PGM file");

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed()) {
        const auto cfg = resolve_env(opt);
        const auto solved = solve_env(cfg);
        cdac::save_solved(solved, out_path);
        std::printf("solved %s task on grid n=%d in %d sweeps -> %s\n", cfg.task.c_str(),
                    cfg.grid_n, solved.sweeps, out_path.c_str());
        return 0;
    }

    if (simulate->parsed()) {
        const auto cfg = resolve_env(opt);
        const auto model = cfg.build_model();
        const auto costs = cfg.cost_params();
        cdac::SolvedPolicy solved =
            policy_path.empty() ? solve_env(cfg) : cdac::load_solved(policy_path);
        if (!policy_path.empty()) {
            cdac::check_table_matches(solved, model, costs, cfg.grid_n);
        }
        const cdac::SolvedTablePolicy policy(solved);
        const auto stats =
            cdac::run_batch(policy, model, costs, cfg.trial_setup(), cfg.trials, cfg.seed);
        std::printf("trials=%d seed=%llu\n", stats.n_trials,
                    static_cast<unsigned long long>(stats.seed));
        std::printf("accuracy  %.4f +/- %.4f\n", stats.accuracy, stats.se_accuracy);
        std::printf("steps     %.4f +/- %.4f\n", stats.mean_steps, stats.se_steps);
        std::printf("switches  %.4f +/- %.4f\n", stats.mean_switches, stats.se_switches);
        std::printf("cost      %.4f +/- %.4f\n", stats.mean_cost, stats.se_cost);
        std::printf("capped    %d\n", stats.capped_trials);
        if (!out_path.empty()) {
            cdac::ComparisonReport report;
            report.env = cfg;
            report.n_trials = cfg.trials;
            report.entries.push_back({"C-DAC", std::nullopt, stats});
            cdac::write_comparison_csv(report, out_path);
        }
        return 0;
    }

    if (compare->parsed()) {
        const auto cfg = resolve_env(opt);
        const auto report = cdac::compare_policies(cfg, cfg.trials, include_greedy);
        std::fputs(cdac::format_comparison(report).c_str(), stdout);
        if (!out_path.empty()) {
            cdac::write_comparison_csv(report, out_path);
        }
        return 0;
    }

    if (approx->parsed()) {
        const auto cfg = resolve_env(opt);
        const auto model = cfg.build_model();
        auto grid = std::make_shared<const cdac::SimplexGrid>(model.k, cfg.grid_n);
        cdac::ApproxConfig acfg;
        acfg.seed = cfg.seed;
        if (method == "rbf") {
            acfg.method = cdac::ApproxMethod::rbf;
        } else if (method == "gpr") {
            acfg.method = cdac::ApproxMethod::gpr;
        } else if (method == "gpr-ard") {
            acfg.method = cdac::ApproxMethod::gpr_ard;
        } else {
            throw cdac::ConfigError("unknown --method '" + method + "'");
        }
        acfg.gpr_hp = cdac::GprHyperparams::isotropic(model.k, 1.0, 1.0, 0.1);
        const auto result =
            cdac::approx_value_iteration(model, cfg.cost_params(), grid, acfg);
        if (result.converged) {
            std::printf("converged in %d iterations (last probe change %.3g)\n",
                        result.iterations, result.final_change);
        } else {
            std::printf("no convergence after %d iterations (last probe change %.3g)\n",
                        result.iterations, result.final_change);
        }
        if (result.method == cdac::ApproxMethod::rbf) {
            std::printf("rbf fit rank %ld, condition estimate %.3g\n",
                        static_cast<long>(result.fit_rank), result.fit_condition);
        }
        if (result.method == cdac::ApproxMethod::gpr_ard) {
            std::printf("ard hyperparameters: signal %.3g, noise %.3g, lengths",
                        result.selected_hp.signal, result.selected_hp.noise);
            for (Eigen::Index i = 0; i < result.selected_hp.length.size(); ++i) {
                std::printf(" %.3g", result.selected_hp.length[i]);
            }
            std::printf("\n");
        }
        if (!out_path.empty()) {
            cdac::SolvedPolicy table{grid, model, cfg.cost_params(), result.values,
                                     result.policy, result.iterations};
            cdac::save_solved(table, out_path);
            std::printf("policy table -> %s\n", out_path.c_str());
        }
        if (!repr_path.empty()) {
            cdac::save_representation_json(result, repr_path);
            std::printf("representation -> %s\n", repr_path.c_str());
        }
        return result.converged ? 0 : 2;
    }

    if (export_map->parsed()) {
        const auto solved = cdac::load_solved(policy_path);
        if (fixation < 1 || fixation > solved.model.num_actions) {
            throw cdac::ConfigError("--fixation out of range for this policy");
        }
        cdac::export_policy_map_csv(solved, fixation - 1, out_path);
        std::printf("policy map (fixation %s) -> %s\n",
                    cdac::action_name(solved.model, fixation - 1).c_str(), out_path.c_str());
        if (!pgm_path.empty()) {
            cdac::export_policy_map_pgm(solved, fixation - 1, pgm_path);
            std::printf("raster -> %s\n", pgm_path.c_str());
        }
        return 0;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const cdac::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const cdac::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
