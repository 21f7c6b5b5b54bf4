#include "cdac/compare.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cdac/errors.hpp"
#include "cdac/solver.hpp"

namespace cdac {

ComparisonReport compare_policies(const EnvironmentConfig& env, int n_trials,
                                  bool include_greedy_map) {
    ComparisonReport report;
    report.env = env;
    report.n_trials = n_trials;

    const TaskModel model = env.build_model();
    const CostParams costs = env.cost_params();
    const TrialSetup setup = env.trial_setup();
    auto grid = std::make_shared<const SimplexGrid>(model.k, env.grid_n);

    const SolvedPolicy solved =
        value_iteration(model, costs, grid, env.tol, env.max_sweeps);
    const SolvedTablePolicy cdac_policy(solved);
    const TrialStats cdac_stats =
        run_batch(cdac_policy, model, costs, setup, n_trials, env.seed);
    report.entries.push_back({"C-DAC", std::nullopt, cdac_stats});

    const InfomaxTable infomax =
        infomax_solve(model, grid, InfomaxConfig(env.infomax_horizon));
    const CalibrationResult infomax_calib =
        calibrate_threshold(model, costs, &infomax, ContinuationRule::infomax, setup,
                            cdac_stats.accuracy, n_trials, env.seed);
    const ThresholdPolicy infomax_policy(model, infomax_calib.threshold, infomax);
    const TrialStats infomax_stats =
        run_batch(infomax_policy, model, costs, setup, n_trials, env.seed);
    report.entries.push_back({"Infomax", infomax_calib.threshold, infomax_stats});

    if (include_greedy_map) {
        const CalibrationResult greedy_calib =
            calibrate_threshold(model, costs, nullptr, ContinuationRule::greedy_map, setup,
                                cdac_stats.accuracy, n_trials, env.seed);
        const ThresholdPolicy greedy_policy(model, greedy_calib.threshold);
        const TrialStats greedy_stats =
            run_batch(greedy_policy, model, costs, setup, n_trials, env.seed);
        report.entries.push_back({"Greedy MAP", greedy_calib.threshold, greedy_stats});
    }
    return report;
}

namespace {

std::string fmt(double v, const char* spec = "%.4f") {
    if (std::isnan(v)) return "-";
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string pm(double mean, double se) {
    return fmt(mean) + " +/- " + fmt(se);
}

} // namespace

std::string format_comparison(const ComparisonReport& report) {
    std::ostringstream out;
    out << "environment: task=" << report.env.task << " c=" << fmt(report.env.c, "%.4g")
        << " cs=" << fmt(report.env.cs, "%.4g");
    if (report.env.task == "simple") {
        out << " beta=" << fmt(report.env.beta, "%.4g");
    } else {
        out << " betas=" << fmt(report.env.betas[0], "%.4g") << ","
            << fmt(report.env.betas[1], "%.4g") << "," << fmt(report.env.betas[2], "%.4g")
            << "," << fmt(report.env.betas[3], "%.4g");
    }
    out << " grid_n=" << report.env.grid_n << " trials=" << report.n_trials
        << " seed=" << report.env.seed << "\n\n";

    constexpr int name_w = 12, col_w = 20;
    out << std::string(name_w, ' ');
    for (const char* h : {"threshold", "accuracy", "steps", "switches", "total cost"}) {
        std::string cell(h);
        cell.resize(col_w, ' ');
        out << cell;
    }
    out << "capped\n";
    for (const auto& e : report.entries) {
        std::string name = e.name;
        name.resize(name_w, ' ');
        out << name;
        std::string cells[5] = {
            e.threshold ? fmt(*e.threshold, "%.6f") : std::string("-"),
            pm(e.stats.accuracy, e.stats.se_accuracy),
            pm(e.stats.mean_steps, e.stats.se_steps),
            pm(e.stats.mean_switches, e.stats.se_switches),
            pm(e.stats.mean_cost, e.stats.se_cost)};
        for (auto& cell : cells) {
            cell.resize(col_w, ' ');
            out << cell;
        }
        out << e.stats.capped_trials << "\n";
    }
    return out.str();
}

void write_comparison_csv(const ComparisonReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << "policy,threshold,accuracy,accuracy_se,steps,steps_se,switches,switches_se,"
           "cost,cost_se,capped,trials,seed\n";
    for (const auto& e : report.entries) {
        char buf[512];
        std::snprintf(buf, sizeof(buf),
                      "%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%llu\n",
                      e.name.c_str(),
                      e.threshold ? fmt(*e.threshold, "%.17g").c_str() : "",
                      e.stats.accuracy, e.stats.se_accuracy, e.stats.mean_steps,
                      e.stats.se_steps, e.stats.mean_switches, e.stats.se_switches,
                      e.stats.mean_cost, e.stats.se_cost, e.stats.capped_trials,
                      e.stats.n_trials, static_cast<unsigned long long>(e.stats.seed));
        out << buf;
    }
    if (!out) throw ConfigError("write failed: " + path);
}

} // namespace cdac
