#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdac/baselines.hpp"
#include "cdac/config.hpp"
#include "cdac/trials.hpp"

namespace cdac {

struct PolicyReport {
    std::string name;
    std::optional<double> threshold; // stopping threshold, for baselines
    TrialStats stats;
};

struct ComparisonReport {
    EnvironmentConfig env;
    int n_trials = 0;
    std::vector<PolicyReport> entries;
};

// Full accuracy-matched comparison: solve C-DAC, simulate it, calibrate the
// infomax threshold to C-DAC's accuracy, simulate infomax, and (optionally)
// greedy MAP with the same calibration. All batches share the environment's
// master seed.
ComparisonReport compare_policies(const EnvironmentConfig& env, int n_trials,
                                  bool include_greedy_map = false);

// Aligned text table, reproducible byte-for-byte for fixed inputs.
std::string format_comparison(const ComparisonReport& report);

void write_comparison_csv(const ComparisonReport& report, const std::string& path);

} // namespace cdac
