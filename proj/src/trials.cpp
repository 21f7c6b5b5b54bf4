#include "cdac/trials.hpp"

#include <cmath>
#include <limits>

#include "cdac/errors.hpp"

namespace cdac {

PolicyAction SolvedTablePolicy::decide(const Eigen::Ref<const Eigen::VectorXd>& p, int fixation,
                                       Rng&) const {
    return policy_action(*solved_, p, fixation);
}

PolicyAction AlwaysStopPolicy::decide(const Eigen::Ref<const Eigen::VectorXd>& p, int fixation,
                                      Rng&) const {
    return {true, stopping_value(rule_, p, fixation).declare};
}

TrialRecord run_trial(const TrialPolicy& policy, const TaskModel& model,
                      const CostParams& costs, const TrialSetup& setup, int target,
                      std::uint64_t seed) {
    return run_trial(policy, model, model, costs, setup, target, seed);
}

TrialRecord run_trial(const TrialPolicy& policy, const TaskModel& model,
                      const TaskModel& generative, const CostParams& costs,
                      const TrialSetup& setup, int target, std::uint64_t seed) {
    if (target < 0 || target >= model.k) {
        throw ConfigError("true target out of range");
    }
    if (generative.num_actions != model.num_actions || generative.num_obs != model.num_obs) {
        throw ConfigError("generative model is structurally incompatible");
    }
    if (setup.initial_fixation < 0 || setup.initial_fixation >= model.num_actions) {
        throw ConfigError("initial fixation out of range");
    }
    Rng rng(seed);
    Eigen::VectorXd p = setup.prior.size() > 0
                            ? setup.prior
                            : Eigen::VectorXd::Constant(model.k, 1.0 / model.k);
    validate_belief(p);

    TrialRecord rec;
    rec.target = target;
    int fixation = setup.initial_fixation;
    bool observed = false;

    while (true) {
        if (rec.steps >= setup.step_cap) {
            rec.capped = true;
            rec.declared = stopping_value(model.stop_rule, p, fixation).declare;
            break;
        }
        const PolicyAction act = policy.decide(p, fixation, rng);
        if (act.stop) {
            rec.declared = act.target;
            break;
        }
        const int j = act.target;
        if (observed && j != fixation) {
            ++rec.switches;
        }
        const Observation x = sample_observation(generative, target, j, rng);
        p = bayes_update(model, p, j, x);
        fixation = j;
        observed = true;
        ++rec.steps;
    }

    // Capped trials are scored as errors at the cap length.
    rec.correct = !rec.capped && rec.declared == rec.target;
    rec.total_cost = costs.c * rec.steps + costs.cs * rec.switches + (rec.correct ? 0.0 : 1.0);
    return rec;
}

namespace {

void mean_and_se(const std::vector<double>& xs, double& mean, double& se) {
    const std::size_t n = xs.size();
    double sum = 0.0;
    for (double x : xs) sum += x;
    mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    if (n < 2) {
        se = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

} // namespace

TrialStats run_batch(const TrialPolicy& policy, const TaskModel& model,
                     const CostParams& costs, const TrialSetup& setup, int n_trials,
                     std::uint64_t master_seed, std::vector<TrialRecord>* records) {
    if (n_trials < 1) throw ConfigError("batch needs at least one trial");

    Rng target_rng(derive_seed(master_seed, 0x7a52e75u));
    std::vector<double> acc, steps, switches, cost;
    acc.reserve(n_trials);
    steps.reserve(n_trials);
    switches.reserve(n_trials);
    cost.reserve(n_trials);

    TrialStats stats;
    stats.n_trials = n_trials;
    stats.seed = master_seed;
    for (int i = 0; i < n_trials; ++i) {
        const int target = static_cast<int>(target_rng.next_below(model.k));
        const TrialRecord rec =
            run_trial(policy, model, costs, setup, target, derive_seed(master_seed, i + 1));
        if (rec.capped) ++stats.capped_trials;
        acc.push_back(rec.correct ? 1.0 : 0.0);
        steps.push_back(rec.steps);
        switches.push_back(rec.switches);
        cost.push_back(rec.total_cost);
        if (records) records->push_back(rec);
    }
    mean_and_se(acc, stats.accuracy, stats.se_accuracy);
    mean_and_se(steps, stats.mean_steps, stats.se_steps);
    mean_and_se(switches, stats.mean_switches, stats.se_switches);
    mean_and_se(cost, stats.mean_cost, stats.se_cost);
    return stats;
}

} // namespace cdac
