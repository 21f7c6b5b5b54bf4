#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "cdac/observation.hpp"
#include "cdac/rng.hpp"
#include "cdac/solver.hpp"

namespace cdac {

// Outcome of one simulated search trial. Switches are counted between
// consecutive observation locations (the move from the initial fixation to
// the first observation is not a switch), matching the loss
// c*steps + cs*switches + 1{error}.
struct TrialRecord {
    int steps = 0;    // observations taken
    int switches = 0; // fixation changes between consecutive observations
    int declared = -1;
    int target = -1;
    bool correct = false;
    bool capped = false;
    double total_cost = 0.0;
};

struct TrialStats {
    int n_trials = 0;
    std::uint64_t seed = 0;
    int capped_trials = 0;
    double accuracy = 0.0;
    double mean_steps = 0.0;
    double mean_switches = 0.0;
    double mean_cost = 0.0;
    // Standard errors (sample sd / sqrt(n)); NaN when n_trials < 2.
    double se_accuracy = 0.0;
    double se_steps = 0.0;
    double se_switches = 0.0;
    double se_cost = 0.0;
};

// Decision rule queried once per step. Implementations must be pure up to
// draws from the supplied stream, so trials can run on parallel workers.
class TrialPolicy {
public:
    virtual ~TrialPolicy() = default;
    virtual PolicyAction decide(const Eigen::Ref<const Eigen::VectorXd>& p, int fixation,
                                Rng& rng) const = 0;
};

// Nearest-cell lookup into a solved policy table.
class SolvedTablePolicy : public TrialPolicy {
public:
    explicit SolvedTablePolicy(const SolvedPolicy& solved) : solved_(&solved) {}
    PolicyAction decide(const Eigen::Ref<const Eigen::VectorXd>& p, int fixation,
                        Rng& rng) const override;

private:
    const SolvedPolicy* solved_;
};

// Stops immediately with the rule's declaration. Baseline for sanity checks.
class AlwaysStopPolicy : public TrialPolicy {
public:
    explicit AlwaysStopPolicy(StopRule rule) : rule_(rule) {}
    PolicyAction decide(const Eigen::Ref<const Eigen::VectorXd>& p, int fixation,
                        Rng& rng) const override;

private:
    StopRule rule_;
};

struct TrialSetup {
    Eigen::VectorXd prior;    // empty -> uniform
    int initial_fixation = 0; // action index
    int step_cap = 300;
};

TrialRecord run_trial(const TrialPolicy& policy, const TaskModel& model,
                      const CostParams& costs, const TrialSetup& setup, int target,
                      std::uint64_t seed);

// Variant with a mismatched world: observations are drawn from `generative`
// while beliefs update through `model`.
TrialRecord run_trial(const TrialPolicy& policy, const TaskModel& model,
                      const TaskModel& generative, const CostParams& costs,
                      const TrialSetup& setup, int target, std::uint64_t seed);

// Seeded batch: per-trial seeds and uniformly drawn true targets derive from
// the master seed, so different policies under the same master seed face
// identical trial conditions.
TrialStats run_batch(const TrialPolicy& policy, const TaskModel& model,
                     const CostParams& costs, const TrialSetup& setup, int n_trials,
                     std::uint64_t master_seed,
                     std::vector<TrialRecord>* records = nullptr);

} // namespace cdac
