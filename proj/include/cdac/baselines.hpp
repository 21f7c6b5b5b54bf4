#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

#include "cdac/observation.hpp"
#include "cdac/rng.hpp"
#include "cdac/simplex_grid.hpp"
#include "cdac/trials.hpp"

namespace cdac {

// Shannon entropy in nats, with 0 log 0 := 0.
double entropy(const Eigen::Ref<const Eigen::VectorXd>& p);

// Greedy-MAP Q-factor: negated expected one-step-ahead maximum posterior.
double greedy_map_q(const TaskModel& model, const Eigen::Ref<const Eigen::VectorXd>& p,
                    int action);

// Argmin of greedy-MAP Q with a uniform seeded tie-break among actions
// within tie_eps of the minimum.
int greedy_map_action(const TaskModel& model, const Eigen::Ref<const Eigen::VectorXd>& p,
                      Rng& rng, double tie_eps = 1e-9);

struct InfomaxConfig {
    int horizon = 20; // lookahead steps of the cumulative-entropy recursion

    InfomaxConfig() = default;
    explicit InfomaxConfig(int horizon_);
};

// Finite-horizon backward induction of the expected cumulative future
// entropy on the grid. actions(cell, t) is the minimizing fixation at step
// t; the executed stationary policy reads the t = 0 slice. Cost parameters
// never enter this computation.
struct InfomaxTable {
    std::shared_ptr<const SimplexGrid> grid;
    int horizon = 0;
    Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic> actions; // cells x horizon
    Eigen::VectorXd w0; // expected cumulative entropy at t = 0
};

InfomaxTable infomax_solve(const TaskModel& model, std::shared_ptr<const SimplexGrid> grid,
                           const InfomaxConfig& config);

// Executed infomax fixation at an arbitrary belief (nearest-cell lookup of
// the t = 0 slice).
int infomax_action(const InfomaxTable& table, const Eigen::Ref<const Eigen::VectorXd>& p);

enum class ContinuationRule { infomax, greedy_map };

// Statistical-baseline trial policy: stop once the confidence test clears a
// fixed threshold (the fixated location's belief under declare-fixated
// rules, the maximum belief otherwise), else fixate per the continuation
// rule.
class ThresholdPolicy : public TrialPolicy {
public:
    // Infomax continuation; `table` must outlive the policy.
    ThresholdPolicy(const TaskModel& model, double threshold, const InfomaxTable& table);
    // Greedy-MAP continuation.
    ThresholdPolicy(const TaskModel& model, double threshold);

    double threshold() const { return threshold_; }
    PolicyAction decide(const Eigen::Ref<const Eigen::VectorXd>& p, int fixation,
                        Rng& rng) const override;

private:
    const TaskModel* model_;
    ContinuationRule rule_;
    double threshold_;
    const InfomaxTable* infomax_ = nullptr;
};

TrialRecord run_threshold_policy(const TaskModel& model, const CostParams& costs,
                                 const ThresholdPolicy& policy, const TrialSetup& setup,
                                 int target, std::uint64_t seed);

struct CalibrationResult {
    double threshold = 0.0;
    double accuracy = 0.0; // at the returned threshold, under the calibration seed
    std::vector<std::pair<double, double>> tested; // (threshold, accuracy) evaluations
};

// Bisection on the stopping threshold so the baseline's accuracy matches
// `target_accuracy` from below (common random numbers across evaluations).
// Returns the largest tested threshold with accuracy <= target + 0.005,
// preferring thresholds with accuracy <= target. Throws NumericalError if
// even the highest threshold undershoots the target by more than 0.05.
CalibrationResult calibrate_threshold(const TaskModel& model, const CostParams& costs,
                                      const InfomaxTable* infomax_table, ContinuationRule rule,
                                      const TrialSetup& setup, double target_accuracy,
                                      int n_trials, std::uint64_t seed);

} // namespace cdac
