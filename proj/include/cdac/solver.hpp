#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

#include "cdac/observation.hpp"
#include "cdac/simplex_grid.hpp"

namespace cdac {

// Behavioral cost rates. The error cost is normalized to 1.
struct CostParams {
    double c;        // per time step
    double cs = 0.0; // per fixation switch

    CostParams(double c_, double cs_);
};

struct StopDecision {
    double cost; // expected residual cost of stopping now (error probability)
    int declare; // location declared
};

// Residual cost and declaration of the optimal stopping action from
// (p, fixation) under the given rule. Accrued step/switch costs are sunk
// and excluded; they live in the trial record.
StopDecision stopping_value(StopRule rule, const Eigen::Ref<const Eigen::VectorXd>& p,
                            int fixation);

// Per-(cell, fixation) stopping costs over a grid.
Eigen::MatrixXd stopping_costs(const TaskModel& model, const SimplexGrid& grid);

// Precomputed one-step belief dynamics on the grid: for every
// (cell, action, observation) the predictive probability, the barycentric
// footprint of the posterior, and the posterior entropy. Flattened with
// stride k on the child/weight arrays; unused slots carry weight 0.
struct BeliefTransitions {
    Eigen::Index num_cells = 0;
    int num_actions = 0;
    int num_obs = 0;
    int k = 0;
    std::vector<double> prob;
    std::vector<double> entropy;
    std::vector<std::int32_t> child;
    std::vector<double> weight;

    std::size_t slot(Eigen::Index cell, int action, Observation x) const {
        return (static_cast<std::size_t>(cell) * num_actions + action) * num_obs + x;
    }

    // Expectation over the next observation of a per-cell field evaluated at
    // the posterior, given the fixation action: sum_x P(x) * field(p').
    double expected_next(Eigen::Index cell, int action, const double* field) const {
        double acc = 0.0;
        const std::size_t base = slot(cell, action, 0);
        for (int x = 0; x < num_obs; ++x) {
            const std::size_t s = base + x;
            const double px = prob[s];
            if (px <= 0.0) continue;
            double v = 0.0;
            const std::size_t off = s * k;
            for (int l = 0; l < k; ++l) {
                v += weight[off + l] * field[child[off + l]];
            }
            acc += px * v;
        }
        return acc;
    }

    // Same expectation with the posterior entropy added to the field value
    // (the infomax backup integrand).
    double expected_entropy_plus(Eigen::Index cell, int action, const double* field) const {
        double acc = 0.0;
        const std::size_t base = slot(cell, action, 0);
        for (int x = 0; x < num_obs; ++x) {
            const std::size_t s = base + x;
            const double px = prob[s];
            if (px <= 0.0) continue;
            double v = entropy[s];
            const std::size_t off = s * k;
            for (int l = 0; l < k; ++l) {
                v += weight[off + l] * field[child[off + l]];
            }
            acc += px * v;
        }
        return acc;
    }
};

BeliefTransitions build_transitions(const TaskModel& model, const SimplexGrid& grid);

// Expected residual cost per (cell, fixation).
struct ValueTable {
    Eigen::MatrixXd v; // cell_count x num_actions
};

// Chosen action per (cell, fixation), encoded as:
//   code in [0, k)                     stop and declare location `code`
//   code in [k, k + num_actions)       fixate action `code - k`
struct PolicyTable {
    Eigen::Matrix<std::int16_t, Eigen::Dynamic, Eigen::Dynamic> code;
};

struct PolicyAction {
    bool stop;
    int target; // declared location if stop, fixation action otherwise
};

std::int16_t encode_action(const TaskModel& model, PolicyAction action);
PolicyAction decode_action(const TaskModel& model, std::int16_t code);

// Q-factors of every action at one augmented state.
struct QFactors {
    double stop_q;
    int stop_declare;
    Eigen::VectorXd continue_q; // one entry per fixation action
};

// A solved environment: everything needed to run or persist the policy.
struct SolvedPolicy {
    std::shared_ptr<const SimplexGrid> grid;
    TaskModel model;
    CostParams costs;
    ValueTable values;
    PolicyTable policy;
    int sweeps = 0;
    // Largest per-sweep value increase observed; 0 for monotone iterations.
    double monotonicity_violation = 0.0;
};

// Q-factor of fixating j next from (p, fixation_now), evaluating the future
// through the value table: c + cs*1{j != now} + E_x[ V(p', j) ].
double continuation_value(const TaskModel& model, const CostParams& costs,
                          const SimplexGrid& grid, const ValueTable& values,
                          const Eigen::Ref<const Eigen::VectorXd>& p, int fixation_now,
                          int next_fixation);

QFactors q_factors(const TaskModel& model, const CostParams& costs, const SimplexGrid& grid,
                   const ValueTable& values, const Eigen::Ref<const Eigen::VectorXd>& p,
                   int fixation);

// Greedy action given the stop Q-factor and per-action continuation
// Q-factors with the switch cost not yet applied. Tie-breaks are fixed:
// stop at equality, then stay, then lowest action index.
PolicyAction select_action(double stop_q, int stop_declare,
                           const Eigen::Ref<const Eigen::VectorXd>& cont_base, double cs,
                           int fixation);

// Synchronous value iteration from the stopping-cost initialization until
// the sup-norm sweep change drops below tol. Sweeps are monotone
// nonincreasing. Throws NumericalError when max_sweeps is exhausted.
SolvedPolicy value_iteration(const TaskModel& model, const CostParams& costs,
                             std::shared_ptr<const SimplexGrid> grid, double tol = 1e-6,
                             int max_sweeps = 2000);

// Policy lookup at an arbitrary belief: the action stored at the nearest
// lattice cell (actions are categorical and are not interpolated).
PolicyAction policy_action(const SolvedPolicy& solved,
                           const Eigen::Ref<const Eigen::VectorXd>& p, int fixation);

// Exhaustive finite-horizon expectimax with forced stop at the horizon.
// Grid-free and interpolation-free; the verification oracle for the
// Bellman recursion. Horizon capped at 5 (binary alphabet) or 3.
double expectimax_oracle(const TaskModel& model, const CostParams& costs, StopRule rule,
                         const Eigen::Ref<const Eigen::VectorXd>& p, int fixation, int horizon);

} // namespace cdac
