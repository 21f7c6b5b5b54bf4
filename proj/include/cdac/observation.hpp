#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "cdac/rng.hpp"

namespace cdac {

// An observation is one draw from the model's finite alphabet, encoded as an
// integer. The simple task emits one bit; the peripheral task emits three
// bits packed little-endian (bit d = reading at location d).
using Observation = int;

// Declaration rule available when stopping.
enum class StopRule {
    declare_fixated, // may only declare the currently fixated location
    declare_best     // may declare any location; best is argmax belief
};

// Discrete observation structure shared by both tasks: per-action likelihood
// tables over the full observation alphabet. Immutable value object.
struct TaskModel {
    std::string kind; // "simple" | "peripheral"
    int k = 0;
    int num_actions = 0;
    int num_obs = 0;
    StopRule stop_rule = StopRule::declare_fixated;
    Eigen::VectorXd betas;
    // lik[a](x, s) = P(observation x | target s, fixation action a)
    std::vector<Eigen::MatrixXd> lik;
};

// Three-location search, binary Bernoulli observations at the fixated patch.
// The distractor parameter is tied to the target one: beta0 = 1 - beta1.
struct SimpleTaskModel {
    double beta1;

    explicit SimpleTaskModel(double beta1_);
    double beta0() const { return 1.0 - beta1; }
    TaskModel build() const;
};

// Seven-action search with peripheral vision: fixate a target location
// (full acuity beta1), a midpoint between two (beta2 on both), or the center
// (beta3 on all three); unattended locations degrade to beta4.
struct PeripheralTaskModel {
    Eigen::Vector4d betas; // beta1 > beta2 > beta3 > beta4

    explicit PeripheralTaskModel(const Eigen::Vector4d& betas_);
    TaskModel build() const;
};

// Peripheral action indices in table order.
enum PeripheralAction : int { l1 = 0, l2 = 1, l3 = 2, l12 = 3, l23 = 4, l13 = 5, l123 = 6 };

std::string action_name(const TaskModel& model, int action);

double likelihood(const TaskModel& model, int target, int action, Observation x);

// Posterior after observing x while fixating `action` (Bayes rule, then
// renormalization). Throws NumericalError if all posterior mass vanishes.
Eigen::VectorXd bayes_update(const TaskModel& model, const Eigen::Ref<const Eigen::VectorXd>& p,
                             int action, Observation x);

// Marginal distribution of the next observation under belief p.
Eigen::VectorXd predictive(const TaskModel& model, const Eigen::Ref<const Eigen::VectorXd>& p,
                           int action);

Observation sample_observation(const TaskModel& model, int target, int action, Rng& rng);

// Action image under a relabeling of target locations: fixations follow
// their locations, midpoints follow their endpoint pairs, the center is
// fixed. sigma[i] is the new label of location i.
int permute_action(const TaskModel& model, int action, const std::vector<int>& sigma);

// Observation image under the same relabeling (bit d moves to sigma[d]).
Observation permute_observation(const TaskModel& model, Observation x,
                                const std::vector<int>& sigma);

} // namespace cdac
