#include "cdac/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdac/errors.hpp"
#include "cdac/solver.hpp"

namespace cdac {

double entropy(const Eigen::Ref<const Eigen::VectorXd>& p) {
    validate_belief(p);
    double h = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
    }
    return h;
}

double greedy_map_q(const TaskModel& model, const Eigen::Ref<const Eigen::VectorXd>& p,
                    int action) {
    validate_belief(p);
    if (action < 0 || action >= model.num_actions) {
        throw ConfigError("invalid fixation action " + std::to_string(action));
    }
    // E_x[max_i posterior_i] = sum_x max_i lik(i) p_i, since the predictive
    // normalizer cancels against the posterior.
    double expected_max = 0.0;
    for (int x = 0; x < model.num_obs; ++x) {
        double m = 0.0;
        for (int s = 0; s < model.k; ++s) {
            m = std::max(m, model.lik[action](x, s) * p[s]);
        }
        expected_max += m;
    }
    return -expected_max;
}

int greedy_map_action(const TaskModel& model, const Eigen::Ref<const Eigen::VectorXd>& p,
                      Rng& rng, double tie_eps) {
    Eigen::VectorXd q(model.num_actions);
    for (int j = 0; j < model.num_actions; ++j) {
        q[j] = greedy_map_q(model, p, j);
    }
    const double q_min = q.minCoeff();
    std::vector<int> ties;
    for (int j = 0; j < model.num_actions; ++j) {
        if (q[j] <= q_min + tie_eps) ties.push_back(j);
    }
    if (ties.size() == 1) return ties.front();
    return ties[static_cast<std::size_t>(rng.next_below(ties.size()))];
}

InfomaxConfig::InfomaxConfig(int horizon_) : horizon(horizon_) {
    if (horizon < 1) throw ConfigError("infomax horizon must be >= 1");
}

InfomaxTable infomax_solve(const TaskModel& model, std::shared_ptr<const SimplexGrid> grid,
                           const InfomaxConfig& config) {
    if (!grid) throw ConfigError("infomax needs a grid");
    if (grid->locations() != model.k) {
        throw ConfigError("grid location count does not match the model");
    }
    if (config.horizon < 1) throw ConfigError("infomax horizon must be >= 1");

    const BeliefTransitions trans = build_transitions(model, *grid);
    const Eigen::Index cells = grid->cell_count();

    InfomaxTable table;
    table.horizon = config.horizon;
    table.actions.resize(cells, config.horizon);

    // Tie-break order: the argmax-belief location's fixation first, then
    // index order. At certainty cells every action ties at zero future
    // entropy; fixating the believed location keeps the declare-fixated
    // stopping test reachable instead of trapping trials at a vertex.
    std::vector<std::vector<int>> action_order(cells);
    for (Eigen::Index cell = 0; cell < cells; ++cell) {
        int arg_max = 0;
        const auto row = grid->coords().row(cell);
        for (int d = 1; d < model.k; ++d) {
            if (row[d] > row[arg_max]) arg_max = d;
        }
        auto& order = action_order[cell];
        order.push_back(arg_max); // location fixations share the location index
        for (int j = 0; j < model.num_actions; ++j) {
            if (j != arg_max) order.push_back(j);
        }
    }

    Eigen::VectorXd w = Eigen::VectorXd::Zero(cells); // W_T
    Eigen::VectorXd w_next(cells);
    for (int t = config.horizon - 1; t >= 0; --t) {
        for (Eigen::Index cell = 0; cell < cells; ++cell) {
            int best_j = -1;
            double best_q = std::numeric_limits<double>::infinity();
            for (int j : action_order[cell]) {
                const double q = trans.expected_entropy_plus(cell, j, w.data());
                if (q < best_q) {
                    best_q = q;
                    best_j = j;
                }
            }
            w_next[cell] = best_q;
            table.actions(cell, t) = static_cast<std::int8_t>(best_j);
        }
        w.swap(w_next);
        if (!w.allFinite()) {
            throw NumericalError("infomax backup produced non-finite entropy values");
        }
    }
    table.w0 = std::move(w);
    table.grid = std::move(grid);
    return table;
}

int infomax_action(const InfomaxTable& table, const Eigen::Ref<const Eigen::VectorXd>& p) {
    const Eigen::Index cell = table.grid->nearest_cell(p);
    return table.actions(cell, 0);
}

ThresholdPolicy::ThresholdPolicy(const TaskModel& model, double threshold,
                                 const InfomaxTable& table)
    : model_(&model), rule_(ContinuationRule::infomax), threshold_(threshold),
      infomax_(&table) {
    if (!(threshold > 1.0 / model.k) || !(threshold < 1.0)) {
        throw ConfigError("stopping threshold must lie in (1/k, 1)");
    }
}

ThresholdPolicy::ThresholdPolicy(const TaskModel& model, double threshold)
    : model_(&model), rule_(ContinuationRule::greedy_map), threshold_(threshold) {
    if (!(threshold > 1.0 / model.k) || !(threshold < 1.0)) {
        throw ConfigError("stopping threshold must lie in (1/k, 1)");
    }
}

PolicyAction ThresholdPolicy::decide(const Eigen::Ref<const Eigen::VectorXd>& p, int fixation,
                                     Rng& rng) const {
    if (model_->stop_rule == StopRule::declare_fixated) {
        if (p[fixation] >= threshold_) return {true, fixation};
    } else {
        int best = 0;
        for (int i = 1; i < model_->k; ++i) {
            if (p[i] > p[best]) best = i;
        }
        if (p[best] >= threshold_) return {true, best};
    }
    if (rule_ == ContinuationRule::infomax) {
        return {false, infomax_action(*infomax_, p)};
    }
    return {false, greedy_map_action(*model_, p, rng)};
}

TrialRecord run_threshold_policy(const TaskModel& model, const CostParams& costs,
                                 const ThresholdPolicy& policy, const TrialSetup& setup,
                                 int target, std::uint64_t seed) {
    return run_trial(policy, model, costs, setup, target, seed);
}

CalibrationResult calibrate_threshold(const TaskModel& model, const CostParams& costs,
                                      const InfomaxTable* infomax_table, ContinuationRule rule,
                                      const TrialSetup& setup, double target_accuracy,
                                      int n_trials, std::uint64_t seed) {
    if (!(target_accuracy > 1.0 / model.k) || !(target_accuracy < 1.0)) {
        throw ConfigError("target accuracy must lie in (1/k, 1)");
    }
    if (n_trials < 1000) {
        throw ConfigError("calibration needs at least 1000 trials per evaluation");
    }
    if (rule == ContinuationRule::infomax && infomax_table == nullptr) {
        throw ConfigError("infomax calibration needs a solved infomax table");
    }

    CalibrationResult result;
    auto evaluate = [&](double theta) {
        const ThresholdPolicy policy =
            rule == ContinuationRule::infomax
                ? ThresholdPolicy(model, theta, *infomax_table)
                : ThresholdPolicy(model, theta);
        // Same master seed on every evaluation: common random numbers keep
        // the bisection direction noise-free.
        const TrialStats stats = run_batch(policy, model, costs, setup, n_trials, seed);
        result.tested.emplace_back(theta, stats.accuracy);
        return stats.accuracy;
    };

    double lo = 1.0 / model.k + 1e-3;
    double hi = 1.0 - 1e-3;
    const double acc_hi = evaluate(hi);
    if (acc_hi < target_accuracy - 0.05) {
        throw NumericalError("calibration failed: accuracy " + std::to_string(acc_hi) +
                             " at threshold " + std::to_string(hi) +
                             " undershoots target " + std::to_string(target_accuracy));
    }
    evaluate(lo);
    for (int step = 0; step < 20; ++step) {
        const double mid = 0.5 * (lo + hi);
        const double acc = evaluate(mid);
        if (acc > target_accuracy) {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    // Largest tested threshold with accuracy <= target (the "comparable or
    // lower" match); fall back to accuracy <= target + 0.005.
    double best_theta = -1.0, best_acc = 0.0;
    for (const auto& [theta, acc] : result.tested) {
        if (acc <= target_accuracy && theta > best_theta) {
            best_theta = theta;
            best_acc = acc;
        }
    }
    if (best_theta < 0.0) {
        for (const auto& [theta, acc] : result.tested) {
            if (acc <= target_accuracy + 0.005 && theta > best_theta) {
                best_theta = theta;
                best_acc = acc;
            }
        }
    }
    if (best_theta < 0.0) {
        // Every evaluation overshot; the lowest threshold is the closest match.
        best_theta = lo;
        best_acc = result.tested[1].second;
    }
    result.threshold = best_theta;
    result.accuracy = best_acc;
    return result;
}

} // namespace cdac
