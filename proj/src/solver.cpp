#include "cdac/solver.hpp"

#include <cmath>
#include <limits>

#include "cdac/errors.hpp"

namespace cdac {

namespace {

int argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& p) {
    int best = 0;
    for (int i = 1; i < p.size(); ++i) {
        if (p[i] > p[best]) best = i;
    }
    return best;
}

double entropy_of(const Eigen::Ref<const Eigen::VectorXd>& p) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
    }
    return h;
}

void reject_degenerate(const TaskModel& model) {
    if (model.kind == "simple" && model.betas[0] >= 1.0) {
        throw ConfigError("solver requires beta1 < 1: zero-likelihood observations break "
                          "the Bayes update normalization");
    }
}

} // namespace

CostParams::CostParams(double c_, double cs_) : c(c_), cs(cs_) {
    if (!(c > 0.0)) throw ConfigError("step cost c must be positive");
    if (cs < 0.0) throw ConfigError("switch cost cs must be nonnegative");
}

StopDecision stopping_value(StopRule rule, const Eigen::Ref<const Eigen::VectorXd>& p,
                            int fixation) {
    if (rule == StopRule::declare_fixated) {
        if (fixation < 0 || fixation >= p.size()) {
            throw ConfigError("declare-fixated stopping needs a location-valued fixation");
        }
        return {1.0 - p[fixation], fixation};
    }
    const int best = argmax_lowest(p);
    return {1.0 - p[best], best};
}

Eigen::MatrixXd stopping_costs(const TaskModel& model, const SimplexGrid& grid) {
    Eigen::MatrixXd costs(grid.cell_count(), model.num_actions);
    for (Eigen::Index cell = 0; cell < grid.cell_count(); ++cell) {
        const Eigen::VectorXd p = grid.point(cell);
        for (int a = 0; a < model.num_actions; ++a) {
            costs(cell, a) = stopping_value(model.stop_rule, p, a).cost;
        }
    }
    return costs;
}

BeliefTransitions build_transitions(const TaskModel& model, const SimplexGrid& grid) {
    BeliefTransitions t;
    t.num_cells = grid.cell_count();
    t.num_actions = model.num_actions;
    t.num_obs = model.num_obs;
    t.k = model.k;
    const std::size_t slots =
        static_cast<std::size_t>(t.num_cells) * t.num_actions * t.num_obs;
    t.prob.assign(slots, 0.0);
    t.entropy.assign(slots, 0.0);
    t.child.assign(slots * t.k, 0);
    t.weight.assign(slots * t.k, 0.0);

    for (Eigen::Index cell = 0; cell < t.num_cells; ++cell) {
        const Eigen::VectorXd p = grid.point(cell);
        for (int a = 0; a < t.num_actions; ++a) {
            const Eigen::VectorXd pred = model.lik[a] * p;
            for (int x = 0; x < t.num_obs; ++x) {
                if (pred[x] <= 0.0) continue;
                const std::size_t s = t.slot(cell, a, x);
                t.prob[s] = pred[x];
                const Eigen::VectorXd post =
                    model.lik[a].row(x).transpose().cwiseProduct(p) / pred[x];
                t.entropy[s] = entropy_of(post);
                const BarycentricWeights bw = locate(grid, post);
                for (Eigen::Index l = 0; l < bw.indices.size(); ++l) {
                    t.child[s * t.k + l] = static_cast<std::int32_t>(bw.indices[l]);
                    t.weight[s * t.k + l] = bw.weights[l];
                }
            }
        }
    }
    return t;
}

std::int16_t encode_action(const TaskModel& model, PolicyAction action) {
    if (action.stop) {
        if (action.target < 0 || action.target >= model.k) {
            throw ConfigError("stop declaration out of range");
        }
        return static_cast<std::int16_t>(action.target);
    }
    if (action.target < 0 || action.target >= model.num_actions) {
        throw ConfigError("fixation action out of range");
    }
    return static_cast<std::int16_t>(model.k + action.target);
}

PolicyAction decode_action(const TaskModel& model, std::int16_t code) {
    if (code < 0 || code >= model.k + model.num_actions) {
        throw ConfigError("action code out of range");
    }
    if (code < model.k) return {true, code};
    return {false, code - model.k};
}

double continuation_value(const TaskModel& model, const CostParams& costs,
                          const SimplexGrid& grid, const ValueTable& values,
                          const Eigen::Ref<const Eigen::VectorXd>& p, int fixation_now,
                          int next_fixation) {
    const Eigen::VectorXd pred = predictive(model, p, next_fixation);
    double expect = 0.0;
    for (int x = 0; x < model.num_obs; ++x) {
        if (pred[x] <= 0.0) continue;
        const Eigen::VectorXd post = bayes_update(model, p, next_fixation, x);
        expect += pred[x] * interpolate(grid, values.v.col(next_fixation), post);
    }
    const double switch_cost = (next_fixation != fixation_now) ? costs.cs : 0.0;
    return costs.c + switch_cost + expect;
}

QFactors q_factors(const TaskModel& model, const CostParams& costs, const SimplexGrid& grid,
                   const ValueTable& values, const Eigen::Ref<const Eigen::VectorXd>& p,
                   int fixation) {
    QFactors q;
    const StopDecision stop = stopping_value(model.stop_rule, p, fixation);
    q.stop_q = stop.cost;
    q.stop_declare = stop.declare;
    q.continue_q.resize(model.num_actions);
    for (int j = 0; j < model.num_actions; ++j) {
        q.continue_q[j] = continuation_value(model, costs, grid, values, p, fixation, j);
    }
    return q;
}

PolicyAction select_action(double stop_q, int stop_declare,
                           const Eigen::Ref<const Eigen::VectorXd>& cont_base, double cs,
                           int fixation) {
    int best_j = -1;
    double best_q = 0.0;
    for (int j = 0; j < cont_base.size(); ++j) {
        const double q = cont_base[j] + (j != fixation ? cs : 0.0);
        if (best_j < 0 || q < best_q) {
            best_j = j;
            best_q = q;
        }
    }
    if (stop_q <= best_q) return {true, stop_declare};
    if (fixation < cont_base.size() &&
        cont_base[fixation] <= best_q) {
        return {false, fixation};
    }
    return {false, best_j};
}

SolvedPolicy value_iteration(const TaskModel& model, const CostParams& costs,
                             std::shared_ptr<const SimplexGrid> grid, double tol,
                             int max_sweeps) {
    if (!grid) throw ConfigError("value iteration needs a grid");
    if (grid->locations() != model.k) {
        throw ConfigError("grid location count does not match the model");
    }
    if (!(tol > 0.0)) throw ConfigError("convergence tolerance must be positive");
    reject_degenerate(model);

    const BeliefTransitions trans = build_transitions(model, *grid);
    const Eigen::Index cells = grid->cell_count();
    const int actions = model.num_actions;

    const Eigen::MatrixXd stop_cost = stopping_costs(model, *grid);
    Eigen::MatrixXd v = stop_cost;
    Eigen::MatrixXd v_next(cells, actions);
    Eigen::MatrixXd cont_base(cells, actions); // c + E[V(p', j)], switch cost excluded

    int sweeps = 0;
    bool converged = false;
    double worst_increase = 0.0;
    while (sweeps < max_sweeps) {
        ++sweeps;
        for (int j = 0; j < actions; ++j) {
            const double* col = v.col(j).data();
            for (Eigen::Index cell = 0; cell < cells; ++cell) {
                cont_base(cell, j) = costs.c + trans.expected_next(cell, j, col);
            }
        }
        double delta = 0.0;
        for (Eigen::Index cell = 0; cell < cells; ++cell) {
            // min_j cont_base(j) + cs*1{j != a}: the minimum over j != a is
            // the global minimum unless a is its (unique) argmin.
            int arg_min = 0;
            double min1 = cont_base(cell, 0);
            double min2 = std::numeric_limits<double>::infinity();
            for (int j = 1; j < actions; ++j) {
                const double q = cont_base(cell, j);
                if (q < min1) {
                    min2 = min1;
                    min1 = q;
                    arg_min = j;
                } else if (q < min2) {
                    min2 = q;
                }
            }
            for (int a = 0; a < actions; ++a) {
                const double min_other = (a == arg_min) ? min2 : min1;
                const double best = std::min(cont_base(cell, a), min_other + costs.cs);
                const double nv = std::min(stop_cost(cell, a), best);
                delta = std::max(delta, std::abs(nv - v(cell, a)));
                worst_increase = std::max(worst_increase, nv - v(cell, a));
                v_next(cell, a) = nv;
            }
        }
        v.swap(v_next);
        if (delta < tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw NumericalError("value iteration did not converge in " +
                             std::to_string(max_sweeps) + " sweeps");
    }

    // Extract the policy from the converged table.
    PolicyTable policy;
    policy.code.resize(cells, actions);
    for (int j = 0; j < actions; ++j) {
        const double* col = v.col(j).data();
        for (Eigen::Index cell = 0; cell < cells; ++cell) {
            cont_base(cell, j) = costs.c + trans.expected_next(cell, j, col);
        }
    }
    for (Eigen::Index cell = 0; cell < cells; ++cell) {
        const Eigen::VectorXd p = grid->point(cell);
        for (int a = 0; a < actions; ++a) {
            const StopDecision stop = stopping_value(model.stop_rule, p, a);
            const PolicyAction act =
                select_action(stop.cost, stop.declare, cont_base.row(cell).transpose(),
                              costs.cs, a);
            policy.code(cell, a) = encode_action(model, act);
        }
    }

    SolvedPolicy solved{std::move(grid),      model,
                        costs,                ValueTable{std::move(v)},
                        std::move(policy),    sweeps,
                        worst_increase};
    return solved;
}

PolicyAction policy_action(const SolvedPolicy& solved,
                           const Eigen::Ref<const Eigen::VectorXd>& p, int fixation) {
    if (fixation < 0 || fixation >= solved.model.num_actions) {
        throw ConfigError("invalid fixation for policy lookup");
    }
    const Eigen::Index cell = solved.grid->nearest_cell(p);
    return decode_action(solved.model, solved.policy.code(cell, fixation));
}

double expectimax_oracle(const TaskModel& model, const CostParams& costs, StopRule rule,
                         const Eigen::Ref<const Eigen::VectorXd>& p, int fixation,
                         int horizon) {
    const int cap = model.num_obs <= 2 ? 5 : 3;
    if (horizon < 0 || horizon > cap) {
        throw ConfigError("expectimax horizon exceeds the hard cap of " + std::to_string(cap));
    }
    reject_degenerate(model);
    validate_belief(p);

    const double stop_now = stopping_value(rule, p, fixation).cost;
    if (horizon == 0) return stop_now;

    double best = stop_now;
    for (int j = 0; j < model.num_actions; ++j) {
        const Eigen::VectorXd pred = model.lik[j] * p;
        double expect = 0.0;
        for (int x = 0; x < model.num_obs; ++x) {
            if (pred[x] <= 0.0) continue;
            const Eigen::VectorXd post = model.lik[j].row(x).transpose().cwiseProduct(p) / pred[x];
            expect += pred[x] * expectimax_oracle(model, costs, rule, post, j, horizon - 1);
        }
        const double q = costs.c + (j != fixation ? costs.cs : 0.0) + expect;
        best = std::min(best, q);
    }
    return best;
}

} // namespace cdac
