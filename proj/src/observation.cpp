#include "cdac/observation.hpp"

#include <array>
#include <cmath>

#include "cdac/errors.hpp"
#include "cdac/simplex_grid.hpp"

namespace cdac {

namespace {

double bernoulli(double success, int bit) { return bit ? success : 1.0 - success; }

constexpr std::array<std::array<int, 2>, 3> kPairActions = {{{0, 1}, {1, 2}, {0, 2}}};

void check_action(const TaskModel& model, int action) {
    if (action < 0 || action >= model.num_actions) {
        throw ConfigError("invalid fixation action " + std::to_string(action));
    }
}

void check_target(const TaskModel& model, int target) {
    if (target < 0 || target >= model.k) {
        throw ConfigError("invalid target location " + std::to_string(target));
    }
}

void check_observation(const TaskModel& model, Observation x) {
    if (x < 0 || x >= model.num_obs) {
        throw ConfigError("invalid observation " + std::to_string(x));
    }
}

} // namespace

SimpleTaskModel::SimpleTaskModel(double beta1_) : beta1(beta1_) {
    if (!(beta1 > 0.5) || !(beta1 <= 1.0)) {
        throw ConfigError("simple task needs 0.5 < beta1 <= 1");
    }
}

TaskModel SimpleTaskModel::build() const {
    TaskModel m;
    m.kind = "simple";
    m.k = 3;
    m.num_actions = 3;
    m.num_obs = 2;
    m.stop_rule = StopRule::declare_fixated;
    m.betas = Eigen::VectorXd::Constant(1, beta1);
    m.lik.resize(m.num_actions);
    for (int a = 0; a < m.num_actions; ++a) {
        Eigen::MatrixXd table(m.num_obs, m.k);
        for (int s = 0; s < m.k; ++s) {
            const double param = (s == a) ? beta1 : beta0();
            for (int x = 0; x < m.num_obs; ++x) {
                table(x, s) = bernoulli(param, x);
            }
        }
        m.lik[a] = table;
    }
    return m;
}

PeripheralTaskModel::PeripheralTaskModel(const Eigen::Vector4d& betas_) : betas(betas_) {
    const double b1 = betas[0], b2 = betas[1], b3 = betas[2], b4 = betas[3];
    if (!(1.0 > b1 && b1 > b2 && b2 > b3 && b3 > b4 && b4 >= 0.5)) {
        throw ConfigError("peripheral task needs 1 > beta1 > beta2 > beta3 > beta4 >= 0.5");
    }
}

TaskModel PeripheralTaskModel::build() const {
    TaskModel m;
    m.kind = "peripheral";
    m.k = 3;
    m.num_actions = 7;
    m.num_obs = 8;
    m.stop_rule = StopRule::declare_best;
    m.betas = betas;

    // Acuity level of location d while executing action a.
    auto level = [&](int a, int d) -> double {
        if (a < 3) return d == a ? betas[0] : betas[3];
        if (a < 6) {
            const auto& pair = kPairActions[a - 3];
            return (d == pair[0] || d == pair[1]) ? betas[1] : betas[3];
        }
        return betas[2];
    };

    m.lik.resize(m.num_actions);
    for (int a = 0; a < m.num_actions; ++a) {
        Eigen::MatrixXd table(m.num_obs, m.k);
        for (int s = 0; s < m.k; ++s) {
            for (int x = 0; x < m.num_obs; ++x) {
                double prob = 1.0;
                for (int d = 0; d < m.k; ++d) {
                    const double acuity = level(a, d);
                    const double success = (d == s) ? acuity : 1.0 - acuity;
                    prob *= bernoulli(success, (x >> d) & 1);
                }
                table(x, s) = prob;
            }
        }
        m.lik[a] = table;
    }
    return m;
}

std::string action_name(const TaskModel& model, int action) {
    check_action(model, action);
    if (model.kind == "peripheral") {
        static const std::array<const char*, 7> names = {"l1", "l2", "l3", "l12",
                                                         "l23", "l13", "l123"};
        return names[action];
    }
    return "l" + std::to_string(action + 1);
}

double likelihood(const TaskModel& model, int target, int action, Observation x) {
    check_target(model, target);
    check_action(model, action);
    check_observation(model, x);
    return model.lik[action](x, target);
}

Eigen::VectorXd bayes_update(const TaskModel& model, const Eigen::Ref<const Eigen::VectorXd>& p,
                             int action, Observation x) {
    check_action(model, action);
    check_observation(model, x);
    validate_belief(p);
    Eigen::VectorXd post = model.lik[action].row(x).transpose().cwiseProduct(p);
    const double norm = post.sum();
    if (norm <= 0.0) {
        throw NumericalError("ill-posed Bayes update: observation has zero probability");
    }
    return post / norm;
}

Eigen::VectorXd predictive(const TaskModel& model, const Eigen::Ref<const Eigen::VectorXd>& p,
                           int action) {
    check_action(model, action);
    validate_belief(p);
    return model.lik[action] * p;
}

Observation sample_observation(const TaskModel& model, int target, int action, Rng& rng) {
    check_target(model, target);
    check_action(model, action);
    const double u = rng.next_unit();
    double acc = 0.0;
    for (int x = 0; x < model.num_obs; ++x) {
        acc += model.lik[action](x, target);
        if (u < acc) return x;
    }
    return model.num_obs - 1;
}

int permute_action(const TaskModel& model, int action, const std::vector<int>& sigma) {
    check_action(model, action);
    if (static_cast<int>(sigma.size()) != model.k) {
        throw ConfigError("permutation has wrong size");
    }
    if (model.kind == "simple") {
        return sigma[action];
    }
    if (action < 3) return sigma[action];
    if (action == l123) return l123;
    const auto& pair = kPairActions[action - 3];
    const int a = sigma[pair[0]], b = sigma[pair[1]];
    const int lo = std::min(a, b), hi = std::max(a, b);
    for (int j = 0; j < 3; ++j) {
        if (kPairActions[j][0] == lo && kPairActions[j][1] == hi) return 3 + j;
    }
    throw NumericalError("unreachable: pair action permutation");
}

Observation permute_observation(const TaskModel& model, Observation x,
                                const std::vector<int>& sigma) {
    check_observation(model, x);
    if (model.num_obs == 2) return x;
    Observation out = 0;
    for (int d = 0; d < model.k; ++d) {
        if ((x >> d) & 1) out |= 1 << sigma[d];
    }
    return out;
}

} // namespace cdac
