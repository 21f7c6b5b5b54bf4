#include "cdac/approx.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cdac/errors.hpp"
#include "cdac/rng.hpp"

namespace cdac {

namespace {

double feature_scale(int k, double sigma) {
    return 1.0 / (sigma * std::pow(2.0 * M_PI, 0.5 * k));
}

Eigen::MatrixXd pairwise_sq_dist(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                 const Eigen::Ref<const Eigen::MatrixXd>& b) {
    Eigen::MatrixXd d2 = -2.0 * a * b.transpose();
    d2.colwise() += a.rowwise().squaredNorm();
    d2.rowwise() += b.rowwise().squaredNorm().transpose();
    return d2.cwiseMax(0.0);
}

} // namespace

Eigen::MatrixXd rbf_center_lattice(int k, int count) {
    if (k < 2) throw ConfigError("center lattice needs k >= 2");
    if (count < 1) throw ConfigError("center lattice needs at least one point");

    int nc = 1;
    while (true) {
        SimplexGrid lattice(k, nc);
        if (lattice.cell_count() >= count) {
            struct Scored {
                int min_coord;
                double centroid_dist2;
                Eigen::Index index;
            };
            std::vector<Scored> scored;
            scored.reserve(lattice.cell_count());
            const double centroid = static_cast<double>(nc) / k;
            for (Eigen::Index i = 0; i < lattice.cell_count(); ++i) {
                const auto row = lattice.coords().row(i);
                double d2 = 0.0;
                for (int d = 0; d < k; ++d) {
                    const double delta = row[d] - centroid;
                    d2 += delta * delta;
                }
                scored.push_back({row.minCoeff(), d2, i});
            }
            std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
                if (a.min_coord != b.min_coord) return a.min_coord > b.min_coord;
                if (a.centroid_dist2 != b.centroid_dist2) {
                    return a.centroid_dist2 < b.centroid_dist2;
                }
                return a.index < b.index;
            });
            Eigen::MatrixXd centers(count, k);
            for (int i = 0; i < count; ++i) {
                centers.row(i) =
                    lattice.coords().row(scored[i].index).cast<double>() / double(nc);
            }
            return centers;
        }
        ++nc;
    }
}

Eigen::MatrixXd rbf_features(const Eigen::Ref<const Eigen::MatrixXd>& centers, double sigma,
                             const Eigen::Ref<const Eigen::MatrixXd>& points) {
    if (centers.cols() != points.cols()) {
        throw ConfigError("center and point dimensions differ");
    }
    if (!(sigma > 0.0)) throw ConfigError("RBF width must be positive");
    const double scale = feature_scale(static_cast<int>(centers.cols()), sigma);
    Eigen::MatrixXd d2 = pairwise_sq_dist(points, centers);
    return (d2 / (-2.0 * sigma * sigma)).array().exp().matrix() * scale;
}

LeastSquaresFit rbf_fit(const Eigen::Ref<const Eigen::MatrixXd>& centers, double sigma,
                        const Eigen::Ref<const Eigen::MatrixXd>& points,
                        const Eigen::Ref<const Eigen::VectorXd>& targets) {
    if (points.rows() != targets.size()) {
        throw ConfigError("fit needs one target per point");
    }
    if (points.rows() < 1 || centers.rows() < 1) {
        throw ConfigError("fit needs at least one point and one basis");
    }
    const Eigen::MatrixXd phi = rbf_features(centers, sigma, points);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
    LeastSquaresFit fit;
    fit.w = svd.solve(targets); // minimum-norm least squares
    fit.rank = svd.rank();
    if (fit.rank == 0) {
        throw NumericalError("RBF fit collapsed: feature matrix has rank 0");
    }
    const auto& sv = svd.singularValues();
    fit.condition = sv[0] / sv[fit.rank - 1];
    return fit;
}

double rbf_eval(const RbfModel& model, const Eigen::Ref<const Eigen::VectorXd>& p, int action) {
    if (action < 0 || action >= model.weights.cols()) {
        throw ConfigError("no fitted weights for this action");
    }
    const Eigen::MatrixXd phi = rbf_features(model.centers, model.sigma, p.transpose());
    return (phi * model.weights.col(action))(0);
}

GprHyperparams GprHyperparams::isotropic(int k, double signal, double length, double noise) {
    GprHyperparams hp;
    hp.signal = signal;
    hp.length = Eigen::VectorXd::Constant(k, length);
    hp.noise = noise;
    return hp;
}

namespace {

void validate_hp(const GprHyperparams& hp) {
    if (!(hp.signal > 0.0) || !(hp.noise > 0.0) || hp.length.size() < 1 ||
        !(hp.length.array() > 0.0).all()) {
        throw ConfigError("GPR hyperparameters must all be positive");
    }
}

Eigen::MatrixXd ard_kernel(const GprHyperparams& hp, const Eigen::Ref<const Eigen::MatrixXd>& a,
                           const Eigen::Ref<const Eigen::MatrixXd>& b) {
    const Eigen::MatrixXd as = a * hp.length.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd bs = b * hp.length.cwiseInverse().asDiagonal();
    Eigen::MatrixXd d2 = pairwise_sq_dist(as, bs);
    return hp.signal * hp.signal * (-0.5 * d2).array().exp().matrix();
}

} // namespace

GprModel gpr_fit(const Eigen::Ref<const Eigen::MatrixXd>& points,
                 const Eigen::Ref<const Eigen::VectorXd>& targets, const GprHyperparams& hp) {
    if (points.rows() != targets.size()) {
        throw ConfigError("fit needs one target per point");
    }
    if (points.rows() < 1) throw ConfigError("GPR needs at least one training point");
    if (hp.length.size() != points.cols()) {
        throw ConfigError("GPR needs one length scale per belief dimension");
    }
    validate_hp(hp);

    GprModel model;
    model.train = points;
    model.hp = hp;
    model.targets = targets;
    Eigen::MatrixXd gram = ard_kernel(hp, points, points);
    gram.diagonal().array() += hp.noise * hp.noise;
    model.chol.compute(gram);
    if (model.chol.info() != Eigen::Success) {
        throw NumericalError("GPR kernel matrix is not positive definite");
    }
    model.alpha = model.chol.solve(targets);
    return model;
}

double gpr_predict(const GprModel& model, const Eigen::Ref<const Eigen::VectorXd>& p) {
    return gpr_predict_many(model, p.transpose())(0);
}

Eigen::VectorXd gpr_predict_many(const GprModel& model,
                                 const Eigen::Ref<const Eigen::MatrixXd>& points) {
    const Eigen::MatrixXd cross = ard_kernel(model.hp, points, model.train);
    return cross * model.alpha;
}

double gpr_log_marginal_likelihood(const GprModel& model) {
    const Eigen::Index n = model.train.rows();
    const double data_fit = -0.5 * model.targets.dot(model.alpha);
    const double log_det = model.chol.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return data_fit - log_det - 0.5 * n * std::log(2.0 * M_PI);
}

ArdSearchGrid ArdSearchGrid::default_grid() {
    ArdSearchGrid grid;
    Eigen::VectorXd pts(5);
    for (int i = 0; i < 5; ++i) {
        pts[i] = std::pow(10.0, -1.0 + 0.5 * i);
    }
    grid.signal_candidates = pts;
    grid.length_candidates = pts;
    grid.noise_candidates = pts;
    return grid;
}

GprHyperparams gpr_fit_ard(const Eigen::Ref<const Eigen::MatrixXd>& points,
                           const Eigen::Ref<const Eigen::VectorXd>& targets,
                           const ArdSearchGrid& grid) {
    if (grid.signal_candidates.size() < 1 || grid.length_candidates.size() < 1 ||
        grid.noise_candidates.size() < 1) {
        throw ConfigError("ARD search needs nonempty candidate grids");
    }
    const int k = static_cast<int>(points.cols());
    const Eigen::Index n_len = grid.length_candidates.size();
    std::vector<int> length_index(k, 0);

    GprHyperparams best;
    double best_lml = -std::numeric_limits<double>::infinity();
    bool any_pd = false;

    // Odometer over per-dimension length-scale choices, innermost loops over
    // signal and noise. Fixed enumeration order keeps the argmax
    // deterministic (first candidate wins ties).
    while (true) {
        GprHyperparams hp;
        hp.length.resize(k);
        for (int d = 0; d < k; ++d) {
            hp.length[d] = grid.length_candidates[length_index[d]];
        }
        for (Eigen::Index si = 0; si < grid.signal_candidates.size(); ++si) {
            for (Eigen::Index ni = 0; ni < grid.noise_candidates.size(); ++ni) {
                hp.signal = grid.signal_candidates[si];
                hp.noise = grid.noise_candidates[ni];
                try {
                    const GprModel model = gpr_fit(points, targets, hp);
                    const double lml = gpr_log_marginal_likelihood(model);
                    any_pd = true;
                    if (lml > best_lml) {
                        best_lml = lml;
                        best = hp;
                    }
                } catch (const NumericalError&) {
                    continue; // non-PD candidate
                }
            }
        }
        int d = 0;
        while (d < k) {
            if (++length_index[d] < n_len) break;
            length_index[d] = 0;
            ++d;
        }
        if (d == k) break;
    }
    if (!any_pd) {
        throw NumericalError("ARD search: every hyperparameter candidate was non-PD");
    }
    return best;
}

namespace {

// Evaluates the fitted representation for one action at many points.
struct Representation {
    const ApproxConfig* config;
    RbfModel rbf;
    std::vector<GprModel> gpr;

    Eigen::VectorXd eval(int action, const Eigen::Ref<const Eigen::MatrixXd>& points) const {
        if (config->method == ApproxMethod::rbf) {
            return rbf_features(rbf.centers, rbf.sigma, points) * rbf.weights.col(action);
        }
        return gpr_predict_many(gpr[action], points);
    }
};

Eigen::MatrixXd sample_points(int count, int k, Rng& rng) {
    Eigen::MatrixXd pts(count, k);
    for (int i = 0; i < count; ++i) {
        pts.row(i) = sample_uniform_simplex(k, rng).transpose();
    }
    return pts;
}

Eigen::MatrixXd stop_cost_targets(const TaskModel& model,
                                  const Eigen::Ref<const Eigen::MatrixXd>& points) {
    Eigen::MatrixXd targets(points.rows(), model.num_actions);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        for (int a = 0; a < model.num_actions; ++a) {
            targets(i, a) = stopping_value(model.stop_rule, points.row(i).transpose(), a).cost;
        }
    }
    return targets;
}

// One Bellman backup through the representation at every point:
// cont_base(i, j) = c + sum_x P(x | p_i, j) * repr_j(posterior).
Eigen::MatrixXd continuation_base(const TaskModel& model, const CostParams& costs,
                                  const Representation& repr,
                                  const Eigen::Ref<const Eigen::MatrixXd>& points) {
    const Eigen::Index m = points.rows();
    Eigen::MatrixXd cont(m, model.num_actions);
    Eigen::MatrixXd posts(m * model.num_obs, model.k);
    Eigen::MatrixXd preds(m, model.num_obs);
    for (int j = 0; j < model.num_actions; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            const Eigen::VectorXd p = points.row(i).transpose();
            const Eigen::VectorXd pred = model.lik[j] * p;
            for (int x = 0; x < model.num_obs; ++x) {
                preds(i, x) = pred[x];
                if (pred[x] > 0.0) {
                    posts.row(i * model.num_obs + x) =
                        (model.lik[j].row(x).transpose().cwiseProduct(p) / pred[x]).transpose();
                } else {
                    posts.row(i * model.num_obs + x).setConstant(1.0 / model.k);
                }
            }
        }
        const Eigen::VectorXd vals = repr.eval(j, posts);
        for (Eigen::Index i = 0; i < m; ++i) {
            double expect = 0.0;
            for (int x = 0; x < model.num_obs; ++x) {
                if (preds(i, x) > 0.0) {
                    expect += preds(i, x) * vals[i * model.num_obs + x];
                }
            }
            cont(i, j) = costs.c + expect;
        }
    }
    return cont;
}

} // namespace

ApproxResult approx_value_iteration(const TaskModel& model, const CostParams& costs,
                                    std::shared_ptr<const SimplexGrid> grid,
                                    const ApproxConfig& config) {
    if (!grid) throw ConfigError("approximate value iteration needs a grid");
    if (grid->locations() != model.k) {
        throw ConfigError("grid location count does not match the model");
    }
    const int m = config.method == ApproxMethod::rbf ? config.rbf_samples : config.gpr_samples;
    if (m < 1) throw ConfigError("need at least one sample per iteration");
    if (config.method == ApproxMethod::rbf && m < config.rbf_bases) {
        throw ConfigError("RBF needs at least as many samples as bases");
    }

    Rng sample_rng(derive_seed(config.seed, 1));
    Rng probe_rng(derive_seed(config.seed, 2));
    const Eigen::MatrixXd probes = sample_points(config.probe_points, model.k, probe_rng);

    ApproxResult result;
    result.method = config.method;

    Representation repr;
    repr.config = &config;

    GprHyperparams hp = config.gpr_hp;
    if (hp.length.size() != model.k) {
        hp = GprHyperparams::isotropic(model.k, hp.signal, hp.length.size() ? hp.length[0] : 1.0,
                                       hp.noise);
    }

    // Step 3: initial targets are the stopping costs at the first sample.
    Eigen::MatrixXd points = sample_points(m, model.k, sample_rng);
    Eigen::MatrixXd targets = stop_cost_targets(model, points);

    if (config.method == ApproxMethod::gpr_ard) {
        hp = gpr_fit_ard(points, targets.col(0), config.ard_grid);
        result.selected_hp = hp;
    }

    auto fit_all = [&](const Eigen::MatrixXd& pts, const Eigen::MatrixXd& tgt) {
        if (config.method == ApproxMethod::rbf) {
            if (repr.rbf.centers.rows() == 0) {
                repr.rbf.centers = rbf_center_lattice(model.k, config.rbf_bases);
                repr.rbf.sigma = config.rbf_sigma;
            }
            repr.rbf.weights.resize(config.rbf_bases, model.num_actions);
            for (int a = 0; a < model.num_actions; ++a) {
                const LeastSquaresFit fit =
                    rbf_fit(repr.rbf.centers, repr.rbf.sigma, pts, tgt.col(a));
                repr.rbf.weights.col(a) = fit.w;
                result.fit_rank = fit.rank;
                result.fit_condition = fit.condition;
            }
        } else {
            repr.gpr.clear();
            for (int a = 0; a < model.num_actions; ++a) {
                repr.gpr.push_back(gpr_fit(pts, tgt.col(a), hp));
            }
        }
    };

    fit_all(points, targets);

    Eigen::MatrixXd probe_prev(config.probe_points, model.num_actions);
    for (int a = 0; a < model.num_actions; ++a) {
        probe_prev.col(a) = repr.eval(a, probes);
    }

    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        points = sample_points(m, model.k, sample_rng);
        const Eigen::MatrixXd cont = continuation_base(model, costs, repr, points);
        targets.resize(points.rows(), model.num_actions);
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            // min over j of cont + switch cost, shared two-scan trick.
            int arg_min = 0;
            double min1 = cont(i, 0), min2 = std::numeric_limits<double>::infinity();
            for (int j = 1; j < model.num_actions; ++j) {
                if (cont(i, j) < min1) {
                    min2 = min1;
                    min1 = cont(i, j);
                    arg_min = j;
                } else if (cont(i, j) < min2) {
                    min2 = cont(i, j);
                }
            }
            for (int a = 0; a < model.num_actions; ++a) {
                const double stop =
                    stopping_value(model.stop_rule, points.row(i).transpose(), a).cost;
                const double min_other = (a == arg_min) ? min2 : min1;
                const double best = std::min(cont(i, a), min_other + costs.cs);
                targets(i, a) = std::min(stop, best);
            }
        }
        fit_all(points, targets);

        double change = 0.0;
        Eigen::MatrixXd probe_now(config.probe_points, model.num_actions);
        for (int a = 0; a < model.num_actions; ++a) {
            probe_now.col(a) = repr.eval(a, probes);
        }
        change = (probe_now - probe_prev).cwiseAbs().maxCoeff();
        probe_prev.swap(probe_now);
        result.iterations = iter;
        result.final_change = change;
        if (change < config.tol) {
            result.converged = true;
            break;
        }
    }

    // Extract grid policy and backup values through the representation.
    const Eigen::Index cells = grid->cell_count();
    Eigen::MatrixXd grid_points(cells, model.k);
    for (Eigen::Index cell = 0; cell < cells; ++cell) {
        grid_points.row(cell) = grid->point(cell).transpose();
    }
    const Eigen::MatrixXd cont = continuation_base(model, costs, repr, grid_points);
    result.values.v.resize(cells, model.num_actions);
    result.policy.code.resize(cells, model.num_actions);
    for (Eigen::Index cell = 0; cell < cells; ++cell) {
        for (int a = 0; a < model.num_actions; ++a) {
            const StopDecision stop =
                stopping_value(model.stop_rule, grid_points.row(cell).transpose(), a);
            const PolicyAction act = select_action(stop.cost, stop.declare,
                                                   cont.row(cell).transpose(), costs.cs, a);
            result.policy.code(cell, a) = encode_action(model, act);
            const double q_cont = [&] {
                double best = std::numeric_limits<double>::infinity();
                for (int j = 0; j < model.num_actions; ++j) {
                    best = std::min(best, cont(cell, j) + (j != a ? costs.cs : 0.0));
                }
                return best;
            }();
            result.values.v(cell, a) = std::min(stop.cost, q_cont);
        }
    }
    result.rbf = std::move(repr.rbf);
    result.gpr = std::move(repr.gpr);
    return result;
}

} // namespace cdac
