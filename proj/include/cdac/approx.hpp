#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

#include "cdac/observation.hpp"
#include "cdac/simplex_grid.hpp"
#include "cdac/solver.hpp"

namespace cdac {

// Gaussian radial-basis representation of the value function, one weight
// vector per fixation action. Feature i at p is
//   phi_i(p) = exp(-|p - mu_i|^2 / (2 sigma^2)) / (sigma (2 pi)^{k/2}).
struct RbfModel {
    Eigen::MatrixXd centers; // M x k, rows on the simplex
    double sigma = 1.0;
    Eigen::MatrixXd weights; // M x num_actions
};

// Triangular-lattice center layout: the `count` most interior points of the
// coarsest simplex lattice with at least `count` points (interiority =
// distance from the boundary, then closeness to the centroid, then
// enumeration order).
Eigen::MatrixXd rbf_center_lattice(int k, int count);

Eigen::MatrixXd rbf_features(const Eigen::Ref<const Eigen::MatrixXd>& centers, double sigma,
                             const Eigen::Ref<const Eigen::MatrixXd>& points);

struct LeastSquaresFit {
    Eigen::VectorXd w;
    Eigen::Index rank = 0;  // effective rank of the feature matrix
    double condition = 0.0; // ratio of largest to smallest retained singular value
};

// Minimum-norm least-squares weights for Phi(points) w = targets
// (pseudoinverse semantics via a rank-revealing SVD).
LeastSquaresFit rbf_fit(const Eigen::Ref<const Eigen::MatrixXd>& centers, double sigma,
                        const Eigen::Ref<const Eigen::MatrixXd>& points,
                        const Eigen::Ref<const Eigen::VectorXd>& targets);

double rbf_eval(const RbfModel& model, const Eigen::Ref<const Eigen::VectorXd>& p, int action);

struct GprHyperparams {
    double signal = 1.0;         // sigma_f
    Eigen::VectorXd length;      // one per belief dimension
    double noise = 0.1;          // sigma_n

    static GprHyperparams isotropic(int k, double signal, double length, double noise);
};

// Gaussian-process regression with a squared-exponential ARD kernel and a
// cached Cholesky factor of K + sigma_n^2 I.
struct GprModel {
    Eigen::MatrixXd train; // N x k
    GprHyperparams hp;
    Eigen::VectorXd targets;
    Eigen::LLT<Eigen::MatrixXd> chol;
    Eigen::VectorXd alpha; // (K + sigma_n^2 I)^{-1} targets
};

GprModel gpr_fit(const Eigen::Ref<const Eigen::MatrixXd>& points,
                 const Eigen::Ref<const Eigen::VectorXd>& targets, const GprHyperparams& hp);

double gpr_predict(const GprModel& model, const Eigen::Ref<const Eigen::VectorXd>& p);

Eigen::VectorXd gpr_predict_many(const GprModel& model,
                                 const Eigen::Ref<const Eigen::MatrixXd>& points);

double gpr_log_marginal_likelihood(const GprModel& model);

struct ArdSearchGrid {
    Eigen::VectorXd signal_candidates;
    Eigen::VectorXd length_candidates; // shared across dimensions
    Eigen::VectorXd noise_candidates;

    // 5 log-spaced points per hyperparameter over [0.1, 10].
    static ArdSearchGrid default_grid();
};

// Deterministic grid search maximizing the log marginal likelihood over the
// full product of candidates (per-dimension length scales).
GprHyperparams gpr_fit_ard(const Eigen::Ref<const Eigen::MatrixXd>& points,
                           const Eigen::Ref<const Eigen::VectorXd>& targets,
                           const ArdSearchGrid& grid);

enum class ApproxMethod { rbf, gpr, gpr_ard };

struct ApproxConfig {
    ApproxMethod method = ApproxMethod::rbf;
    int rbf_bases = 49;
    double rbf_sigma = 1.0;
    int rbf_samples = 1000; // fresh belief samples per iteration
    GprHyperparams gpr_hp;  // fixed hyperparameters (gpr) or ARD fallback start
    int gpr_samples = 200;
    ArdSearchGrid ard_grid = ArdSearchGrid::default_grid();
    double tol = 1e-4;      // sup-norm prediction change over the probe set
    int max_iterations = 100;
    int probe_points = 500;
    std::uint64_t seed = 1;

    ApproxConfig() { gpr_hp = GprHyperparams::isotropic(3, 1.0, 1.0, 0.1); }
};

struct ApproxResult {
    ApproxMethod method = ApproxMethod::rbf;
    RbfModel rbf;
    std::vector<GprModel> gpr; // one per fixation action
    GprHyperparams selected_hp; // after ARD, when used
    ValueTable values;  // backup values evaluated on the grid
    PolicyTable policy; // extracted on the grid
    int iterations = 0;
    bool converged = false;
    double final_change = 0.0; // last probe-set sup-norm prediction change
    Eigen::Index fit_rank = 0; // RBF conditioning diagnostics (last fit)
    double fit_condition = 0.0;
};

// Sampled fitted value iteration: initialize targets with stopping costs,
// fit the representation, then alternate fresh uniform belief samples,
// Bellman backups through the representation, and refits, until predictions
// over a fixed seeded probe set move less than tol or max_iterations is
// reached. Non-convergence is signaled through `converged` and
// `final_change`; the fitted representation and extracted policy are
// returned either way.
ApproxResult approx_value_iteration(const TaskModel& model, const CostParams& costs,
                                    std::shared_ptr<const SimplexGrid> grid,
                                    const ApproxConfig& config);

} // namespace cdac
