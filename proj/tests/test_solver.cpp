#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "cdac/errors.hpp"
#include "cdac/observation.hpp"
#include "cdac/rng.hpp"
#include "cdac/solver.hpp"

using namespace cdac;

namespace {

const Eigen::Vector3d kUniform(1.0 / 3, 1.0 / 3, 1.0 / 3);

TaskModel simple_with_best_rule(double beta1) {
    // Task-1 observation structure with the declare-anywhere stopping rule.
    TaskModel model = SimpleTaskModel(beta1).build();
    model.stop_rule = StopRule::declare_best;
    return model;
}

} // namespace

TEST_SUITE_BEGIN("solver");

TEST_CASE("cost parameter invariants") {
    CHECK_THROWS_AS(CostParams(0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(CostParams(-0.1, 0.0), ConfigError);
    CHECK_THROWS_AS(CostParams(0.1, -0.01), ConfigError);
    CHECK_NOTHROW(CostParams(0.1, 0.0));
}

TEST_CASE("stopping_value under both rules") {
    const Eigen::Vector3d e1(1, 0, 0);
    const StopDecision certain = stopping_value(StopRule::declare_fixated, e1, 0);
    CHECK(certain.cost == 0.0);
    CHECK(certain.declare == 0);

    const StopDecision uniform2 = stopping_value(StopRule::declare_fixated, kUniform, 1);
    CHECK(uniform2.cost == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(uniform2.declare == 1);

    const StopDecision best = stopping_value(StopRule::declare_best,
                                             Eigen::Vector3d(0.2, 0.5, 0.3), 0);
    CHECK(best.cost == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(best.declare == 1);

    // Argmax tie-break: lowest index.
    CHECK(stopping_value(StopRule::declare_best, Eigen::Vector3d(0.4, 0.4, 0.2), 2).declare ==
          0);
}

TEST_CASE("continuation_value reproduces the hand-computed backup") {
    // Posteriors (9/11,1/11,1/11) and (1/19,9/19,9/19) are lattice points of
    // n = 209, so interpolating the stopping-cost table is exact there.
    const TaskModel model = simple_with_best_rule(0.9);
    auto grid = std::make_shared<const SimplexGrid>(3, 209);
    const ValueTable stop_table{stopping_costs(model, *grid)};

    const CostParams costs(0.1, 0.0);
    const double q = continuation_value(model, costs, *grid, stop_table, kUniform, 0, 0);
    CHECK(std::abs(q - 0.5) <= 1e-12);

    // cs = 0: independent of the current fixation.
    for (int now = 0; now < 3; ++now) {
        CHECK(continuation_value(model, costs, *grid, stop_table, kUniform, now, 0) ==
              doctest::Approx(q).epsilon(1e-15));
    }

    // A switch charges exactly cs on top.
    const CostParams pricey(0.1, 0.25);
    CHECK(continuation_value(model, pricey, *grid, stop_table, kUniform, 1, 0) ==
          doctest::Approx(q + 0.25).epsilon(1e-12));
    CHECK(continuation_value(model, pricey, *grid, stop_table, kUniform, 0, 0) ==
          doctest::Approx(q).epsilon(1e-12));

    // Absorbing belief: posterior stays at the vertex, stop value 0.
    const Eigen::Vector3d e1(1, 0, 0);
    CHECK(continuation_value(model, costs, *grid, stop_table, e1, 0, 0) ==
          doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("expectimax oracle: forced stop, hand value, monotonicity, caps") {
    const TaskModel model = simple_with_best_rule(0.9);
    const CostParams costs(0.1, 0.0);

    CHECK(expectimax_oracle(model, costs, StopRule::declare_best, kUniform, 0, 0) ==
          doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(std::abs(expectimax_oracle(model, costs, StopRule::declare_best, kUniform, 0, 1) -
                   0.5) <= 1e-12);

    Rng rng(41);
    for (int rep = 0; rep < 15; ++rep) {
        const Eigen::VectorXd p = sample_uniform_simplex(3, rng);
        const int fix = static_cast<int>(rng.next_below(3));
        double prev = expectimax_oracle(model, costs, StopRule::declare_best, p, fix, 0);
        for (int h = 1; h <= 4; ++h) {
            const double cur = expectimax_oracle(model, costs, StopRule::declare_best, p, fix, h);
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }

    CHECK_THROWS_AS(expectimax_oracle(model, costs, StopRule::declare_best, kUniform, 0, 6),
                    ConfigError);
    const TaskModel periph =
        PeripheralTaskModel(Eigen::Vector4d(0.62, 0.6, 0.55, 0.5)).build();
    CHECK_THROWS_AS(
        expectimax_oracle(periph, CostParams(0.05, 0.0), StopRule::declare_best, kUniform, 0, 4),
        ConfigError);
}

TEST_CASE("value iteration stops everywhere when observations carry almost no information") {
    const TaskModel model = simple_with_best_rule(0.501);
    const CostParams costs(0.1, 0.0);
    auto grid = std::make_shared<const SimplexGrid>(3, 30);
    const SolvedPolicy solved = value_iteration(model, costs, grid);

    for (Eigen::Index cell = 0; cell < grid->cell_count(); ++cell) {
        for (int a = 0; a < 3; ++a) {
            CHECK(decode_action(model, solved.policy.code(cell, a)).stop);
        }
    }
    // Oracle agreement: continuing is never worth the step cost.
    Rng rng(4);
    for (int rep = 0; rep < 25; ++rep) {
        const Eigen::VectorXd p = sample_uniform_simplex(3, rng);
        const double stop_now = stopping_value(StopRule::declare_best, p, 0).cost;
        CHECK(expectimax_oracle(model, costs, StopRule::declare_best, p, 0, 3) ==
              doctest::Approx(stop_now).epsilon(1e-12));
    }
}

TEST_CASE("peripheral vertices are certain: value 0 and an immediate stop") {
    const TaskModel model = PeripheralTaskModel(Eigen::Vector4d(0.62, 0.6, 0.55, 0.5)).build();
    auto grid = std::make_shared<const SimplexGrid>(3, 20);
    const SolvedPolicy solved = value_iteration(model, CostParams(0.05, 0.0), grid);

    for (int loc = 0; loc < 3; ++loc) {
        Eigen::VectorXi coord = Eigen::VectorXi::Zero(3);
        coord[loc] = 20;
        const Eigen::Index cell = grid->index_of(coord);
        for (int a = 0; a < model.num_actions; ++a) {
            CHECK(solved.values.v(cell, a) == 0.0);
            const PolicyAction act = decode_action(model, solved.policy.code(cell, a));
            CHECK(act.stop);
            CHECK(act.target == loc);
        }
    }
}

TEST_CASE("value iteration on the paper environment: geometry, bounds, determinism") {
    const TaskModel model = SimpleTaskModel(0.9).build();
    const CostParams costs(0.1, 0.0);
    auto grid = std::make_shared<const SimplexGrid>(3, 60);
    const SolvedPolicy solved = value_iteration(model, costs, grid);

    CHECK(solved.sweeps <= 2000);
    CHECK(solved.monotonicity_violation == 0.0);

    const Eigen::MatrixXd stop_cost = stopping_costs(model, *grid);
    CHECK((solved.values.v.array() >= 0.0).all());
    CHECK((solved.values.v.array() <= stop_cost.array() + 1e-15).all());

    // Fig. 1 geometry at the fixation-1 slice: stop only near the fixated
    // corner, otherwise fixate the most likely location.
    const PolicyAction corner = policy_action(solved, Eigen::Vector3d(0.95, 0.03, 0.02), 0);
    CHECK(corner.stop);
    CHECK(corner.target == 0);
    const PolicyAction chase = policy_action(solved, Eigen::Vector3d(0.2, 0.6, 0.2), 0);
    CHECK(!chase.stop);
    CHECK(chase.target == 1);
    const PolicyAction stay = policy_action(solved, kUniform, 0);
    CHECK(!stay.stop);
    CHECK(stay.target == 0); // tie broken toward staying

    // Same inputs give bit-identical tables.
    const SolvedPolicy again = value_iteration(model, costs, grid);
    CHECK(again.values.v == solved.values.v);
    CHECK(again.policy.code == solved.policy.code);
    CHECK(again.sweeps == solved.sweeps);
}

TEST_CASE("value iteration input validation") {
    const TaskModel model = SimpleTaskModel(0.9).build();
    auto grid = std::make_shared<const SimplexGrid>(3, 10);
    CHECK_THROWS_AS(value_iteration(model, CostParams(0.1, 0.0), grid, 1e-6, 1),
                    NumericalError);
    CHECK_THROWS_AS(value_iteration(model, CostParams(0.1, 0.0), grid, 0.0), ConfigError);
    CHECK_THROWS_AS(value_iteration(model, CostParams(0.1, 0.0), nullptr), ConfigError);
    CHECK_THROWS_AS(
        value_iteration(SimpleTaskModel(1.0).build(), CostParams(0.1, 0.0), grid),
        ConfigError);
    auto grid2 = std::make_shared<const SimplexGrid>(2, 10);
    CHECK_THROWS_AS(value_iteration(model, CostParams(0.1, 0.0), grid2), ConfigError);
}

TEST_CASE("coarse-grid values are consistent with the expectimax oracle") {
    const TaskModel model = SimpleTaskModel(0.9).build();
    const CostParams costs(0.1, 0.0);
    auto grid = std::make_shared<const SimplexGrid>(3, 40);
    const SolvedPolicy solved = value_iteration(model, costs, grid);

    Rng rng(99);
    for (int rep = 0; rep < 30; ++rep) {
        const Eigen::Index cell = static_cast<Eigen::Index>(rng.next_below(grid->cell_count()));
        const int fix = static_cast<int>(rng.next_below(3));
        const double oracle = expectimax_oracle(model, costs, StopRule::declare_fixated,
                                                grid->point(cell), fix, 4);
        CHECK(solved.values.v(cell, fix) <= oracle + 5e-3);
    }
}

TEST_CASE("task-1 symmetry on a coarse grid") {
    const TaskModel model = SimpleTaskModel(0.9).build();
    const CostParams costs(0.1, 0.0);
    auto grid = std::make_shared<const SimplexGrid>(3, 30);
    const SolvedPolicy solved = value_iteration(model, costs, grid);

    const std::vector<std::vector<int>> perms = {{0, 2, 1}, {1, 0, 2}, {1, 2, 0},
                                                 {2, 0, 1}, {2, 1, 0}};
    for (const auto& sigma : perms) {
        for (Eigen::Index cell = 0; cell < grid->cell_count(); ++cell) {
            const Eigen::Index pc = grid->permute_cell(cell, sigma);
            for (int a = 0; a < 3; ++a) {
                CHECK(std::abs(solved.values.v(pc, sigma[a]) - solved.values.v(cell, a)) <=
                      1e-12);
            }
        }
    }
}

TEST_CASE("q_factors: continuation never cheaper than one step") {
    const TaskModel model = simple_with_best_rule(0.8);
    const CostParams costs(0.15, 0.05);
    auto grid = std::make_shared<const SimplexGrid>(3, 25);
    const SolvedPolicy solved = value_iteration(model, costs, grid);

    Rng rng(8);
    for (int rep = 0; rep < 40; ++rep) {
        const Eigen::VectorXd p = sample_uniform_simplex(3, rng);
        const int fix = static_cast<int>(rng.next_below(3));
        const QFactors q = q_factors(model, costs, *grid, solved.values, p, fix);
        CHECK(q.continue_q.size() == 3);
        CHECK((q.continue_q.array() >= costs.c - 1e-15).all());
        CHECK(q.stop_q == stopping_value(model.stop_rule, p, fix).cost);
        CHECK(q.continue_q.allFinite());
    }
}

TEST_CASE("policy lookup uses the nearest lattice cell") {
    const TaskModel model = SimpleTaskModel(0.9).build();
    auto grid = std::make_shared<const SimplexGrid>(3, 30);
    const SolvedPolicy solved = value_iteration(model, CostParams(0.1, 0.0), grid);

    // Lattice query returns the stored action.
    const Eigen::Index cell = 137;
    const PolicyAction stored = decode_action(model, solved.policy.code(cell, 2));
    const PolicyAction looked = policy_action(solved, grid->point(cell), 2);
    CHECK(stored.stop == looked.stop);
    CHECK(stored.target == looked.target);

    // Certainty at the fixated vertex stops.
    CHECK(policy_action(solved, Eigen::Vector3d(1, 0, 0), 0).stop);

    // Two queries in the same nearest-cell region give the same action.
    const PolicyAction a1 = policy_action(solved, Eigen::Vector3d(0.501, 0.251, 0.248), 1);
    const PolicyAction a2 = policy_action(solved, Eigen::Vector3d(0.503, 0.249, 0.248), 1);
    CHECK(a1.stop == a2.stop);
    CHECK(a1.target == a2.target);

    CHECK_THROWS_AS(policy_action(solved, kUniform, 5), ConfigError);
}

TEST_CASE("action codes round-trip and reject junk") {
    const TaskModel model = PeripheralTaskModel(Eigen::Vector4d(0.62, 0.6, 0.55, 0.5)).build();
    for (int loc = 0; loc < 3; ++loc) {
        const auto code = encode_action(model, {true, loc});
        CHECK(code == loc);
        CHECK(decode_action(model, code).stop);
        CHECK(decode_action(model, code).target == loc);
    }
    for (int a = 0; a < model.num_actions; ++a) {
        const auto code = encode_action(model, {false, a});
        CHECK(code == model.k + a);
        CHECK(!decode_action(model, code).stop);
        CHECK(decode_action(model, code).target == a);
    }
    CHECK_THROWS_AS(encode_action(model, {true, 3}), ConfigError);
    CHECK_THROWS_AS(encode_action(model, {false, 7}), ConfigError);
    CHECK_THROWS_AS(decode_action(model, 10), ConfigError);
    CHECK_THROWS_AS(decode_action(model, -1), ConfigError);
}

TEST_SUITE_END();
