#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "cdac/errors.hpp"
#include "cdac/rng.hpp"
#include "cdac/simplex_grid.hpp"

using namespace cdac;

namespace {

// Independent cell-count oracle: exhaustive enumeration by nested loops.
long brute_count_k3(int n) {
    long count = 0;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; a + b <= n; ++b) ++count;
    return count;
}

std::uint64_t binom(int n, int r) {
    std::uint64_t v = 1;
    for (int i = 0; i < r; ++i) v = v * (n - i) / (i + 1);
    return v;
}

Eigen::VectorXd reconstruct(const SimplexGrid& grid, const BarycentricWeights& bw) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(grid.locations());
    for (Eigen::Index i = 0; i < bw.indices.size(); ++i) {
        acc += bw.weights[i] * grid.point(bw.indices[i]);
    }
    return acc;
}

} // namespace

TEST_SUITE_BEGIN("simplex_grid");

TEST_CASE("cell count matches the combinatorial formula and brute enumeration") {
    const SimplexGrid big(3, 200);
    CHECK(big.cell_count() == 20301);
    CHECK(big.cell_count() == static_cast<Eigen::Index>(binom(202, 2)));
    CHECK(big.cell_count() == brute_count_k3(200));

    const SimplexGrid vertices(3, 1);
    CHECK(vertices.cell_count() == 3);

    const SimplexGrid k2(2, 2);
    CHECK(k2.cell_count() == 3);
    // Ascending lexicographic order: (0,2), (1,1), (2,0).
    CHECK(k2.coords()(0, 0) == 0);
    CHECK(k2.coords()(0, 1) == 2);
    CHECK(k2.coords()(1, 0) == 1);
    CHECK(k2.coords()(1, 1) == 1);
    CHECK(k2.coords()(2, 0) == 2);
    CHECK(k2.coords()(2, 1) == 0);

    CHECK(SimplexGrid(4, 6).cell_count() == static_cast<Eigen::Index>(binom(9, 3)));
}

TEST_CASE("constructor rejects bad arguments") {
    CHECK_THROWS_AS(SimplexGrid(1, 5), ConfigError);
    CHECK_THROWS_AS(SimplexGrid(3, 0), ConfigError);
}

TEST_CASE("indexing is a bijection and coordinates sum to n exactly") {
    for (const auto& [k, n] : std::vector<std::pair<int, int>>{{3, 25}, {2, 17}, {4, 6}}) {
        const SimplexGrid grid(k, n);
        std::set<Eigen::Index> seen;
        for (Eigen::Index i = 0; i < grid.cell_count(); ++i) {
            CHECK(grid.coords().row(i).sum() == n);
            const Eigen::VectorXi coord = grid.coords().row(i).transpose();
            const Eigen::Index back = grid.index_of(coord);
            CHECK(back == i);
            seen.insert(back);
        }
        CHECK(static_cast<Eigen::Index>(seen.size()) == grid.cell_count());
    }
}

TEST_CASE("locate returns single vertex for lattice points") {
    const SimplexGrid grid(3, 200);
    const BarycentricWeights bw = locate(grid, Eigen::Vector3d(1.0, 0.0, 0.0));
    REQUIRE(bw.indices.size() == 1);
    CHECK(bw.weights[0] == 1.0);
    Eigen::VectorXi e1(3);
    e1 << 200, 0, 0;
    CHECK(bw.indices[0] == grid.index_of(e1));

    // Interior lattice point given at double precision.
    const Eigen::Vector3d p(3.0 / 200.0, 117.0 / 200.0, 80.0 / 200.0);
    const BarycentricWeights bw2 = locate(grid, p);
    REQUIRE(bw2.indices.size() == 1);
    CHECK(bw2.weights[0] == 1.0);
}

TEST_CASE("locate weights are convex and reconstruct the query") {
    const SimplexGrid coarse(3, 2);
    const Eigen::Vector3d q(0.5, 0.25, 0.25);
    const BarycentricWeights bw = locate(coarse, q);
    CHECK(bw.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((bw.weights.array() >= 0.0).all());
    CHECK((reconstruct(coarse, bw) - q).cwiseAbs().maxCoeff() <= 1e-12);

    const SimplexGrid grid(3, 200);
    const Eigen::Vector3d u(1.0 / 3, 1.0 / 3, 1.0 / 3);
    const BarycentricWeights bu = locate(grid, u);
    CHECK(bu.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((reconstruct(grid, bu) - u).cwiseAbs().maxCoeff() <= 1e-12);

    Rng rng(31337);
    for (const auto& [k, n] : std::vector<std::pair<int, int>>{{3, 200}, {2, 9}, {4, 7}}) {
        const SimplexGrid g(k, n);
        for (int rep = 0; rep < 200; ++rep) {
            const Eigen::VectorXd p = sample_uniform_simplex(k, rng);
            const BarycentricWeights w = locate(g, p);
            CHECK(w.indices.size() <= k);
            CHECK((w.weights.array() >= 0.0).all());
            CHECK(std::abs(w.weights.sum() - 1.0) <= 1e-12);
            CHECK((reconstruct(g, w) - p).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("locate rejects points off the simplex") {
    const SimplexGrid grid(3, 10);
    CHECK_THROWS_AS(locate(grid, Eigen::Vector3d(0.5, 0.6, -0.1)), ConfigError);
    CHECK_THROWS_AS(locate(grid, Eigen::Vector3d(0.5, 0.5, 0.1)), ConfigError);
    CHECK_THROWS_AS(locate(grid, Eigen::Vector3d(-1e-6, 0.5, 0.5)), ConfigError);
    // Float drift within 1e-9 is renormalized silently.
    CHECK_NOTHROW(locate(grid, Eigen::Vector3d(0.5 + 4e-10, 0.25, 0.25)));
    CHECK_NOTHROW(locate(grid, Eigen::Vector3d(-5e-10, 0.5, 0.5)));
}

TEST_CASE("interpolation: constants, stored values, and a linear field") {
    const SimplexGrid grid(3, 200);
    const Eigen::VectorXd ones = Eigen::VectorXd::Constant(grid.cell_count(), 3.25);
    Rng rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        const Eigen::VectorXd p = sample_uniform_simplex(3, rng);
        CHECK(interpolate(grid, ones, p) == doctest::Approx(3.25).epsilon(1e-13));
    }

    Eigen::VectorXd p1_field(grid.cell_count());
    for (Eigen::Index i = 0; i < grid.cell_count(); ++i) p1_field[i] = grid.point(i)[0];
    CHECK(std::abs(interpolate(grid, p1_field, Eigen::Vector3d(0.4005, 0.3, 0.2995)) -
                   0.4005) <= 1e-12);

    // Lattice query returns the stored value exactly.
    Eigen::VectorXd field(grid.cell_count());
    Rng vals(11);
    for (Eigen::Index i = 0; i < grid.cell_count(); ++i) field[i] = vals.next_unit();
    const Eigen::Index cell = 1234;
    CHECK(interpolate(grid, field, grid.point(cell)) == field[cell]);

    CHECK_THROWS_AS(interpolate(grid, Eigen::VectorXd::Zero(5), Eigen::Vector3d(1, 0, 0)),
                    ConfigError);
}

TEST_CASE("interpolation reproduces random affine functions exactly") {
    Rng rng(2024);
    for (const auto& [k, n] : std::vector<std::pair<int, int>>{{3, 7}, {2, 5}, {4, 5}}) {
        const SimplexGrid grid(k, n);
        for (int rep = 0; rep < 20; ++rep) {
            Eigen::VectorXd a(k);
            for (int d = 0; d < k; ++d) a[d] = 2.0 * rng.next_unit() - 1.0;
            const double b = rng.next_unit();
            Eigen::VectorXd field(grid.cell_count());
            for (Eigen::Index i = 0; i < grid.cell_count(); ++i) {
                field[i] = a.dot(grid.point(i)) + b;
            }
            for (int q = 0; q < 20; ++q) {
                const Eigen::VectorXd p = sample_uniform_simplex(k, rng);
                CHECK(std::abs(interpolate(grid, field, p) - (a.dot(p) + b)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("interpolation commutes with label permutations") {
    const SimplexGrid grid(3, 12);
    const std::vector<std::vector<int>> perms = {{0, 2, 1}, {1, 0, 2}, {1, 2, 0},
                                                 {2, 0, 1}, {2, 1, 0}};
    Rng rng(555);
    Eigen::VectorXd field(grid.cell_count());
    for (Eigen::Index i = 0; i < grid.cell_count(); ++i) field[i] = rng.next_unit();

    for (const auto& sigma : perms) {
        Eigen::VectorXd permuted(grid.cell_count());
        for (Eigen::Index i = 0; i < grid.cell_count(); ++i) {
            permuted[grid.permute_cell(i, sigma)] = field[i];
        }
        for (int rep = 0; rep < 100; ++rep) {
            const Eigen::VectorXd p = sample_uniform_simplex(3, rng);
            Eigen::VectorXd sp(3);
            for (int d = 0; d < 3; ++d) sp[sigma[d]] = p[d];
            CHECK(std::abs(interpolate(grid, permuted, sp) - interpolate(grid, field, p)) <=
                  1e-12);
        }
    }
}

TEST_CASE("permute_cell: identity, vertex mapping, and the 3-cycle group property") {
    const SimplexGrid grid(3, 5);
    const std::vector<int> identity = {0, 1, 2};
    const std::vector<int> cycle = {1, 2, 0}; // location 1 -> 2 -> 3 -> 1

    Eigen::VectorXi e1(3), e2(3);
    e1 << 5, 0, 0;
    e2 << 0, 5, 0;
    CHECK(grid.permute_cell(grid.index_of(e1), cycle) == grid.index_of(e2));

    for (Eigen::Index i = 0; i < grid.cell_count(); ++i) {
        CHECK(grid.permute_cell(i, identity) == i);
        const Eigen::Index thrice =
            grid.permute_cell(grid.permute_cell(grid.permute_cell(i, cycle), cycle), cycle);
        CHECK(thrice == i);
    }

    CHECK_THROWS_AS(grid.permute_cell(0, {0, 0, 2}), ConfigError);
    CHECK_THROWS_AS(grid.permute_cell(0, {0, 1}), ConfigError);
}

TEST_CASE("nearest_cell snaps to the closest lattice point deterministically") {
    const SimplexGrid grid(3, 10);
    Eigen::VectorXi c(3);
    c << 3, 4, 3;
    CHECK(grid.nearest_cell(Eigen::Vector3d(0.3, 0.4, 0.3)) == grid.index_of(c));
    CHECK(grid.nearest_cell(Eigen::Vector3d(0.31, 0.395, 0.295)) == grid.index_of(c));
    const Eigen::Vector3d q(0.123, 0.456, 0.421);
    CHECK(grid.nearest_cell(q) == grid.nearest_cell(q));
}

TEST_SUITE_END();
