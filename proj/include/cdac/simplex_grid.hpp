#pragma once

#include <Eigen/Core>
#include <vector>

namespace cdac {

using IndexVector = Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1>;

// Validates a probability vector: entries in [0,1] up to `tol`, sum within
// `tol` of 1, at least two components. Throws ConfigError otherwise.
void validate_belief(const Eigen::Ref<const Eigen::VectorXd>& p, double tol = 1e-9);

// Regular subdivision of the (k-1)-simplex: all lattice points
// (a_1/n, ..., a_k/n) with integer a_i >= 0 summing to n, enumerated in
// ascending lexicographic order of (a_1, ..., a_k). Immutable once built.
class SimplexGrid {
public:
    SimplexGrid(int k, int n);

    int locations() const { return k_; }
    int resolution() const { return n_; }
    Eigen::Index cell_count() const { return coords_.rows(); }

    // Integer lattice coordinates, one row per cell.
    const Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& coords() const {
        return coords_;
    }

    // Belief-space position of a cell (coordinates / n).
    Eigen::VectorXd point(Eigen::Index cell) const;

    // Rank of a lattice point in the enumeration; inverse of coords().row(i).
    Eigen::Index index_of(const Eigen::Ref<const Eigen::VectorXi>& coord) const;

    // Index of the lattice point whose coordinates are sigma-permuted:
    // result[sigma[i]] = coord[i]. sigma must be a permutation of {0..k-1}.
    Eigen::Index permute_cell(Eigen::Index cell, const std::vector<int>& sigma) const;

    // Nearest lattice point to p (largest-remainder rounding of n*p,
    // deterministic index-ascending tie-break).
    Eigen::Index nearest_cell(const Eigen::Ref<const Eigen::VectorXd>& p) const;

private:
    int k_;
    int n_;
    Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> coords_;
    // binom_[i][j] = C(i, j) for j < k, i <= n + k - 1.
    std::vector<std::vector<std::uint64_t>> binom_;

    std::uint64_t compositions(int sum, int parts) const;
};

// Enclosing sub-simplex of a query point and its convex coefficients.
// Zero-weight vertices are dropped, so a lattice query yields one index.
struct BarycentricWeights {
    IndexVector indices;
    Eigen::VectorXd weights;
};

// Locates p in the canonical triangulation of the grid. Queries off the
// simplex by <= 1e-9 are renormalized; larger violations throw.
BarycentricWeights locate(const SimplexGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& p);

// Barycentric interpolation of a per-cell scalar field at p. Exact on
// lattice points and for affine functions of p.
double interpolate(const SimplexGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& values,
                   const Eigen::Ref<const Eigen::VectorXd>& p);

} // namespace cdac
