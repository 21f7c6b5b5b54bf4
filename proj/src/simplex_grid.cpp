#include "cdac/simplex_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cdac/errors.hpp"

namespace cdac {

namespace {

// Queries this close to a lattice hyperplane snap onto it, so beliefs that
// are lattice points up to double rounding resolve to a single cell.
constexpr double kSnapEps = 1e-12;

} // namespace

void validate_belief(const Eigen::Ref<const Eigen::VectorXd>& p, double tol) {
    if (p.size() < 2) {
        throw ConfigError("belief needs at least 2 components");
    }
    if ((p.array() < -tol).any()) {
        throw ConfigError("belief has a negative component below -" + std::to_string(tol));
    }
    const double sum = p.sum();
    if (std::abs(sum - 1.0) > tol) {
        throw ConfigError("belief does not sum to 1 (sum = " + std::to_string(sum) + ")");
    }
}

SimplexGrid::SimplexGrid(int k, int n) : k_(k), n_(n) {
    if (k < 2) {
        throw ConfigError("simplex grid needs k >= 2 locations");
    }
    if (n < 1) {
        throw ConfigError("simplex grid needs resolution n >= 1");
    }

    const int rows = n + k; // need C(i, j) for i <= n + k - 1
    binom_.assign(rows, std::vector<std::uint64_t>(k, 0));
    for (int i = 0; i < rows; ++i) {
        binom_[i][0] = 1;
        for (int j = 1; j < k && j <= i; ++j) {
            const std::uint64_t a = binom_[i - 1][j - 1];
            const std::uint64_t b = (j <= i - 1) ? binom_[i - 1][j] : 0;
            if (a > UINT64_MAX - b) {
                throw ConfigError("simplex grid too large: cell count overflows");
            }
            binom_[i][j] = a + b;
        }
    }

    const std::uint64_t count = compositions(n, k);
    if (count > (std::uint64_t(1) << 40)) {
        throw ConfigError("simplex grid too large to enumerate");
    }
    coords_.resize(static_cast<Eigen::Index>(count), k);

    // Ascending lexicographic enumeration: successor increments the
    // rightmost position whose suffix still carries mass.
    Eigen::VectorXi a = Eigen::VectorXi::Zero(k);
    a[k - 1] = n;
    Eigen::Index row = 0;
    while (true) {
        coords_.row(row++) = a.transpose();
        int i = k - 2;
        int suffix = a[k - 1];
        while (i >= 0 && suffix == 0) {
            suffix += a[i];
            --i;
        }
        if (i < 0) break;
        a[i] += 1;
        for (int t = i + 1; t < k; ++t) {
            a[t] = 0;
        }
        a[k - 1] = suffix - 1;
    }

    if (row != coords_.rows()) {
        throw NumericalError("simplex enumeration mismatch vs combinatorial count");
    }
}

std::uint64_t SimplexGrid::compositions(int sum, int parts) const {
    // Number of ways to write `sum` as `parts` nonnegative integers.
    if (parts == 0) return sum == 0 ? 1 : 0;
    return binom_[sum + parts - 1][parts - 1];
}

Eigen::VectorXd SimplexGrid::point(Eigen::Index cell) const {
    return coords_.row(cell).cast<double>().transpose() / static_cast<double>(n_);
}

Eigen::Index SimplexGrid::index_of(const Eigen::Ref<const Eigen::VectorXi>& coord) const {
    if (coord.size() != k_) {
        throw ConfigError("lattice coordinate has wrong dimension");
    }
    if ((coord.array() < 0).any() || coord.sum() != n_) {
        throw ConfigError("not a lattice point of this grid");
    }
    std::uint64_t rank = 0;
    int rem = n_;
    for (int j = 0; j + 1 < k_; ++j) {
        for (int t = 0; t < coord[j]; ++t) {
            rank += compositions(rem - t, k_ - j - 1);
        }
        rem -= coord[j];
    }
    return static_cast<Eigen::Index>(rank);
}

Eigen::Index SimplexGrid::permute_cell(Eigen::Index cell, const std::vector<int>& sigma) const {
    if (static_cast<int>(sigma.size()) != k_) {
        throw ConfigError("permutation has wrong size");
    }
    std::vector<bool> seen(k_, false);
    for (int v : sigma) {
        if (v < 0 || v >= k_ || seen[v]) {
            throw ConfigError("not a permutation of {0..k-1}");
        }
        seen[v] = true;
    }
    Eigen::VectorXi out(k_);
    for (int i = 0; i < k_; ++i) {
        out[sigma[i]] = coords_(cell, i);
    }
    return index_of(out);
}

Eigen::Index SimplexGrid::nearest_cell(const Eigen::Ref<const Eigen::VectorXd>& p) const {
    validate_belief(p);
    Eigen::VectorXd q = p.cwiseMax(0.0);
    q /= q.sum();
    Eigen::VectorXd x = q * static_cast<double>(n_);

    Eigen::VectorXi base(k_);
    std::vector<std::pair<double, int>> frac(k_);
    for (int i = 0; i < k_; ++i) {
        base[i] = std::min(static_cast<int>(std::floor(x[i])), n_);
        frac[i] = {x[i] - base[i], i};
    }
    const int deficit = n_ - base.sum();
    // Largest-remainder rounding: hand out the remaining units to the
    // largest fractional parts (index-ascending on ties).
    std::stable_sort(frac.begin(), frac.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int d = 0; d < deficit; ++d) {
        base[frac[d].second] += 1;
    }
    return index_of(base);
}

BarycentricWeights locate(const SimplexGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& p) {
    const int k = grid.locations();
    const int n = grid.resolution();
    if (p.size() != k) {
        throw ConfigError("query point has wrong dimension");
    }
    validate_belief(p);

    Eigen::VectorXd q = p.cwiseMax(0.0);
    q /= q.sum();
    Eigen::VectorXd x = q * static_cast<double>(n);

    Eigen::VectorXi base(k);
    Eigen::VectorXd r(k);
    for (int i = 0; i < k; ++i) {
        double b = std::floor(x[i]);
        double f = x[i] - b;
        if (f < kSnapEps * n) {
            f = 0.0;
        } else if (f > 1.0 - kSnapEps * n) {
            b += 1.0;
            f = 0.0;
        }
        base[i] = static_cast<int>(b);
        r[i] = f;
    }
    const int m = n - base.sum(); // number of +1 steps to reach the enclosing simplex

    std::vector<Eigen::Index> idx;
    std::vector<double> w;
    idx.reserve(k);
    w.reserve(k);

    auto push = [&](const Eigen::VectorXi& coord, double weight) {
        if (weight <= 0.0) return;
        idx.push_back(grid.index_of(coord));
        w.push_back(weight);
    };

    if (m == 0) {
        push(base, 1.0);
    } else if (m == 1) {
        // "Up" simplex: vertices base + e_i with weights r_i.
        Eigen::VectorXi c = base;
        for (int i = 0; i < k; ++i) {
            c[i] += 1;
            push(c, r[i]);
            c[i] -= 1;
        }
    } else if (m == k - 1) {
        // "Down" simplex: vertices base + 1 - e_i with weights 1 - r_i.
        Eigen::VectorXi ones = Eigen::VectorXi::Ones(k);
        for (int i = 0; i < k; ++i) {
            Eigen::VectorXi c = base + ones;
            c[i] -= 1;
            push(c, 1.0 - r[i]);
        }
    } else {
        // General case (k >= 4 interior slabs): Freudenthal walk on the
        // cumulative coordinates d_j = sum_{i>=j} x_i.
        Eigen::VectorXd d(k);
        d[0] = static_cast<double>(n);
        for (int j = k - 1; j >= 1; --j) {
            d[j] = x[j] + (j + 1 < k ? d[j + 1] : 0.0);
        }
        Eigen::VectorXi v(k);
        Eigen::VectorXd f(k);
        v[0] = n;
        f[0] = 0.0;
        for (int j = 1; j < k; ++j) {
            double b = std::floor(d[j]);
            double fr = d[j] - b;
            if (fr < kSnapEps * n) {
                fr = 0.0;
            } else if (fr > 1.0 - kSnapEps * n) {
                b += 1.0;
                fr = 0.0;
            }
            v[j] = static_cast<int>(b);
            f[j] = fr;
        }
        std::vector<int> order;
        for (int j = 1; j < k; ++j) order.push_back(j);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return f[a] > f[b]; });

        auto to_coord = [&](const Eigen::VectorXi& u) {
            Eigen::VectorXi c(k);
            for (int j = 0; j < k; ++j) {
                c[j] = u[j] - (j + 1 < k ? u[j + 1] : 0);
            }
            return c;
        };

        Eigen::VectorXi u = v;
        push(to_coord(u), 1.0 - f[order[0]]);
        for (std::size_t l = 0; l < order.size(); ++l) {
            u[order[l]] += 1;
            const double weight =
                (l + 1 < order.size()) ? f[order[l]] - f[order[l + 1]] : f[order[l]];
            push(to_coord(u), weight);
        }
    }

    BarycentricWeights out;
    out.indices = Eigen::Map<IndexVector>(idx.data(), static_cast<Eigen::Index>(idx.size()));
    out.weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    return out;
}

double interpolate(const SimplexGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& values,
                   const Eigen::Ref<const Eigen::VectorXd>& p) {
    if (values.size() != grid.cell_count()) {
        throw ConfigError("value field size does not match grid cell count");
    }
    const BarycentricWeights bw = locate(grid, p);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < bw.indices.size(); ++i) {
        acc += bw.weights[i] * values[bw.indices[i]];
    }
    return acc;
}

} // namespace cdac
