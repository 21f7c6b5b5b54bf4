#include "cdac/policy_map.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

#include "cdac/errors.hpp"

namespace cdac {

namespace {

void check_fixation(const SolvedPolicy& solved, int fixation) {
    if (fixation < 0 || fixation >= solved.model.num_actions) {
        throw ConfigError("fixation out of range for this policy");
    }
}

} // namespace

void export_policy_map_csv(const SolvedPolicy& solved, int fixation, const std::string& path) {
    check_fixation(solved, fixation);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + path);

    const int k = solved.model.k;
    for (int i = 0; i < k; ++i) {
        out << 'p' << (i + 1) << ',';
    }
    out << "action_code\n";

    const auto& grid = *solved.grid;
    char buf[64];
    for (Eigen::Index cell = 0; cell < grid.cell_count(); ++cell) {
        for (int i = 0; i < k; ++i) {
            std::snprintf(buf, sizeof(buf), "%.10g",
                          grid.coords()(cell, i) / static_cast<double>(grid.resolution()));
            out << buf << ',';
        }
        out << solved.policy.code(cell, fixation) << '\n';
    }
    if (!out) throw ConfigError("write failed: " + path);
}

void export_policy_map_pgm(const SolvedPolicy& solved, int fixation, const std::string& path) {
    check_fixation(solved, fixation);
    if (solved.model.k != 3) {
        throw ConfigError("PGM raster export needs a 3-location policy");
    }
    const auto& grid = *solved.grid;
    const int n = grid.resolution();
    const int side = n + 1;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << "P5\n" << side << ' ' << side << "\n255\n";

    std::vector<unsigned char> row(side);
    Eigen::VectorXi coord(3);
    for (int r = 0; r < side; ++r) {
        const int a2 = n - r; // p2 grows upward
        for (int c = 0; c < side; ++c) {
            if (c + a2 > n) {
                row[c] = 255;
                continue;
            }
            coord << c, a2, n - c - a2;
            const auto code = solved.policy.code(grid.index_of(coord), fixation);
            row[c] = code < solved.model.k
                         ? static_cast<unsigned char>(25 * code)
                         : static_cast<unsigned char>(120 + 15 * (code - solved.model.k));
        }
        out.write(reinterpret_cast<const char*>(row.data()), side);
    }
    if (!out) throw ConfigError("write failed: " + path);
}

double policy_agreement(const PolicyTable& a, const PolicyTable& b, int fixation) {
    if (a.code.rows() != b.code.rows()) {
        throw ConfigError("policy tables cover different grids");
    }
    if (fixation >= a.code.cols() || fixation >= b.code.cols()) {
        throw ConfigError("fixation out of range for these tables");
    }
    Eigen::Index same = 0;
    for (Eigen::Index cell = 0; cell < a.code.rows(); ++cell) {
        if (a.code(cell, fixation) == b.code(cell, fixation)) ++same;
    }
    return static_cast<double>(same) / static_cast<double>(a.code.rows());
}

} // namespace cdac
