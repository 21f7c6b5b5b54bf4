#pragma once

#include <string>

#include "cdac/approx.hpp"
#include "cdac/solver.hpp"

namespace cdac {

// Versioned binary container for solved value/policy tables: header (task
// kind, grid resolution, location/action counts, cost and beta parameters),
// then the per-(cell, fixation) value and action-code records. Round-trips
// are bit-exact.
void save_solved(const SolvedPolicy& solved, const std::string& path);
SolvedPolicy load_solved(const std::string& path);

// Refuses tables whose header does not match the requesting environment
// (task kind, grid resolution, cost and beta parameters, exactly).
void check_table_matches(const SolvedPolicy& solved, const TaskModel& model,
                         const CostParams& costs, int grid_n);

// JSON snapshot of a fitted approximate representation (RBF centers/widths/
// weights, or GPR training set and hyperparameters, per fixation action).
void save_representation_json(const ApproxResult& result, const std::string& path);
ApproxResult load_representation_json(const std::string& path);

} // namespace cdac
