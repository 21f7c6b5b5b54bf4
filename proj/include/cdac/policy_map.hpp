#pragma once

#include <string>

#include "cdac/solver.hpp"

namespace cdac {

// CSV slice of a policy at one fixation: header "p1,...,pk,action_code" and
// one row per grid cell. Codes follow encode_action: 0..k-1 stop-and-declare
// that location, k.. fixate action (code - k). Re-exports of an unchanged
// policy are byte-identical.
void export_policy_map_csv(const SolvedPolicy& solved, int fixation, const std::string& path);

// Binary PGM (P5) raster of the (p1, p2) projection, (n+1) x (n+1) pixels.
// Pixel (row r, col c) maps to the cell with coordinates
// (a1, a2, a3) = (c, n - r, n - c - (n - r)); off-simplex pixels are white
// (255). Gray levels: stop codes at 25 * code, fixation codes at
// 120 + 15 * (code - k).
void export_policy_map_pgm(const SolvedPolicy& solved, int fixation, const std::string& path);

// Fraction of cells where two policies pick the same action at a fixation.
double policy_agreement(const PolicyTable& a, const PolicyTable& b, int fixation);

} // namespace cdac
