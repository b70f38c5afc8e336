#pragma once

// Internal mask-level hill climbing shared between the public maintenance
// API and the evaluation protocols, which reuse one similarity matrix for
// optimization and subsequent scoring.

#include <vector>

#include "casegraph/case_base.hpp"
#include "casegraph/maintenance.hpp"
#include "sim_matrix.hpp"

namespace casegraph::detail {

struct MaskedHillClimb {
  std::vector<char> alive;
  OptimizationLog log;
};

// Runs the greedy deletion loop over the cases enabled in initial_alive.
// matrix rows/columns index `cases` directly.
MaskedHillClimb hill_climb_masked(const std::vector<Case>& cases,
                                  const SimMatrix& matrix,
                                  std::vector<char> initial_alive,
                                  ObjectiveKind kind);

}  // namespace casegraph::detail
