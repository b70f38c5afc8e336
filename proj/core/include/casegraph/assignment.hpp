#pragma once

#include <cstddef>
#include <vector>

namespace casegraph {

/// Exact minimum-cost assignment of every row to a distinct column
/// (shortest augmenting path form of the Hungarian method, O(n^2 m)).
/// cost is row-major with n_rows * n_cols entries and n_rows <= n_cols.
/// Returns the assigned column per row. Deterministic: ties resolve to the
/// lowest column index.
std::vector<int> min_cost_assignment(const std::vector<double>& cost,
                                     std::size_t n_rows, std::size_t n_cols);

/// Maximum-total-weight counterpart; weight layout as above.
std::vector<int> max_weight_assignment(const std::vector<double>& weight,
                                       std::size_t n_rows, std::size_t n_cols);

}  // namespace casegraph
