#include "casegraph/assignment.hpp"

#include <cassert>
#include <limits>

namespace casegraph {

std::vector<int> min_cost_assignment(const std::vector<double>& cost,
                                     std::size_t n_rows, std::size_t n_cols) {
  assert(n_rows <= n_cols);
  assert(cost.size() == n_rows * n_cols);
  const int n = static_cast<int>(n_rows);
  const int m = static_cast<int>(n_cols);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // 1-indexed potentials; p[j] is the row matched to column j (0 = free).
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    minv.assign(m + 1, kInf);
    used.assign(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = -1;
      const double* row = cost.data() + static_cast<std::size_t>(i0 - 1) * m;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = row[j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n_rows, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) {
      row_to_col[p[j] - 1] = j - 1;
    }
  }
  return row_to_col;
}

std::vector<int> max_weight_assignment(const std::vector<double>& weight,
                                       std::size_t n_rows, std::size_t n_cols) {
  std::vector<double> cost(weight.size());
  for (std::size_t i = 0; i < weight.size(); ++i) {
    cost[i] = -weight[i];
  }
  return min_cost_assignment(cost, n_rows, n_cols);
}

}  // namespace casegraph
