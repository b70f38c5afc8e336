#include "casegraph/metrics.hpp"

#include "casegraph/errors.hpp"

namespace casegraph {

double mrr(const std::vector<std::optional<int>>& first_correct_ranks) {
  if (first_correct_ranks.empty()) {
    throw DataError("mrr of an empty question list");
  }
  double total = 0.0;
  for (const auto& rank : first_correct_ranks) {
    if (!rank) continue;
    if (*rank < 1) {
      throw ConfigError("ranks are 1-based and positive");
    }
    total += 1.0 / static_cast<double>(*rank);
  }
  return total / static_cast<double>(first_correct_ranks.size());
}

double ans_at_k(const std::vector<std::optional<int>>& first_correct_ranks,
                int k) {
  if (first_correct_ranks.empty()) {
    throw DataError("ans_at_k of an empty question list");
  }
  if (k < 1) {
    throw ConfigError("ans_at_k needs k >= 1");
  }
  std::size_t hits = 0;
  for (const auto& rank : first_correct_ranks) {
    if (rank && *rank >= 1 && *rank <= k) ++hits;
  }
  return static_cast<double>(hits) /
         static_cast<double>(first_correct_ranks.size());
}

}  // namespace casegraph
