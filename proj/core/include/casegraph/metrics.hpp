#pragma once

#include <optional>
#include <vector>

namespace casegraph {

/// Mean reciprocal rank over questions. An absent entry means no correct
/// answer was retrieved and contributes 0. Throws DataError on an empty
/// list, ConfigError on a non-positive stored rank.
double mrr(const std::vector<std::optional<int>>& first_correct_ranks);

/// Fraction of questions whose first correct rank is at most k (k >= 1).
double ans_at_k(const std::vector<std::optional<int>>& first_correct_ranks,
                int k);

}  // namespace casegraph
