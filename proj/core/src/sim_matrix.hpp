#pragma once

// Internal pairwise case-similarity matrix. Built once per base snapshot,
// then every retrieval-style scan is a lookup walk. Shared by the
// maintenance and evaluation code paths.

#include <cstddef>
#include <vector>

#include "casegraph/case_base.hpp"
#include "casegraph/parallel.hpp"

namespace casegraph::detail {

class SimMatrix {
 public:
  // cases must outlive the matrix. Entry (i, j) is the similarity of case
  // i's characterization as a query against case j. The diagonal is exactly
  // 1.0. case_sim is symmetric except for the edit measure with asymmetric
  // insert/delete costs, where both triangles are computed.
  SimMatrix(const std::vector<Case>& cases, const SimilarityConfig& cfg,
            Measure measure, std::size_t parallelism)
      : n_(cases.size()), sims_(n_ * n_, 1.0) {
    const bool symmetric =
        measure != Measure::kEdit ||
        (cfg.edit.node_insert == cfg.edit.node_delete &&
         cfg.edit.edge_insert == cfg.edit.edge_delete);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(symmetric ? n_ * (n_ - 1) / 2 : n_ * (n_ - 1));
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = symmetric ? i + 1 : 0; j < n_; ++j) {
        if (i != j) pairs.emplace_back(i, j);
      }
    }
    parallel_for(pairs.size(), parallelism, [&](std::size_t k) {
      const auto [i, j] = pairs[k];
      const double s =
          case_sim(cases[i].question, cases[i].answer, cases[j], cfg, measure);
      sims_[i * n_ + j] = s;
      if (symmetric) sims_[j * n_ + i] = s;
    });
  }

  std::size_t size() const { return n_; }
  double at(std::size_t i, std::size_t j) const { return sims_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> sims_;
};

}  // namespace casegraph::detail
