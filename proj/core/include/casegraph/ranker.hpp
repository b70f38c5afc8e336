#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "casegraph/features.hpp"

namespace casegraph {

/// Binary threshold split, or a leaf when feature is empty.
struct TreeNode {
  std::string feature;
  double threshold = 0.0;
  int left = -1;   // value < threshold
  int right = -1;  // value >= threshold
  double estimate = 0.5;

  bool is_leaf() const { return feature.empty(); }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double score(const FeatureVector& fv) const;
  std::size_t split_count() const;
};

struct RankerParams {
  std::size_t n_trees = 10;
  std::size_t max_splits = 40;
  std::uint64_t seed = 0;
  /// Candidate thresholds per (leaf, feature) are all midpoints between
  /// consecutive distinct values when few, else this many quantile-spaced
  /// midpoints.
  std::size_t max_thresholds = 32;
  std::size_t parallelism = 1;
};

/// Ensemble of rank-optimizing trees; per-tree leaf probabilities are
/// averaged. Laplace smoothing keeps every estimate inside (0,1).
struct RankingModel {
  std::vector<DecisionTree> trees;
  RankerParams params;
  std::vector<std::string> feature_names;
  std::map<std::string, std::string> metadata;

  /// Mean of per-tree leaf estimates; throws DataError naming any feature
  /// the model splits on that fv lacks.
  double score(const FeatureVector& fv) const;
};

/// Trains n_trees trees, each on a question-level bootstrap bag (whole
/// candidate sets sampled with replacement). Growth is greedy: every step
/// takes the split maximizing the bag's training MRR of the leaf-score
/// ranking, stopping at max_splits or when no split strictly improves it.
/// Deterministic for a fixed seed at any parallelism.
RankingModel train_ranker(const std::vector<RankItem>& items,
                          const RankerParams& params);

struct RankedCandidate {
  std::size_t item_index;  // into the input list
  double score = 0.0;
};

/// Candidates of one question ordered by descending score, ties by
/// ascending candidate_id.
std::vector<RankedCandidate> rank(const RankingModel& model,
                                  const std::vector<RankItem>& candidates);

/// Fraction of split conditions per feature name over all trees; empty for
/// a split-free model, sums to 1 otherwise.
std::map<std::string, double> feature_usage(const RankingModel& model);

std::string serialize_model(const RankingModel& model);
RankingModel parse_model(std::string_view text);
void save_model(const RankingModel& model, const std::string& path);
RankingModel load_model(const std::string& path);

}  // namespace casegraph
