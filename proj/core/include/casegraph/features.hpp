#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "casegraph/case_base.hpp"

namespace casegraph {

/// Named numeric features for one answer candidate: the CBR-derived f1..f7
/// plus any opaque passthrough values (deep "D*", shallow "S*", retrieval
/// score "I") read from input.
struct FeatureVector {
  std::map<std::string, double> values;
  /// Set when extraction ran against an empty effective base and every CBR
  /// feature degenerated to 0.
  bool degenerate = false;

  double at(const std::string& name) const;
  bool has(const std::string& name) const { return values.count(name) > 0; }
};

/// The CBR feature names in fixed order:
///   f1 best-match similarity
///   f2 best-match lesson (0/1)
///   f3 signed similarity f1 * (2*f2 - 1)
///   f4 max similarity among true-lesson cases
///   f5 max similarity among false-lesson cases
///   f6 similarity-weighted vote over the top k
///   f7 question-only best similarity (blend forced to 1)
inline constexpr std::array<const char*, 7> kCbrFeatureNames = {
    "f1", "f2", "f3", "f4", "f5", "f6", "f7"};

/// Computes f1..f7 from one pass over the effective base under the given
/// retrieval mode. With an empty effective base all features are 0 and the
/// result is flagged degenerate.
FeatureVector extract_features(const AttributedGraph& query_q,
                               const AttributedGraph& query_a,
                               const CaseBase& cb, const RetrievalMode& mode,
                               std::size_t k, const SimilarityConfig& cfg,
                               Measure measure = Measure::kIntegrated,
                               std::size_t parallelism = 1);

/// One ranked candidate of one question.
struct RankItem {
  std::string question_id;
  std::string candidate_id;
  FeatureVector features;
  bool gold_label = false;
};

/// Line-delimited dataset IO:
/// {"question_id","candidate_id","gold_label","features":{name:value}}.
std::vector<RankItem> load_rank_items(const std::string& path);
void save_rank_items(const std::vector<RankItem>& items,
                     const std::string& path);

/// Keeps only features selected by set letters: 'C' keeps f1..f7, any other
/// letter keeps features whose name starts with it (D, S, I per the dataset
/// convention). Unknown letters throw ConfigError.
std::vector<RankItem> select_features(const std::vector<RankItem>& items,
                                      const std::string& feature_sets);

}  // namespace casegraph
