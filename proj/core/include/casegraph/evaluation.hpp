#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "casegraph/case_base.hpp"
#include "casegraph/maintenance.hpp"
#include "casegraph/metrics.hpp"
#include "casegraph/ranker.hpp"

namespace casegraph {

struct QuestionOutcome {
  std::string question_id;
  std::size_t queries = 0;
  std::size_t correct = 0;
};

/// Result of one classification protocol run. overall is the macro average
/// of the two per-lesson-class accuracies.
struct ClassificationReport {
  std::string protocol;
  double overall = 0.0;
  double correct_rate = 0.0;
  double incorrect_rate = 0.0;
  std::size_t n_queries = 0;
  std::size_t n_true_queries = 0;
  std::size_t n_false_queries = 0;
  std::size_t base_size = 0;
  std::size_t deleted_cases = 0;  // hill-climbing protocols only
  std::vector<QuestionOutcome> per_question;
  std::string config_fingerprint;
  std::uint64_t seed = 0;
};

/// The eight retrieval protocols:
///   1 stored characterizations against the full base
///   2 each case with itself excluded (known question, new candidate)
///   3 each case with its whole question excluded
///   4 hill climbing on correct-rate first, then protocol-3 evaluation
///   5 hill climbing on the overall rate first, then protocol-3 evaluation
///   6 3-fold cross test split by question
///   7 protocol 6 with per-fold hill climbing on correct-rate
///   8 protocol 6 with per-fold hill climbing on the overall rate
ClassificationReport run_protocol(int protocol, const CaseBase& cb,
                                  const SimilarityConfig& cfg,
                                  std::uint64_t seed,
                                  Measure measure = Measure::kIntegrated,
                                  std::size_t parallelism = 1);

struct GrowthStep {
  std::size_t case_count = 0;       // raw cases accumulated at this step
  std::size_t optimized_count = 0;  // after hill climbing
  ClassificationReport report;
};

struct GrowthCurve {
  std::vector<GrowthStep> steps;
  std::uint64_t seed = 0;
};

/// Adds the corpus question by question in seeded random order; once the
/// accumulated size reaches each step target, runs hill climbing and a
/// protocol-3 style evaluation of the optimized base.
GrowthCurve growth_simulation(const CaseBase& corpus, std::size_t start_count,
                              std::size_t step_count, ObjectiveKind objective,
                              const SimilarityConfig& cfg, std::uint64_t seed,
                              Measure measure = Measure::kIntegrated,
                              std::size_t parallelism = 1);

struct QuestionRank {
  std::string question_id;
  std::optional<int> first_correct_rank;
};

struct RankReport {
  double mrr_value = 0.0;
  std::array<double, 5> ans_at{};  // ANS@1..ANS@5
  std::size_t n_questions = 0;
  std::vector<QuestionRank> per_question;
  std::string config_fingerprint;
  std::uint64_t seed = 0;
};

/// Question-level n-fold cross validation of the ranker: folds partition
/// question_ids, each fold's questions are ranked by a model trained on the
/// rest, and MRR/ANS@1..5 aggregate over all questions.
RankReport cross_validate_ranker(const std::vector<RankItem>& items,
                                 std::size_t n_folds,
                                 const RankerParams& params,
                                 std::uint64_t seed);

/// Ranking by one raw feature value, no learning; the comparison baseline.
RankReport rank_by_feature(const std::vector<RankItem>& items,
                           const std::string& feature);

/// Machine-readable single-line JSON records.
std::string to_json_line(const ClassificationReport& report);
std::string to_json_line(const RankReport& report);
std::string to_json_line(const GrowthCurve& curve);

/// Human-readable tables; the rank table uses the
/// "Model MRR ANS-1 .. ANS-5" column layout.
std::string format_table(const ClassificationReport& report);
std::string format_table(const RankReport& report, const std::string& label);
std::string format_table(const GrowthCurve& curve);

}  // namespace casegraph
