#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "casegraph/case_base.hpp"

namespace casegraph {

/// What hill climbing optimizes, and with it which lesson class may be
/// deleted: kCorrectOnly removes false-lesson cases that disturb the
/// classification of correct ones, kOverall removes true-lesson cases that
/// disturb the balanced rate.
enum class ObjectiveKind { kCorrectOnly, kOverall };

struct LooRates {
  double overall = 0.0;
  double correct_rate = 0.0;
  double incorrect_rate = 0.0;

  double objective(ObjectiveKind kind) const {
    return kind == ObjectiveKind::kCorrectOnly ? correct_rate : overall;
  }
};

/// Leave-one-case-out classification over the whole base: every case is
/// classified with itself excluded. correct_rate is the accuracy on
/// true-lesson queries, incorrect_rate on false-lesson queries, overall
/// their mean; objective(kind) selects the optimization target. A lesson
/// class with no queries scores 1.0 vacuously; a query whose effective base
/// is empty counts as misclassified.
LooRates loo_objective(const CaseBase& cb, const SimilarityConfig& cfg,
                       Measure measure = Measure::kIntegrated,
                       std::size_t parallelism = 1);

struct OptimizationStep {
  std::string deleted_case_id;
  double objective_before = 0.0;
  double objective_after = 0.0;
};

struct OptimizationLog {
  ObjectiveKind kind = ObjectiveKind::kOverall;
  std::vector<OptimizationStep> steps;
  std::size_t passes = 0;
  double initial_objective = 0.0;
  double final_objective = 0.0;
};

struct HillClimbResult {
  CaseBase optimized;
  OptimizationLog log;
};

/// Greedy case deletion: repeated ascending-case_id passes over the
/// deletable lesson class; a deletion is kept iff the leave-one-out
/// objective strictly increases and the case's question keeps at least one
/// case. Stops after a pass with no deletion. The question_id coverage of
/// the base is unchanged. Internally incremental, but every logged
/// objective equals a fresh loo_objective of the corresponding base.
HillClimbResult hill_climb(const CaseBase& cb, ObjectiveKind kind,
                           const SimilarityConfig& cfg,
                           Measure measure = Measure::kIntegrated,
                           std::size_t parallelism = 1);

}  // namespace casegraph
