#include "casegraph/maintenance.hpp"

#include <map>

#include "casegraph/errors.hpp"
#include "casegraph/parallel.hpp"
#include "loo_impl.hpp"
#include "sim_matrix.hpp"

namespace casegraph {

namespace {

using detail::SimMatrix;

struct Counts {
  long long n_true = 0, n_false = 0;
  long long correct_true = 0, correct_false = 0;
};

LooRates rates_from_counts(const Counts& c) {
  LooRates r;
  r.correct_rate = c.n_true == 0 ? 1.0
                                 : static_cast<double>(c.correct_true) /
                                       static_cast<double>(c.n_true);
  r.incorrect_rate = c.n_false == 0 ? 1.0
                                    : static_cast<double>(c.correct_false) /
                                          static_cast<double>(c.n_false);
  r.overall = (r.correct_rate + r.incorrect_rate) / 2.0;
  return r;
}

// Incremental leave-one-out evaluator over a fixed base snapshot. The only
// state a deletion invalidates is the nearest neighbor of queries that
// pointed at the deleted case, so tentative evaluations rescan just those.
// Rates are integer-count ratios, so they equal a naive recomputation bit
// for bit.
class LooEvaluator {
 public:
  LooEvaluator(const std::vector<Case>& cases, const SimMatrix& matrix,
               std::vector<char> alive)
      : cases_(cases),
        matrix_(matrix),
        alive_(std::move(alive)),
        best_(cases.size(), -1) {
    for (std::size_t i = 0; i < cases_.size(); ++i) {
      if (!alive_[i]) continue;
      best_[i] = scan_best(i, -1);
      add_query(counts_, i, best_[i], +1);
    }
  }

  LooRates rates() const { return rates_from_counts(counts_); }

  LooRates rates_if_deleted(std::size_t c) const {
    Counts k = counts_;
    add_query(k, c, best_[c], -1);
    for (std::size_t i = 0; i < cases_.size(); ++i) {
      if (!alive_[i] || i == c) continue;
      if (best_[i] == static_cast<int>(c)) {
        add_query(k, i, best_[i], -1);
        add_query(k, i, scan_best(i, static_cast<int>(c)), +1);
      }
    }
    return rates_from_counts(k);
  }

  void commit_delete(std::size_t c) {
    add_query(counts_, c, best_[c], -1);
    for (std::size_t i = 0; i < cases_.size(); ++i) {
      if (!alive_[i] || i == c) continue;
      if (best_[i] == static_cast<int>(c)) {
        add_query(counts_, i, best_[i], -1);
        best_[i] = scan_best(i, static_cast<int>(c));
        add_query(counts_, i, best_[i], +1);
      }
    }
    alive_[c] = 0;
  }

 private:
  // Nearest alive neighbor of query i, skipping `skip`; ties go to the
  // smallest index, which is the smallest case_id in a sorted base.
  int scan_best(std::size_t i, int skip) const {
    int best = -1;
    double best_sim = -1.0;
    for (std::size_t j = 0; j < cases_.size(); ++j) {
      if (j == i || static_cast<int>(j) == skip || !alive_[j]) continue;
      const double s = matrix_.at(i, j);
      if (s > best_sim) {
        best_sim = s;
        best = static_cast<int>(j);
      }
    }
    return best;
  }

  void add_query(Counts& k, std::size_t i, int best, int delta) const {
    const bool ok =
        best >= 0 &&
        cases_[static_cast<std::size_t>(best)].lesson == cases_[i].lesson;
    if (cases_[i].lesson) {
      k.n_true += delta;
      if (ok) k.correct_true += delta;
    } else {
      k.n_false += delta;
      if (ok) k.correct_false += delta;
    }
  }

  const std::vector<Case>& cases_;
  const SimMatrix& matrix_;
  std::vector<char> alive_;
  std::vector<int> best_;
  Counts counts_;
};

}  // namespace

namespace detail {

MaskedHillClimb hill_climb_masked(const std::vector<Case>& cases,
                                  const SimMatrix& matrix,
                                  std::vector<char> initial_alive,
                                  ObjectiveKind kind) {
  const std::size_t n = cases.size();
  const bool deletable_lesson = kind == ObjectiveKind::kOverall;

  LooEvaluator eval(cases, matrix, initial_alive);
  std::map<std::string, std::size_t> question_alive;
  for (std::size_t i = 0; i < n; ++i) {
    if (initial_alive[i]) question_alive[cases[i].question_id] += 1;
  }
  std::vector<char> alive = std::move(initial_alive);

  MaskedHillClimb result;
  result.log.kind = kind;
  double objective = eval.rates().objective(kind);
  result.log.initial_objective = objective;

  bool deleted_in_pass = true;
  while (deleted_in_pass) {
    deleted_in_pass = false;
    result.log.passes += 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      if (cases[i].lesson != deletable_lesson) continue;
      if (question_alive[cases[i].question_id] <= 1) continue;  // coverage
      const double candidate = eval.rates_if_deleted(i).objective(kind);
      if (candidate > objective) {
        result.log.steps.push_back({cases[i].case_id, objective, candidate});
        eval.commit_delete(i);
        alive[i] = 0;
        question_alive[cases[i].question_id] -= 1;
        objective = candidate;
        deleted_in_pass = true;
      }
    }
  }
  result.log.final_objective = objective;
  result.alive = std::move(alive);
  return result;
}

}  // namespace detail

LooRates loo_objective(const CaseBase& cb, const SimilarityConfig& cfg,
                       Measure measure, std::size_t parallelism) {
  if (cb.empty()) {
    throw DataError("leave-one-out objective needs a nonempty case base");
  }
  const auto& cases = cb.cases();
  const std::size_t n = cases.size();
  // Direct per-query scans; the reference implementation the incremental
  // evaluator is held to.
  std::vector<int> best(n, -1);
  parallel_for(n, parallelism, [&](std::size_t i) {
    double best_sim = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double s =
          case_sim(cases[i].question, cases[i].answer, cases[j], cfg, measure);
      if (s > best_sim) {
        best_sim = s;
        best[i] = static_cast<int>(j);
      }
    }
  });
  Counts counts;
  for (std::size_t i = 0; i < n; ++i) {
    const bool ok =
        best[i] >= 0 &&
        cases[static_cast<std::size_t>(best[i])].lesson == cases[i].lesson;
    if (cases[i].lesson) {
      counts.n_true += 1;
      if (ok) counts.correct_true += 1;
    } else {
      counts.n_false += 1;
      if (ok) counts.correct_false += 1;
    }
  }
  return rates_from_counts(counts);
}

HillClimbResult hill_climb(const CaseBase& cb, ObjectiveKind kind,
                           const SimilarityConfig& cfg, Measure measure,
                           std::size_t parallelism) {
  if (cb.empty()) {
    throw DataError("hill climbing needs a nonempty case base");
  }
  const auto& cases = cb.cases();
  const detail::SimMatrix matrix(cases, cfg, measure, parallelism);
  detail::MaskedHillClimb masked = detail::hill_climb_masked(
      cases, matrix, std::vector<char>(cases.size(), 1), kind);

  std::vector<Case> surviving;
  surviving.reserve(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (masked.alive[i]) surviving.push_back(cases[i]);
  }
  return {CaseBase::from_cases(std::move(surviving)), std::move(masked.log)};
}

}  // namespace casegraph
