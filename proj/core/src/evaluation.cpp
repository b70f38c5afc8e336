#include "casegraph/evaluation.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "casegraph/errors.hpp"
#include "casegraph/rng.hpp"
#include "json_util.hpp"
#include "loo_impl.hpp"
#include "sim_matrix.hpp"

namespace casegraph {

namespace {

using detail::SimMatrix;

enum class ExclusionRule { kNone, kSelf, kQuestion };

struct QueryResult {
  std::size_t query = 0;
  bool correct = false;
};

// Classifies each query case against the alive candidates under the rule;
// a query with no eligible candidate counts as misclassified.
std::vector<QueryResult> classify_queries(const std::vector<Case>& cases,
                                          const SimMatrix& matrix,
                                          const std::vector<std::size_t>& queries,
                                          const std::vector<char>& candidate_alive,
                                          ExclusionRule rule) {
  std::vector<QueryResult> results(queries.size());
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const std::size_t i = queries[qi];
    int best = -1;
    double best_sim = -1.0;
    for (std::size_t j = 0; j < cases.size(); ++j) {
      if (!candidate_alive[j]) continue;
      if (rule == ExclusionRule::kSelf && j == i) continue;
      if (rule == ExclusionRule::kQuestion &&
          cases[j].question_id == cases[i].question_id) {
        continue;
      }
      const double s = matrix.at(i, j);
      if (s > best_sim) {
        best_sim = s;
        best = static_cast<int>(j);
      }
    }
    const bool ok =
        best >= 0 &&
        cases[static_cast<std::size_t>(best)].lesson == cases[i].lesson;
    results[qi] = {i, ok};
  }
  return results;
}

ClassificationReport report_from_results(const std::vector<Case>& cases,
                                         const std::vector<QueryResult>& results,
                                         std::string protocol) {
  ClassificationReport rep;
  rep.protocol = std::move(protocol);
  long long n_true = 0, n_false = 0, ok_true = 0, ok_false = 0;
  std::map<std::string, QuestionOutcome> per_question;
  for (const QueryResult& r : results) {
    const Case& c = cases[r.query];
    if (c.lesson) {
      n_true += 1;
      ok_true += r.correct ? 1 : 0;
    } else {
      n_false += 1;
      ok_false += r.correct ? 1 : 0;
    }
    QuestionOutcome& q = per_question[c.question_id];
    q.question_id = c.question_id;
    q.queries += 1;
    q.correct += r.correct ? 1 : 0;
  }
  rep.n_queries = results.size();
  rep.n_true_queries = static_cast<std::size_t>(n_true);
  rep.n_false_queries = static_cast<std::size_t>(n_false);
  rep.correct_rate = n_true == 0 ? 1.0
                                 : static_cast<double>(ok_true) /
                                       static_cast<double>(n_true);
  rep.incorrect_rate = n_false == 0 ? 1.0
                                    : static_cast<double>(ok_false) /
                                          static_cast<double>(n_false);
  rep.overall = (rep.correct_rate + rep.incorrect_rate) / 2.0;
  for (auto& [qid, outcome] : per_question) {
    (void)qid;
    rep.per_question.push_back(std::move(outcome));
  }
  return rep;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

// Assigns each question to a fold by seeded shuffle + round robin.
std::map<std::string, std::size_t> fold_assignment(
    std::vector<std::string> question_ids, std::size_t n_folds,
    std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x0f01d));
  rng.shuffle(question_ids);
  std::map<std::string, std::size_t> fold;
  for (std::size_t i = 0; i < question_ids.size(); ++i) {
    fold[question_ids[i]] = i % n_folds;
  }
  return fold;
}

}  // namespace

ClassificationReport run_protocol(int protocol, const CaseBase& cb,
                                  const SimilarityConfig& cfg,
                                  std::uint64_t seed, Measure measure,
                                  std::size_t parallelism) {
  if (protocol < 1 || protocol > 8) {
    throw ConfigError("protocol must be in 1..8");
  }
  if (cb.empty()) {
    throw DataError("protocol evaluation needs a nonempty case base");
  }
  const auto& cases = cb.cases();
  const SimMatrix matrix(cases, cfg, measure, parallelism);
  const std::vector<char> all_alive(cases.size(), 1);

  ClassificationReport rep;
  switch (protocol) {
    case 1:
      rep = report_from_results(
          cases,
          classify_queries(cases, matrix, all_indices(cases.size()), all_alive,
                           ExclusionRule::kNone),
          "1");
      rep.base_size = cases.size();
      break;
    case 2:
      rep = report_from_results(
          cases,
          classify_queries(cases, matrix, all_indices(cases.size()), all_alive,
                           ExclusionRule::kSelf),
          "2");
      rep.base_size = cases.size();
      break;
    case 3:
      rep = report_from_results(
          cases,
          classify_queries(cases, matrix, all_indices(cases.size()), all_alive,
                           ExclusionRule::kQuestion),
          "3");
      rep.base_size = cases.size();
      break;
    case 4:
    case 5: {
      const ObjectiveKind kind = protocol == 4 ? ObjectiveKind::kCorrectOnly
                                               : ObjectiveKind::kOverall;
      const detail::MaskedHillClimb hc =
          detail::hill_climb_masked(cases, matrix, all_alive, kind);
      std::vector<std::size_t> queries;
      for (std::size_t i = 0; i < cases.size(); ++i) {
        if (hc.alive[i]) queries.push_back(i);
      }
      rep = report_from_results(
          cases,
          classify_queries(cases, matrix, queries, hc.alive,
                           ExclusionRule::kQuestion),
          std::to_string(protocol));
      rep.base_size = queries.size();
      rep.deleted_cases = hc.log.steps.size();
      break;
    }
    case 6:
    case 7:
    case 8: {
      const auto fold =
          fold_assignment(cb.question_ids(), 3, seed);
      std::vector<QueryResult> pooled;
      std::size_t deleted = 0;
      for (std::size_t f = 0; f < 3; ++f) {
        std::vector<char> train_alive(cases.size(), 0);
        std::vector<std::size_t> test_queries;
        for (std::size_t i = 0; i < cases.size(); ++i) {
          if (fold.at(cases[i].question_id) == f) {
            test_queries.push_back(i);
          } else {
            train_alive[i] = 1;
          }
        }
        if (test_queries.empty() ||
            test_queries.size() == cases.size()) {
          throw DataError("fold " + std::to_string(f) +
                          " is empty; need at least 3 questions");
        }
        std::vector<char> candidate_alive = train_alive;
        if (protocol != 6) {
          const ObjectiveKind kind = protocol == 7
                                         ? ObjectiveKind::kCorrectOnly
                                         : ObjectiveKind::kOverall;
          const detail::MaskedHillClimb hc =
              detail::hill_climb_masked(cases, matrix, train_alive, kind);
          candidate_alive = hc.alive;
          deleted += hc.log.steps.size();
        }
        const auto results = classify_queries(
            cases, matrix, test_queries, candidate_alive, ExclusionRule::kNone);
        pooled.insert(pooled.end(), results.begin(), results.end());
      }
      rep = report_from_results(cases, pooled, std::to_string(protocol));
      rep.base_size = cases.size();
      rep.deleted_cases = deleted;
      break;
    }
    default:
      break;
  }
  rep.seed = seed;
  return rep;
}

GrowthCurve growth_simulation(const CaseBase& corpus, std::size_t start_count,
                              std::size_t step_count, ObjectiveKind objective,
                              const SimilarityConfig& cfg, std::uint64_t seed,
                              Measure measure, std::size_t parallelism) {
  if (corpus.empty()) {
    throw DataError("growth simulation needs a nonempty corpus");
  }
  if (start_count == 0 || step_count == 0) {
    throw ConfigError("start and step counts must be positive");
  }
  if (corpus.size() < start_count) {
    throw DataError("corpus smaller than the starting case count");
  }
  std::vector<std::string> questions = corpus.question_ids();
  Rng rng(mix_seed(seed, 0x96047));
  rng.shuffle(questions);

  GrowthCurve curve;
  curve.seed = seed;
  std::vector<Case> accumulated;
  std::size_t next_question = 0;
  std::size_t target = start_count;
  while (target <= corpus.size() + step_count - 1 &&
         next_question < questions.size()) {
    while (accumulated.size() < target && next_question < questions.size()) {
      const auto* indices =
          corpus.question_case_indices(questions[next_question]);
      for (std::size_t idx : *indices) {
        accumulated.push_back(corpus.cases()[idx]);
      }
      ++next_question;
    }
    if (accumulated.size() < target) break;  // corpus exhausted

    // Whole-step pipeline on the accumulated snapshot: optimize, then
    // leave-question-out evaluation of the optimized base.
    std::vector<Case> snapshot = accumulated;
    std::sort(snapshot.begin(), snapshot.end(),
              [](const Case& a, const Case& b) { return a.case_id < b.case_id; });
    const SimMatrix matrix(snapshot, cfg, measure, parallelism);
    const detail::MaskedHillClimb hc = detail::hill_climb_masked(
        snapshot, matrix, std::vector<char>(snapshot.size(), 1), objective);
    std::vector<std::size_t> queries;
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
      if (hc.alive[i]) queries.push_back(i);
    }
    GrowthStep step;
    step.case_count = accumulated.size();
    step.optimized_count = queries.size();
    step.report = report_from_results(
        snapshot,
        classify_queries(snapshot, matrix, queries, hc.alive,
                         ExclusionRule::kQuestion),
        "growth");
    step.report.base_size = queries.size();
    step.report.deleted_cases = hc.log.steps.size();
    step.report.seed = seed;
    curve.steps.push_back(std::move(step));

    target += step_count;
  }
  return curve;
}

RankReport cross_validate_ranker(const std::vector<RankItem>& items,
                                 std::size_t n_folds,
                                 const RankerParams& params,
                                 std::uint64_t seed) {
  if (n_folds < 2) {
    throw ConfigError("cross validation needs at least 2 folds");
  }
  std::map<std::string, std::vector<std::size_t>> by_question;
  for (std::size_t i = 0; i < items.size(); ++i) {
    by_question[items[i].question_id].push_back(i);
  }
  if (by_question.size() < n_folds) {
    throw DataError("fewer questions than folds");
  }
  std::vector<std::string> question_ids;
  question_ids.reserve(by_question.size());
  for (const auto& [qid, indices] : by_question) {
    (void)indices;
    question_ids.push_back(qid);
  }
  const auto fold = fold_assignment(question_ids, n_folds, seed);

  std::map<std::string, std::optional<int>> ranks_by_question;
  for (std::size_t f = 0; f < n_folds; ++f) {
    std::vector<RankItem> train_items;
    for (const RankItem& item : items) {
      if (fold.at(item.question_id) != f) train_items.push_back(item);
    }
    const RankingModel model = train_ranker(train_items, params);
    for (const auto& [qid, indices] : by_question) {
      if (fold.at(qid) != f) continue;
      std::vector<RankItem> candidates;
      for (std::size_t i : indices) candidates.push_back(items[i]);
      const auto ranked = rank(model, candidates);
      std::optional<int> first_correct;
      for (std::size_t pos = 0; pos < ranked.size(); ++pos) {
        if (candidates[ranked[pos].item_index].gold_label) {
          first_correct = static_cast<int>(pos + 1);
          break;
        }
      }
      ranks_by_question[qid] = first_correct;
    }
  }

  RankReport rep;
  rep.seed = seed;
  std::vector<std::optional<int>> ranks;
  for (const auto& [qid, r] : ranks_by_question) {
    rep.per_question.push_back({qid, r});
    ranks.push_back(r);
  }
  rep.n_questions = ranks.size();
  rep.mrr_value = mrr(ranks);
  for (int k = 1; k <= 5; ++k) {
    rep.ans_at[static_cast<std::size_t>(k - 1)] = ans_at_k(ranks, k);
  }
  return rep;
}

RankReport rank_by_feature(const std::vector<RankItem>& items,
                           const std::string& feature) {
  if (items.empty()) {
    throw DataError("empty ranking dataset");
  }
  std::map<std::string, std::vector<std::size_t>> by_question;
  for (std::size_t i = 0; i < items.size(); ++i) {
    by_question[items[i].question_id].push_back(i);
  }
  RankReport rep;
  std::vector<std::optional<int>> ranks;
  for (const auto& [qid, indices] : by_question) {
    std::vector<std::size_t> order = indices;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = items[a].features.at(feature);
      const double vb = items[b].features.at(feature);
      if (va != vb) return va > vb;
      return items[a].candidate_id < items[b].candidate_id;
    });
    std::optional<int> first_correct;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      if (items[order[pos]].gold_label) {
        first_correct = static_cast<int>(pos + 1);
        break;
      }
    }
    rep.per_question.push_back({qid, first_correct});
    ranks.push_back(first_correct);
  }
  rep.n_questions = ranks.size();
  rep.mrr_value = mrr(ranks);
  for (int k = 1; k <= 5; ++k) {
    rep.ans_at[static_cast<std::size_t>(k - 1)] = ans_at_k(ranks, k);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

namespace {

detail::json classification_json(const ClassificationReport& rep) {
  detail::json per_question = detail::json::array();
  for (const QuestionOutcome& q : rep.per_question) {
    per_question.push_back({{"question_id", q.question_id},
                            {"queries", q.queries},
                            {"correct", q.correct}});
  }
  return detail::json{{"protocol", rep.protocol},
                      {"overall", rep.overall},
                      {"correct_rate", rep.correct_rate},
                      {"incorrect_rate", rep.incorrect_rate},
                      {"n_queries", rep.n_queries},
                      {"n_true_queries", rep.n_true_queries},
                      {"n_false_queries", rep.n_false_queries},
                      {"base_size", rep.base_size},
                      {"deleted_cases", rep.deleted_cases},
                      {"per_question", per_question},
                      {"config_fingerprint", rep.config_fingerprint},
                      {"seed", rep.seed}};
}

detail::json rank_json(const RankReport& rep) {
  detail::json per_question = detail::json::array();
  for (const QuestionRank& q : rep.per_question) {
    detail::json entry{{"question_id", q.question_id}};
    if (q.first_correct_rank) {
      entry["first_correct_rank"] = *q.first_correct_rank;
    } else {
      entry["first_correct_rank"] = nullptr;
    }
    per_question.push_back(std::move(entry));
  }
  return detail::json{{"protocol", "RANK"},
                      {"mrr", rep.mrr_value},
                      {"ans_1", rep.ans_at[0]},
                      {"ans_2", rep.ans_at[1]},
                      {"ans_3", rep.ans_at[2]},
                      {"ans_4", rep.ans_at[3]},
                      {"ans_5", rep.ans_at[4]},
                      {"n_questions", rep.n_questions},
                      {"per_question", per_question},
                      {"config_fingerprint", rep.config_fingerprint},
                      {"seed", rep.seed}};
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string to_json_line(const ClassificationReport& report) {
  return classification_json(report).dump();
}

std::string to_json_line(const RankReport& report) {
  return rank_json(report).dump();
}

std::string to_json_line(const GrowthCurve& curve) {
  detail::json steps = detail::json::array();
  for (const GrowthStep& s : curve.steps) {
    steps.push_back({{"case_count", s.case_count},
                     {"optimized_count", s.optimized_count},
                     {"report", classification_json(s.report)}});
  }
  return detail::json{{"protocol", "GROWTH"},
                      {"seed", curve.seed},
                      {"steps", steps}}
      .dump();
}

std::string format_table(const ClassificationReport& report) {
  std::ostringstream out;
  out << "Protocol  Overall  Correct  Incorrect  Queries  Base\n";
  out << report.protocol << "         " << fixed3(report.overall) << "    "
      << fixed3(report.correct_rate) << "    " << fixed3(report.incorrect_rate)
      << "      " << report.n_queries << "      " << report.base_size;
  if (report.deleted_cases > 0) {
    out << " (deleted " << report.deleted_cases << ")";
  }
  out << '\n';
  return out.str();
}

std::string format_table(const RankReport& report, const std::string& label) {
  std::ostringstream out;
  out << "Model  MRR   ANS-1 ANS-2 ANS-3 ANS-4 ANS-5\n";
  out << label << "  " << fixed3(report.mrr_value);
  for (double a : report.ans_at) {
    out << "  " << fixed3(a);
  }
  out << '\n';
  return out.str();
}

std::string format_table(const GrowthCurve& curve) {
  std::ostringstream out;
  out << "Cases  Optimized  Overall  Correct  Incorrect\n";
  for (const GrowthStep& s : curve.steps) {
    out << s.case_count << "  " << s.optimized_count << "  "
        << fixed3(s.report.overall) << "  " << fixed3(s.report.correct_rate)
        << "  " << fixed3(s.report.incorrect_rate) << '\n';
  }
  return out.str();
}

}  // namespace casegraph
