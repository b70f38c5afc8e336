#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "casegraph/graph.hpp"
#include "casegraph/similarity.hpp"

namespace casegraph {

/// An experience item: the (question graph, answer graph) characterization
/// plus the boolean lesson (candidate contained a correct answer passage).
struct Case {
  std::string case_id;
  std::string question_id;
  AttributedGraph question;
  AttributedGraph answer;
  bool lesson = false;
  std::optional<std::string> source_text;
};

/// Which graph similarity backs retrieval. The integrated measure is the
/// default; the other two exist for side-by-side comparisons.
enum class Measure { kIntegrated, kLcs, kEdit };

double graph_sim(const AttributedGraph& a, const AttributedGraph& b,
                 const SimilarityConfig& cfg, Measure measure);

/// case_blend * sim(query_q, case.question) +
/// (1 - case_blend) * sim(query_a, case.answer).
double case_sim(const AttributedGraph& query_q, const AttributedGraph& query_a,
                const Case& c, const SimilarityConfig& cfg,
                Measure measure = Measure::kIntegrated);

/// Retrieval scope: the full base, or the base minus one question's cases,
/// or minus one specific case.
class RetrievalMode {
 public:
  enum class Kind { kFull, kExcludeQuestion, kExcludeCase };

  static RetrievalMode full() { return RetrievalMode(Kind::kFull, ""); }
  static RetrievalMode exclude_question(std::string question_id) {
    return RetrievalMode(Kind::kExcludeQuestion, std::move(question_id));
  }
  static RetrievalMode exclude_case(std::string case_id) {
    return RetrievalMode(Kind::kExcludeCase, std::move(case_id));
  }

  Kind kind() const { return kind_; }
  const std::string& excluded_id() const { return excluded_id_; }

 private:
  RetrievalMode(Kind kind, std::string id)
      : kind_(kind), excluded_id_(std::move(id)) {}

  Kind kind_;
  std::string excluded_id_;
};

struct Match {
  std::string case_id;
  double similarity = 0.0;
  bool lesson = false;
};

struct Classification {
  bool lesson = false;
  Match best;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::size_t duplicates_dropped = 0;
  /// One entry per rejected record: "line N: reason".
  std::vector<std::string> parse_failures;
  /// Characterization pairs seen with both lessons; such cases are kept.
  std::vector<std::string> annotation_conflicts;
};

/// The finite experience store. Cases are held sorted by case_id; two cases
/// never share (canonical question, canonical answer, lesson). Reads are
/// safe from any number of threads; mutations require exclusive access.
class CaseBase {
 public:
  CaseBase() = default;

  /// Builds a base from already-clean cases; throws IntegrityError on any
  /// duplicate or case_id collision.
  static CaseBase from_cases(std::vector<Case> cases);

  /// Reads line-delimited case records, skipping blank lines. Parse and
  /// integrity failures are reported per record, duplicates dropped
  /// first-seen-wins. Ingesting the same stream twice is a no-op.
  IngestReport ingest(std::istream& in);
  IngestReport ingest_file(const std::string& path);

  /// Adds one case; returns false when it is a duplicate. Throws
  /// IntegrityError on a case_id collision with different content.
  bool add_case(Case c);
  bool remove_case(const std::string& case_id);

  std::size_t size() const { return cases_.size(); }
  bool empty() const { return cases_.empty(); }
  /// Ascending case_id.
  const std::vector<Case>& cases() const { return cases_; }
  const Case* find_case(const std::string& case_id) const;
  bool has_question(const std::string& question_id) const;
  std::vector<std::string> question_ids() const;
  std::size_t question_count() const { return question_index_.size(); }
  const std::vector<std::size_t>* question_case_indices(
      const std::string& question_id) const;

  /// Writes the corpus format, one record per line in case_id order.
  void save(const std::string& path) const;
  /// Strict load: any bad record throws with its line number.
  static CaseBase load(const std::string& path);

  /// Top-k cases by case_sim under the mode's exclusion, ordered by
  /// descending similarity then ascending case_id. Throws DataError when
  /// the effective base is empty or the excluded id does not exist.
  std::vector<Match> retrieve(const AttributedGraph& query_q,
                              const AttributedGraph& query_a, std::size_t k,
                              const RetrievalMode& mode,
                              const SimilarityConfig& cfg,
                              Measure measure = Measure::kIntegrated,
                              std::size_t parallelism = 1) const;

  /// Nearest-neighbor label transfer: the lesson of the single best match.
  Classification classify(const AttributedGraph& query_q,
                          const AttributedGraph& query_a,
                          const RetrievalMode& mode,
                          const SimilarityConfig& cfg,
                          Measure measure = Measure::kIntegrated,
                          std::size_t parallelism = 1) const;

 private:
  struct DedupEntry {
    bool seen_true = false;
    bool seen_false = false;
  };

  std::string pair_key(const Case& c) const;
  bool insert_internal(Case c, IngestReport& report);
  void sort_and_reindex();

  std::vector<Case> cases_;
  std::map<std::string, std::size_t> id_index_;
  std::map<std::string, std::vector<std::size_t>> question_index_;
  // canonical (question, answer) pair -> lessons seen, for dedup and
  // annotation-conflict flagging.
  std::map<std::string, DedupEntry> dedup_;
};

}  // namespace casegraph
