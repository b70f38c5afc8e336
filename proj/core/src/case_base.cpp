#include "casegraph/case_base.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "casegraph/errors.hpp"
#include "casegraph/parallel.hpp"
#include "json_util.hpp"

namespace casegraph {

double graph_sim(const AttributedGraph& a, const AttributedGraph& b,
                 const SimilarityConfig& cfg, Measure measure) {
  switch (measure) {
    case Measure::kLcs:
      return sim_lcs(a, b, cfg);
    case Measure::kEdit:
      return sim_edit(a, b, cfg);
    case Measure::kIntegrated:
      break;
  }
  return integrated_sim(a, b, cfg).value;
}

double case_sim(const AttributedGraph& query_q, const AttributedGraph& query_a,
                const Case& c, const SimilarityConfig& cfg, Measure measure) {
  const double q_part = graph_sim(query_q, c.question, cfg, measure);
  const double a_part = graph_sim(query_a, c.answer, cfg, measure);
  if (q_part == 1.0 && a_part == 1.0) {
    return 1.0;  // keeps exact self-matches at exactly 1.0 for any blend
  }
  return cfg.case_blend * q_part + (1.0 - cfg.case_blend) * a_part;
}

namespace {

Case case_from_json(const detail::json& record, const std::string& locus) {
  Case c;
  c.case_id = detail::require_string(record, "case_id", locus);
  c.question_id = detail::require_string(record, "question_id", locus);
  const detail::json& lesson = detail::require_field(record, "lesson", locus);
  if (!lesson.is_boolean()) {
    throw ParseError(locus + ": field 'lesson' must be a boolean");
  }
  c.lesson = lesson.get<bool>();
  c.question = detail::graph_from_json(
      detail::require_field(record, "question", locus), locus + ", question");
  c.answer = detail::graph_from_json(
      detail::require_field(record, "answer", locus), locus + ", answer");
  if (auto it = record.find("source_text"); it != record.end()) {
    if (!it->is_string()) {
      throw ParseError(locus + ": field 'source_text' must be a string");
    }
    c.source_text = it->get<std::string>();
  }
  if (c.question_id.empty()) {
    throw ParseError(locus + ": question_id must be non-empty");
  }
  if (c.case_id.empty()) {
    throw ParseError(locus + ": case_id must be non-empty");
  }
  return c;
}

detail::json case_to_json(const Case& c) {
  detail::json j{{"case_id", c.case_id},
                 {"question_id", c.question_id},
                 {"lesson", c.lesson},
                 {"question", detail::graph_to_json(c.question)},
                 {"answer", detail::graph_to_json(c.answer)}};
  if (c.source_text) {
    j["source_text"] = *c.source_text;
  }
  return j;
}

}  // namespace

CaseBase CaseBase::from_cases(std::vector<Case> cases) {
  CaseBase cb;
  IngestReport report;
  for (auto& c : cases) {
    const std::string id = c.case_id;
    if (!cb.insert_internal(std::move(c), report)) {
      throw IntegrityError("duplicate case in from_cases: " + id);
    }
  }
  cb.sort_and_reindex();
  return cb;
}

std::string CaseBase::pair_key(const Case& c) const {
  return canonical_form(c.question) + '\x1d' + canonical_form(c.answer);
}

bool CaseBase::insert_internal(Case c, IngestReport& report) {
  if (auto it = id_index_.find(c.case_id); it != id_index_.end()) {
    const Case& existing = cases_[it->second];
    const bool same = existing.question_id == c.question_id &&
                      existing.lesson == c.lesson &&
                      existing.question == c.question &&
                      existing.answer == c.answer;
    if (same) {
      report.duplicates_dropped += 1;
      return false;
    }
    throw IntegrityError("case_id '" + c.case_id +
                         "' already present with different content");
  }
  const std::string key = pair_key(c);
  auto& entry = dedup_[key];
  const bool seen_same = c.lesson ? entry.seen_true : entry.seen_false;
  const bool seen_other = c.lesson ? entry.seen_false : entry.seen_true;
  if (seen_same) {
    report.duplicates_dropped += 1;
    return false;
  }
  if (seen_other) {
    report.annotation_conflicts.push_back(
        "case '" + c.case_id + "' conflicts with an earlier annotation of "
        "the same characterization");
  }
  (c.lesson ? entry.seen_true : entry.seen_false) = true;
  id_index_.emplace(c.case_id, cases_.size());  // kept valid mid-ingest
  cases_.push_back(std::move(c));
  report.accepted += 1;
  return true;
}

void CaseBase::sort_and_reindex() {
  std::sort(cases_.begin(), cases_.end(),
            [](const Case& a, const Case& b) { return a.case_id < b.case_id; });
  id_index_.clear();
  question_index_.clear();
  for (std::size_t i = 0; i < cases_.size(); ++i) {
    id_index_.emplace(cases_[i].case_id, i);
    question_index_[cases_[i].question_id].push_back(i);
  }
}

IngestReport CaseBase::ingest(std::istream& in) {
  if (!in) {
    throw IoError("unreadable case stream");
  }
  IngestReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const std::string locus = "line " + std::to_string(line_no);
    try {
      insert_internal(case_from_json(detail::parse_json(line, locus), locus),
                      report);
    } catch (const ParseError& e) {
      report.parse_failures.emplace_back(e.what());
    } catch (const IntegrityError& e) {
      report.parse_failures.emplace_back(locus + ": " + e.what());
    }
  }
  sort_and_reindex();
  return report;
}

IngestReport CaseBase::ingest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open case file: " + path);
  }
  return ingest(in);
}

bool CaseBase::add_case(Case c) {
  IngestReport report;
  const bool added = insert_internal(std::move(c), report);
  if (added) {
    sort_and_reindex();
  }
  return added;
}

bool CaseBase::remove_case(const std::string& case_id) {
  auto it = id_index_.find(case_id);
  if (it == id_index_.end()) {
    return false;
  }
  const Case& c = cases_[it->second];
  auto dit = dedup_.find(pair_key(c));
  if (dit != dedup_.end()) {
    (c.lesson ? dit->second.seen_true : dit->second.seen_false) = false;
    if (!dit->second.seen_true && !dit->second.seen_false) {
      dedup_.erase(dit);
    }
  }
  cases_.erase(cases_.begin() + static_cast<std::ptrdiff_t>(it->second));
  sort_and_reindex();
  return true;
}

const Case* CaseBase::find_case(const std::string& case_id) const {
  auto it = id_index_.find(case_id);
  return it == id_index_.end() ? nullptr : &cases_[it->second];
}

bool CaseBase::has_question(const std::string& question_id) const {
  return question_index_.count(question_id) > 0;
}

std::vector<std::string> CaseBase::question_ids() const {
  std::vector<std::string> ids;
  ids.reserve(question_index_.size());
  for (const auto& [qid, indices] : question_index_) {
    (void)indices;
    ids.push_back(qid);
  }
  return ids;
}

const std::vector<std::size_t>* CaseBase::question_case_indices(
    const std::string& question_id) const {
  auto it = question_index_.find(question_id);
  return it == question_index_.end() ? nullptr : &it->second;
}

void CaseBase::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot open output file: " + path);
  }
  for (const Case& c : cases_) {
    out << case_to_json(c).dump() << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

CaseBase CaseBase::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open case file: " + path);
  }
  CaseBase cb;
  IngestReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const std::string locus = "record " + std::to_string(line_no);
    // Strict: any malformed record aborts the load.
    cb.insert_internal(case_from_json(detail::parse_json(line, locus), locus),
                       report);
  }
  cb.sort_and_reindex();
  return cb;
}

std::vector<Match> CaseBase::retrieve(const AttributedGraph& query_q,
                                      const AttributedGraph& query_a,
                                      std::size_t k, const RetrievalMode& mode,
                                      const SimilarityConfig& cfg,
                                      Measure measure,
                                      std::size_t parallelism) const {
  if (k == 0) {
    throw DataError("retrieval k must be positive");
  }
  if (mode.kind() == RetrievalMode::Kind::kExcludeQuestion &&
      !has_question(mode.excluded_id())) {
    throw DataError("excluded question_id not in case base: " +
                    mode.excluded_id());
  }
  if (mode.kind() == RetrievalMode::Kind::kExcludeCase &&
      find_case(mode.excluded_id()) == nullptr) {
    throw DataError("excluded case_id not in case base: " + mode.excluded_id());
  }
  std::vector<std::size_t> effective;
  effective.reserve(cases_.size());
  for (std::size_t i = 0; i < cases_.size(); ++i) {
    const Case& c = cases_[i];
    if (mode.kind() == RetrievalMode::Kind::kExcludeQuestion &&
        c.question_id == mode.excluded_id()) {
      continue;
    }
    if (mode.kind() == RetrievalMode::Kind::kExcludeCase &&
        c.case_id == mode.excluded_id()) {
      continue;
    }
    effective.push_back(i);
  }
  if (effective.empty()) {
    throw DataError("effective case base is empty after exclusion");
  }
  std::vector<double> sims(effective.size());
  parallel_for(effective.size(), parallelism, [&](std::size_t i) {
    sims[i] = case_sim(query_q, query_a, cases_[effective[i]], cfg, measure);
  });
  std::vector<std::size_t> order(effective.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sims[a] != sims[b]) return sims[a] > sims[b];
    return cases_[effective[a]].case_id < cases_[effective[b]].case_id;
  });
  const std::size_t take = std::min(k, order.size());
  std::vector<Match> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const Case& c = cases_[effective[order[i]]];
    out.push_back({c.case_id, sims[order[i]], c.lesson});
  }
  return out;
}

Classification CaseBase::classify(const AttributedGraph& query_q,
                                  const AttributedGraph& query_a,
                                  const RetrievalMode& mode,
                                  const SimilarityConfig& cfg, Measure measure,
                                  std::size_t parallelism) const {
  const std::vector<Match> top =
      retrieve(query_q, query_a, 1, mode, cfg, measure, parallelism);
  return {top.front().lesson, top.front()};
}

}  // namespace casegraph
