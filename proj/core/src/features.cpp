#include "casegraph/features.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "casegraph/errors.hpp"
#include "casegraph/parallel.hpp"
#include "json_util.hpp"

namespace casegraph {

double FeatureVector::at(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) {
    throw DataError("missing feature: " + name);
  }
  return it->second;
}

FeatureVector extract_features(const AttributedGraph& query_q,
                               const AttributedGraph& query_a,
                               const CaseBase& cb, const RetrievalMode& mode,
                               std::size_t k, const SimilarityConfig& cfg,
                               Measure measure, std::size_t parallelism) {
  const auto& cases = cb.cases();
  std::vector<std::size_t> effective;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Case& c = cases[i];
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

  FeatureVector fv;
  for (const char* name : kCbrFeatureNames) {
    fv.values[name] = 0.0;
  }
  if (effective.empty()) {
    fv.degenerate = true;
    return fv;
  }

  // One pass computing the question-side and answer-side similarities;
  // the blended and the question-only values both fall out of it.
  std::vector<double> blended(effective.size());
  std::vector<double> question_only(effective.size());
  parallel_for(effective.size(), parallelism, [&](std::size_t i) {
    const Case& c = cases[effective[i]];
    const double q_part = graph_sim(query_q, c.question, cfg, measure);
    const double a_part = graph_sim(query_a, c.answer, cfg, measure);
    blended[i] = (q_part == 1.0 && a_part == 1.0)
                     ? 1.0
                     : cfg.case_blend * q_part +
                           (1.0 - cfg.case_blend) * a_part;
    question_only[i] = q_part;
  });

  std::vector<std::size_t> order(effective.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (blended[a] != blended[b]) return blended[a] > blended[b];
    return cases[effective[a]].case_id < cases[effective[b]].case_id;
  });

  const Case& best = cases[effective[order[0]]];
  const double f1 = blended[order[0]];
  const double f2 = best.lesson ? 1.0 : 0.0;
  fv.values["f1"] = f1;
  fv.values["f2"] = f2;
  fv.values["f3"] = f1 * (2.0 * f2 - 1.0);

  double f4 = 0.0, f5 = 0.0, f7 = 0.0;
  for (std::size_t i = 0; i < effective.size(); ++i) {
    const Case& c = cases[effective[i]];
    if (c.lesson) {
      f4 = std::max(f4, blended[i]);
    } else {
      f5 = std::max(f5, blended[i]);
    }
    f7 = std::max(f7, question_only[i]);
  }
  fv.values["f4"] = f4;
  fv.values["f5"] = f5;
  fv.values["f7"] = f7;

  const std::size_t top = std::min(k, order.size());
  double vote_num = 0.0, vote_den = 0.0;
  for (std::size_t i = 0; i < top; ++i) {
    const Case& c = cases[effective[order[i]]];
    vote_num += blended[order[i]] * (c.lesson ? 1.0 : 0.0);
    vote_den += blended[order[i]];
  }
  fv.values["f6"] = vote_den == 0.0 ? 0.0 : vote_num / vote_den;
  return fv;
}

std::vector<RankItem> load_rank_items(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open dataset file: " + path);
  }
  std::vector<RankItem> items;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string locus = "line " + std::to_string(line_no);
    const detail::json j = detail::parse_json(line, locus);
    RankItem item;
    item.question_id = detail::require_string(j, "question_id", locus);
    item.candidate_id = detail::require_string(j, "candidate_id", locus);
    const detail::json& gold = detail::require_field(j, "gold_label", locus);
    if (!gold.is_boolean()) {
      throw ParseError(locus + ": field 'gold_label' must be a boolean");
    }
    item.gold_label = gold.get<bool>();
    const detail::json& feats = detail::require_field(j, "features", locus);
    if (!feats.is_object()) {
      throw ParseError(locus + ": field 'features' must be an object");
    }
    for (const auto& [name, value] : feats.items()) {
      if (!value.is_number()) {
        throw ParseError(locus + ": feature '" + name + "' must be numeric");
      }
      item.features.values[name] = value.get<double>();
    }
    if (!seen.insert({item.question_id, item.candidate_id}).second) {
      throw ParseError(locus + ": duplicate (question_id, candidate_id): " +
                       item.question_id + ", " + item.candidate_id);
    }
    items.push_back(std::move(item));
  }
  return items;
}

void save_rank_items(const std::vector<RankItem>& items,
                     const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot open output file: " + path);
  }
  for (const RankItem& item : items) {
    detail::json feats = detail::json::object();
    for (const auto& [name, value] : item.features.values) {
      feats[name] = value;
    }
    detail::json j{{"question_id", item.question_id},
                   {"candidate_id", item.candidate_id},
                   {"gold_label", item.gold_label},
                   {"features", feats}};
    out << j.dump() << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

std::vector<RankItem> select_features(const std::vector<RankItem>& items,
                                      const std::string& feature_sets) {
  for (char set : feature_sets) {
    if (set != 'C' && set != 'D' && set != 'S' && set != 'I') {
      throw ConfigError(std::string("unknown feature set letter: ") + set);
    }
  }
  auto selected = [&](const std::string& name) {
    for (char set : feature_sets) {
      if (set == 'C') {
        for (const char* cbr : kCbrFeatureNames) {
          if (name == cbr) return true;
        }
      } else if (!name.empty() && name.front() == set) {
        return true;
      }
    }
    return false;
  };
  std::vector<RankItem> out;
  out.reserve(items.size());
  for (const RankItem& item : items) {
    RankItem copy;
    copy.question_id = item.question_id;
    copy.candidate_id = item.candidate_id;
    copy.gold_label = item.gold_label;
    copy.features.degenerate = item.features.degenerate;
    for (const auto& [name, value] : item.features.values) {
      if (selected(name)) {
        copy.features.values[name] = value;
      }
    }
    out.push_back(std::move(copy));
  }
  return out;
}

}  // namespace casegraph
