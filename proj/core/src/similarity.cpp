#include "casegraph/similarity.hpp"

#include <algorithm>

#include "casegraph/errors.hpp"

namespace casegraph {

namespace {

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ConfigError(std::string(name) + " must be in [0,1]");
  }
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw ConfigError(std::string(name) + " must be > 0");
  }
}

}  // namespace

void SimilarityConfig::validate() const {
  check_unit(node_threshold, "node_threshold");
  check_unit(edge_threshold, "edge_threshold");
  check_unit(concept_weight, "concept_weight");
  check_unit(case_blend, "case_blend");
  check_positive(node_weight, "node_weight");
  check_positive(edge_weight, "edge_weight");
  check_positive(edit.node_insert, "edit.node_insert");
  check_positive(edit.node_delete, "edit.node_delete");
  check_positive(edit.node_substitute, "edit.node_substitute");
  check_positive(edit.edge_insert, "edit.edge_insert");
  check_positive(edit.edge_delete, "edit.edge_delete");
  check_positive(edit.edge_substitute, "edit.edge_substitute");
  check_positive(time_budget_seconds, "time_budget_seconds");
}

double attribute_sim(const std::pair<std::string, std::string>& u,
                     const std::pair<std::string, std::string>& v) {
  return u == v ? 1.0 : 0.0;
}

double list_sim(const std::vector<std::pair<std::string, std::string>>& xs,
                const std::vector<std::pair<std::string, std::string>>& ys) {
  if (xs.empty() && ys.empty()) {
    return 1.0;
  }
  // Both lists are sorted; count the intersection with a merge walk.
  std::size_t i = 0, j = 0, common = 0;
  while (i < xs.size() && j < ys.size()) {
    if (xs[i] == ys[j]) {
      ++common;
      ++i;
      ++j;
    } else if (xs[i] < ys[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return static_cast<double>(common) /
         static_cast<double>(std::max(xs.size(), ys.size()));
}

double node_sim(const ConceptNode& a, const ConceptNode& b,
                const SimilarityConfig& cfg) {
  const double concept_part = a.concept_label == b.concept_label ? 1.0 : 0.0;
  return cfg.concept_weight * concept_part +
         (1.0 - cfg.concept_weight) * list_sim(a.attrs, b.attrs);
}

double sim_lcs(const AttributedGraph& x, const AttributedGraph& y,
               const SimilarityConfig& cfg) {
  if (x.empty() && y.empty()) {
    return 1.0;
  }
  if (x.empty() || y.empty()) {
    return 0.0;
  }
  const LcsResult res = lcs(x, y, cfg);
  return static_cast<double>(res.subgraph.size()) /
         static_cast<double>(std::max(x.size(), y.size()));
}

double sim_edit(const AttributedGraph& x, const AttributedGraph& y,
                const SimilarityConfig& cfg) {
  if (x.empty() && y.empty()) {
    return 1.0;
  }
  // D_max: delete all of x, insert all of y. Always a feasible edit
  // sequence, so delta <= D_max on the exact path.
  const double d_max =
      cfg.edit.node_delete * static_cast<double>(x.nodes().size()) +
      cfg.edit.edge_delete * static_cast<double>(x.edges().size()) +
      cfg.edit.node_insert * static_cast<double>(y.nodes().size()) +
      cfg.edit.edge_insert * static_cast<double>(y.edges().size());
  const EditDistanceResult res = edit_distance(x, y, cfg);
  return 1.0 - std::min(1.0, res.cost / d_max);
}

}  // namespace casegraph
