#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "casegraph/graph.hpp"

namespace casegraph {

/// Per-kind edit operation costs. All strictly positive. A substitution is
/// never charged more than delete + insert of the same kind.
struct EditCosts {
  double node_insert = 1.0;
  double node_delete = 1.0;
  double node_substitute = 1.0;
  double edge_insert = 1.0;
  double edge_delete = 1.0;
  double edge_substitute = 1.0;
};

/// Knobs of the three similarity measures and the case-level blend.
struct SimilarityConfig {
  /// Relevance limit for node pairs: matched pairs at or above it go to Gem.
  double node_threshold = 0.5;
  /// Reserved counterpart for edges. Edge similarity is currently binary
  /// (exact relation + matched endpoints), so any value in (0,1] partitions
  /// identically.
  double edge_threshold = 0.5;
  /// Component relevance weights, uniform per kind.
  double node_weight = 1.0;
  double edge_weight = 1.0;
  /// Node-local similarity mix: concept_weight on concept label equality,
  /// (1 - concept_weight) on the attribute list overlap.
  double concept_weight = 0.5;
  EditCosts edit;
  /// Question share in case_sim; the answer side gets 1 - case_blend.
  double case_blend = 0.5;
  /// Exact NP-hard search runs only when both graph sizes are at most this.
  std::size_t exact_size_limit = 12;
  /// Wall-clock cap per graph pair for the exact searches.
  double time_budget_seconds = 2.0;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// 1 iff key and value both equal, else 0.
double attribute_sim(const std::pair<std::string, std::string>& u,
                     const std::pair<std::string, std::string>& v);

/// |xs ∩ ys| / max(|xs|, |ys|); 1 when both empty. Inputs are sorted
/// unique pair lists (the representation ConceptNode::attrs uses).
double list_sim(const std::vector<std::pair<std::string, std::string>>& xs,
                const std::vector<std::pair<std::string, std::string>>& ys);

/// concept_weight * [concepts equal] + (1-concept_weight) * list_sim(attrs).
double node_sim(const ConceptNode& a, const ConceptNode& b,
                const SimilarityConfig& cfg);

/// A common subgraph of x and y together with the node correspondence that
/// produced it. exact is false when the search degraded to the greedy
/// anytime path (size or time budget exceeded); the result is then a valid
/// common subgraph of no more than maximal size.
struct LcsResult {
  AttributedGraph subgraph;
  std::vector<std::pair<int, int>> node_pairs;
  bool exact = true;
};

/// Largest common subgraph: maximal |N|+|E| over node-injective
/// correspondences requiring equal node content (concept and attributes)
/// and equal relation labels on matched edges.
LcsResult lcs(const AttributedGraph& x, const AttributedGraph& y,
              const SimilarityConfig& cfg);

/// |lcs(x,y)| / max(|x|,|y|); 1 when both empty, 0 when exactly one is.
double sim_lcs(const AttributedGraph& x, const AttributedGraph& y,
               const SimilarityConfig& cfg);

struct EditDistanceResult {
  double cost = 0.0;
  bool exact = true;
};

/// Minimum total cost of node/edge insertions, deletions and substitutions
/// transforming x into y. Exact best-first search under the size and time
/// budgets; otherwise an assignment-based upper bound flagged approximate.
EditDistanceResult edit_distance(const AttributedGraph& x,
                                 const AttributedGraph& y,
                                 const SimilarityConfig& cfg);

/// 1 - min(1, delta_edit / D_max) with D_max the cost of deleting all of x
/// and inserting all of y; 1 when both graphs are empty.
double sim_edit(const AttributedGraph& x, const AttributedGraph& y,
                const SimilarityConfig& cfg);

/// Reference to one component (node or edge) of a specific side's graph.
struct ComponentRef {
  enum class Kind { kNode, kEdge };
  Kind kind;
  int index;

  friend bool operator==(const ComponentRef&, const ComponentRef&) = default;
};

/// Outcome of the integrated subgraph/edit measure: every component of each
/// side lands in exactly one of Gem (matched above threshold) or Diff.
struct PartitionResult {
  std::vector<ComponentRef> gem_x, diff_x, gem_y, diff_y;
  double gem_weight_x = 0.0, diff_weight_x = 0.0;
  double gem_weight_y = 0.0, diff_weight_y = 0.0;
  /// Node correspondence chosen by the assignment step (x index, y index),
  /// injective in both directions; includes below-threshold pairs.
  std::vector<std::pair<int, int>> matched_pairs;
  double value = 0.0;
};

/// Integrated subgraph / graph edit similarity. The node correspondence is
/// the optimal one-to-one assignment maximizing total node_sim; node pairs
/// at or above node_threshold enter Gem, edges enter Gem when both
/// endpoints are Gem-matched, the counterpart edge exists and the relation
/// matches. value is the mean of the two Gem weight fractions; 1 when both
/// graphs are empty, 0 when exactly one is.
PartitionResult integrated_sim(const AttributedGraph& x,
                               const AttributedGraph& y,
                               const SimilarityConfig& cfg);

}  // namespace casegraph
