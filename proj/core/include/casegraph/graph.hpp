#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace casegraph {

/// A node of an attributed graph: a lexical concept label plus a set of
/// layer attributes (at most one value per key). Attributes are kept
/// sorted by key.
struct ConceptNode {
  std::string id;
  std::string concept_label;
  std::vector<std::pair<std::string, std::string>> attrs;

  /// True when concept label and the full attribute set are equal.
  /// Node identity (id) is deliberately ignored.
  bool same_content(const ConceptNode& other) const {
    return concept_label == other.concept_label && attrs == other.attrs;
  }
};

/// A directed labeled edge. Parallel edges (same endpoints, same or
/// different relation) are allowed; the graph's edge list is a multiset.
struct RelationEdge {
  std::string src;
  std::string dst;
  std::string rel;

  friend bool operator==(const RelationEdge&, const RelationEdge&) = default;
};

/// One invariant violation found by validation; names the offending element.
struct Violation {
  std::string element;
  std::string message;
};

/// An immutable attributed directed multigraph. Instances are always
/// structurally valid: node ids are unique and non-empty, every edge
/// references existing nodes, every relation label is non-empty.
/// All member functions are const; values are safe to share across threads.
class AttributedGraph {
 public:
  AttributedGraph() = default;

  /// Builds a graph from parts, throwing IntegrityError when any invariant
  /// fails. Attribute lists are sorted by key; duplicate attribute keys are
  /// reported as violations.
  static AttributedGraph from_parts(std::vector<ConceptNode> nodes,
                                    std::vector<RelationEdge> edges);

  const std::vector<ConceptNode>& nodes() const { return nodes_; }
  const std::vector<RelationEdge>& edges() const { return edges_; }

  /// |N| + |E|.
  std::size_t size() const { return nodes_.size() + edges_.size(); }
  bool empty() const { return nodes_.empty() && edges_.empty(); }

  /// Index of the node with the given id, or -1.
  int node_index(std::string_view id) const;

  /// Precomputed content fingerprint of node i: equal fingerprints iff
  /// same_content. Used as the label-compatibility key by the matchers.
  const std::string& node_key(std::size_t i) const { return node_keys_[i]; }

  /// Relations between an ordered node pair as (relation, multiplicity),
  /// sorted by relation. Empty when no edge connects the pair.
  std::span<const std::pair<std::string, int>> relations_between(int src,
                                                                 int dst) const;

  /// Endpoint indices of edge e as (src, dst).
  std::pair<int, int> edge_endpoints(std::size_t e) const {
    return edge_endpoints_[e];
  }

  /// Total degree (in + out, self loops counted twice) of node i.
  int degree(std::size_t i) const { return degree_[i]; }

  friend bool operator==(const AttributedGraph& a, const AttributedGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  void finalize();

  std::vector<ConceptNode> nodes_;
  std::vector<RelationEdge> edges_;
  std::map<std::string, int, std::less<>> id_to_index_;
  std::vector<std::string> node_keys_;
  std::vector<std::pair<int, int>> edge_endpoints_;
  std::vector<int> degree_;
  // (src, dst) -> sorted (relation, count) list.
  std::map<std::pair<int, int>, std::vector<std::pair<std::string, int>>>
      pair_rels_;
};

inline bool operator==(const ConceptNode& a, const ConceptNode& b) {
  return a.id == b.id && a.concept_label == b.concept_label && a.attrs == b.attrs;
}

/// Checks the graph invariants on raw parts without constructing a graph.
/// Returns an empty list iff from_parts would succeed.
std::vector<Violation> validate_parts(const std::vector<ConceptNode>& nodes,
                                      const std::vector<RelationEdge>& edges);

/// Re-checks an already constructed graph. Always empty by construction;
/// provided for symmetry with validate_parts.
std::vector<Violation> validate(const AttributedGraph& g);

/// Parses one graph record: {"nodes":[{"id","concept","attrs":{k:v}}],
/// "edges":[{"src","dst","rel"}]}. Throws ParseError on malformed input and
/// IntegrityError on dangling endpoints or duplicate ids.
AttributedGraph parse_graph(std::string_view text);

/// Serializes to the record format accepted by parse_graph, preserving node
/// and edge order. parse_graph(serialize_graph(g)) == g.
std::string serialize_graph(const AttributedGraph& g);

inline std::size_t graph_size(const AttributedGraph& g) { return g.size(); }

/// Deterministic duplicate-detection form: invariant under node/edge input
/// order and node id renaming. Node ids are replaced by refinement classes
/// built from (concept, attributes) keys and iterated neighborhood
/// signatures. Equal strings are treated as duplicates; this is a dedup
/// heuristic, not an isomorphism decision.
std::string canonical_form(const AttributedGraph& g);

/// Total preorder on graph content: compares (|N|, |E|), then node content
/// keys in storage order, then edge (src index, dst index, relation)
/// triples in storage order. Returns <0, 0 or >0. A result of 0 means the
/// graphs are identical up to node id spelling, with the index-order map
/// a content- and structure-preserving bijection. Used by the similarity
/// measures to orient a pair canonically so that values are exactly
/// symmetric in their arguments.
int compare_content(const AttributedGraph& a, const AttributedGraph& b);

}  // namespace casegraph
