#include "casegraph/graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "casegraph/errors.hpp"
#include "json_util.hpp"

namespace casegraph {

namespace {

std::string make_node_key(const ConceptNode& n) {
  std::string key = n.concept_label;
  for (const auto& [k, v] : n.attrs) {
    key += '\x1f';
    key += k;
    key += '\x1e';
    key += v;
  }
  return key;
}

}  // namespace

std::vector<Violation> validate_parts(const std::vector<ConceptNode>& nodes,
                                      const std::vector<RelationEdge>& edges) {
  std::vector<Violation> out;
  std::set<std::string_view> ids;
  for (const auto& n : nodes) {
    if (n.id.empty()) {
      out.push_back({"node", "empty node id"});
      continue;
    }
    if (!ids.insert(n.id).second) {
      out.push_back({"node " + n.id, "duplicate node id"});
    }
    std::set<std::string_view> keys;
    for (const auto& [k, v] : n.attrs) {
      (void)v;
      if (!keys.insert(k).second) {
        out.push_back({"node " + n.id, "duplicate attribute key '" + k + "'"});
      }
    }
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& edge = edges[e];
    const std::string where =
        "edge " + std::to_string(e) + " (" + edge.src + " -" + edge.rel +
        "-> " + edge.dst + ")";
    if (edge.rel.empty()) {
      out.push_back({where, "empty relation label"});
    }
    if (!ids.count(edge.src)) {
      out.push_back({where, "unknown source node '" + edge.src + "'"});
    }
    if (!ids.count(edge.dst)) {
      out.push_back({where, "unknown target node '" + edge.dst + "'"});
    }
  }
  return out;
}

std::vector<Violation> validate(const AttributedGraph& g) {
  return validate_parts(g.nodes(), g.edges());
}

AttributedGraph AttributedGraph::from_parts(std::vector<ConceptNode> nodes,
                                            std::vector<RelationEdge> edges) {
  for (auto& n : nodes) {
    std::sort(n.attrs.begin(), n.attrs.end());
  }
  auto violations = validate_parts(nodes, edges);
  if (!violations.empty()) {
    std::string msg = "invalid graph:";
    for (const auto& v : violations) {
      msg += " [" + v.element + ": " + v.message + "]";
    }
    throw IntegrityError(msg);
  }
  AttributedGraph g;
  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);
  g.finalize();
  return g;
}

void AttributedGraph::finalize() {
  id_to_index_.clear();
  node_keys_.clear();
  edge_endpoints_.clear();
  pair_rels_.clear();
  degree_.assign(nodes_.size(), 0);
  node_keys_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    id_to_index_.emplace(nodes_[i].id, static_cast<int>(i));
    node_keys_.push_back(make_node_key(nodes_[i]));
  }
  edge_endpoints_.reserve(edges_.size());
  for (const auto& e : edges_) {
    int s = node_index(e.src);
    int d = node_index(e.dst);
    edge_endpoints_.emplace_back(s, d);
    degree_[s] += 1;
    degree_[d] += 1;
    auto& rels = pair_rels_[{s, d}];
    auto it = std::find_if(rels.begin(), rels.end(),
                           [&](const auto& rc) { return rc.first == e.rel; });
    if (it == rels.end()) {
      rels.emplace_back(e.rel, 1);
    } else {
      it->second += 1;
    }
  }
  for (auto& [pair, rels] : pair_rels_) {
    (void)pair;
    std::sort(rels.begin(), rels.end());
  }
}

int AttributedGraph::node_index(std::string_view id) const {
  auto it = id_to_index_.find(id);
  return it == id_to_index_.end() ? -1 : it->second;
}

std::span<const std::pair<std::string, int>> AttributedGraph::relations_between(
    int src, int dst) const {
  auto it = pair_rels_.find({src, dst});
  if (it == pair_rels_.end()) {
    return {};
  }
  return {it->second.data(), it->second.size()};
}

// ---------------------------------------------------------------------------
// Parsing / serialization
// ---------------------------------------------------------------------------

namespace detail {

AttributedGraph graph_from_json(const json& record, const std::string& locus) {
  if (!record.is_object()) {
    throw ParseError(locus + ": graph record must be an object");
  }
  std::vector<ConceptNode> nodes;
  std::vector<RelationEdge> edges;
  const json& jnodes = require_field(record, "nodes", locus);
  if (!jnodes.is_array()) {
    throw ParseError(locus + ": field 'nodes' must be an array");
  }
  for (std::size_t i = 0; i < jnodes.size(); ++i) {
    const std::string nl = locus + ", node " + std::to_string(i);
    const json& jn = jnodes[i];
    ConceptNode n;
    n.id = require_string(jn, "id", nl);
    n.concept_label = require_string(jn, "concept", nl);
    if (auto it = jn.find("attrs"); it != jn.end()) {
      if (!it->is_object()) {
        throw ParseError(nl + ": field 'attrs' must be an object");
      }
      for (const auto& [k, v] : it->items()) {
        if (!v.is_string()) {
          throw ParseError(nl + ": attribute '" + k + "' must be a string");
        }
        n.attrs.emplace_back(k, v.get<std::string>());
      }
    }
    nodes.push_back(std::move(n));
  }
  const json& jedges = require_field(record, "edges", locus);
  if (!jedges.is_array()) {
    throw ParseError(locus + ": field 'edges' must be an array");
  }
  for (std::size_t i = 0; i < jedges.size(); ++i) {
    const std::string el = locus + ", edge " + std::to_string(i);
    const json& je = jedges[i];
    edges.push_back({require_string(je, "src", el),
                     require_string(je, "dst", el),
                     require_string(je, "rel", el)});
  }
  try {
    return AttributedGraph::from_parts(std::move(nodes), std::move(edges));
  } catch (const IntegrityError& e) {
    throw IntegrityError(locus + ": " + e.what());
  }
}

json graph_to_json(const AttributedGraph& g) {
  json jnodes = json::array();
  for (const auto& n : g.nodes()) {
    json attrs = json::object();
    for (const auto& [k, v] : n.attrs) {
      attrs[k] = v;
    }
    jnodes.push_back({{"id", n.id}, {"concept", n.concept_label}, {"attrs", attrs}});
  }
  json jedges = json::array();
  for (const auto& e : g.edges()) {
    jedges.push_back({{"src", e.src}, {"dst", e.dst}, {"rel", e.rel}});
  }
  return json{{"nodes", jnodes}, {"edges", jedges}};
}

}  // namespace detail

AttributedGraph parse_graph(std::string_view text) {
  return detail::graph_from_json(detail::parse_json(text, "graph"), "graph");
}

std::string serialize_graph(const AttributedGraph& g) {
  return detail::graph_to_json(g).dump();
}

// ---------------------------------------------------------------------------
// Canonical form
// ---------------------------------------------------------------------------

namespace {

// Maps each distinct signature string to its rank in sorted order. The dense
// class ids make the next refinement round's signatures bounded in size.
std::vector<int> compress_classes(const std::vector<std::string>& sigs,
                                  int* n_classes) {
  std::vector<std::string> sorted = sigs;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> cls(sigs.size());
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    cls[i] = static_cast<int>(
        std::lower_bound(sorted.begin(), sorted.end(), sigs[i]) -
        sorted.begin());
  }
  *n_classes = static_cast<int>(sorted.size());
  return cls;
}

}  // namespace

int compare_content(const AttributedGraph& a, const AttributedGraph& b) {
  if (a.nodes().size() != b.nodes().size()) {
    return a.nodes().size() < b.nodes().size() ? -1 : 1;
  }
  if (a.edges().size() != b.edges().size()) {
    return a.edges().size() < b.edges().size() ? -1 : 1;
  }
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    const int c = a.node_key(i).compare(b.node_key(i));
    if (c != 0) return c < 0 ? -1 : 1;
  }
  for (std::size_t e = 0; e < a.edges().size(); ++e) {
    auto [as, ad] = a.edge_endpoints(e);
    auto [bs, bd] = b.edge_endpoints(e);
    if (as != bs) return as < bs ? -1 : 1;
    if (ad != bd) return ad < bd ? -1 : 1;
    const int c = a.edges()[e].rel.compare(b.edges()[e].rel);
    if (c != 0) return c < 0 ? -1 : 1;
  }
  return 0;
}

std::string canonical_form(const AttributedGraph& g) {
  const std::size_t n = g.nodes().size();
  // Round 0: content keys.
  std::vector<std::string> sigs(n);
  for (std::size_t i = 0; i < n; ++i) {
    sigs[i] = g.node_key(i);
  }
  int n_classes = 0;
  std::vector<int> cls = compress_classes(sigs, &n_classes);
  // Refine with neighborhood signatures until the partition stabilizes.
  for (std::size_t round = 0; round < n; ++round) {
    std::vector<std::string> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> nbr;
      for (std::size_t e = 0; e < g.edges().size(); ++e) {
        auto [s, d] = g.edge_endpoints(e);
        if (s == static_cast<int>(i)) {
          nbr.push_back(">" + g.edges()[e].rel + ":" + std::to_string(cls[d]));
        }
        if (d == static_cast<int>(i)) {
          nbr.push_back("<" + g.edges()[e].rel + ":" + std::to_string(cls[s]));
        }
      }
      std::sort(nbr.begin(), nbr.end());
      std::string s = std::to_string(cls[i]);
      for (const auto& x : nbr) {
        s += '|';
        s += x;
      }
      next[i] = std::move(s);
    }
    int next_classes = 0;
    std::vector<int> refined = compress_classes(next, &next_classes);
    if (next_classes == n_classes) {
      break;
    }
    cls = std::move(refined);
    n_classes = next_classes;
  }
  // Serialize as sorted multisets keyed by class. Node entries carry the
  // full content key so classes are comparable across graphs; edges refer
  // to classes only.
  std::vector<std::string> node_entries(n);
  for (std::size_t i = 0; i < n; ++i) {
    node_entries[i] = std::to_string(cls[i]) + "=" + g.node_key(i);
  }
  std::sort(node_entries.begin(), node_entries.end());
  std::vector<std::string> edge_entries;
  edge_entries.reserve(g.edges().size());
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    auto [s, d] = g.edge_endpoints(e);
    edge_entries.push_back(std::to_string(cls[s]) + "-" + g.edges()[e].rel +
                           "->" + std::to_string(cls[d]));
  }
  std::sort(edge_entries.begin(), edge_entries.end());
  std::string out = "N[";
  for (const auto& s : node_entries) {
    out += s;
    out += ';';
  }
  out += "]E[";
  for (const auto& s : edge_entries) {
    out += s;
    out += ';';
  }
  out += ']';
  return out;
}

}  // namespace casegraph
