#include <algorithm>
#include <map>
#include <tuple>

#include "casegraph/assignment.hpp"
#include "casegraph/similarity.hpp"

namespace casegraph {

namespace {

// Gem edges are paired per (ordered gem node pair, relation) up to the
// smaller multiplicity on either side; the budget map hands those slots to
// edges in storage order.
using EdgeBudget = std::map<std::tuple<int, int, std::string>, int>;

// All components of both sides in Gem under the index-order bijection.
PartitionResult identity_partition(const AttributedGraph& x,
                                   const SimilarityConfig& cfg) {
  PartitionResult res;
  const int n = static_cast<int>(x.nodes().size());
  const int m = static_cast<int>(x.edges().size());
  for (int i = 0; i < n; ++i) {
    res.gem_x.push_back({ComponentRef::Kind::kNode, i});
    res.gem_y.push_back({ComponentRef::Kind::kNode, i});
    res.matched_pairs.emplace_back(i, i);
  }
  for (int e = 0; e < m; ++e) {
    res.gem_x.push_back({ComponentRef::Kind::kEdge, e});
    res.gem_y.push_back({ComponentRef::Kind::kEdge, e});
  }
  res.gem_weight_x = res.gem_weight_y =
      cfg.node_weight * n + cfg.edge_weight * m;
  res.value = 1.0;
  return res;
}

PartitionResult mirrored(PartitionResult r) {
  std::swap(r.gem_x, r.gem_y);
  std::swap(r.diff_x, r.diff_y);
  std::swap(r.gem_weight_x, r.gem_weight_y);
  std::swap(r.diff_weight_x, r.diff_weight_y);
  for (auto& [a, b] : r.matched_pairs) {
    std::swap(a, b);
  }
  std::sort(r.matched_pairs.begin(), r.matched_pairs.end());
  return r;
}

PartitionResult integrated_sim_oriented(const AttributedGraph& x,
                                        const AttributedGraph& y,
                                        const SimilarityConfig& cfg);

}  // namespace

PartitionResult integrated_sim(const AttributedGraph& x,
                               const AttributedGraph& y,
                               const SimilarityConfig& cfg) {
  if (x.empty() && y.empty()) {
    PartitionResult res;
    res.value = 1.0;
    return res;
  }
  // Canonical orientation makes the measure exactly symmetric; identical
  // content short-circuits to the full-Gem partition.
  const int cmp = compare_content(x, y);
  if (cmp == 0) {
    return identity_partition(x, cfg);
  }
  if (cmp > 0) {
    return mirrored(integrated_sim_oriented(y, x, cfg));
  }
  return integrated_sim_oriented(x, y, cfg);
}

namespace {

PartitionResult integrated_sim_oriented(const AttributedGraph& x,
                                        const AttributedGraph& y,
                                        const SimilarityConfig& cfg) {
  PartitionResult res;
  const int n1 = static_cast<int>(x.nodes().size());
  const int n2 = static_cast<int>(y.nodes().size());

  // Optimal one-to-one correspondence maximizing total node similarity.
  // Orientation guarantees n1 <= n2, so x provides the assignment rows.
  std::vector<int> x_to_y(n1, -1);
  if (n1 > 0 && n2 > 0) {
    std::vector<double> w(static_cast<std::size_t>(n1) * n2);
    for (int u = 0; u < n1; ++u) {
      for (int v = 0; v < n2; ++v) {
        w[static_cast<std::size_t>(u) * n2 + v] =
            node_sim(x.nodes()[u], y.nodes()[v], cfg);
      }
    }
    x_to_y = max_weight_assignment(w, n1, n2);
  }

  std::vector<char> gem_node_x(n1, 0), gem_node_y(n2, 0);
  std::vector<int> gem_partner(n1, -1);
  for (int u = 0; u < n1; ++u) {
    const int v = x_to_y[u];
    if (v < 0) continue;
    res.matched_pairs.emplace_back(u, v);
    if (node_sim(x.nodes()[u], y.nodes()[v], cfg) >= cfg.node_threshold) {
      gem_node_x[u] = 1;
      gem_node_y[v] = 1;
      gem_partner[u] = v;
    }
  }

  for (int u = 0; u < n1; ++u) {
    (gem_node_x[u] ? res.gem_x : res.diff_x)
        .push_back({ComponentRef::Kind::kNode, u});
  }
  for (int v = 0; v < n2; ++v) {
    (gem_node_y[v] ? res.gem_y : res.diff_y)
        .push_back({ComponentRef::Kind::kNode, v});
  }

  // Edge pairing budgets over gem-matched endpoint pairs.
  EdgeBudget budget_x, budget_y;
  for (int a = 0; a < n1; ++a) {
    if (!gem_node_x[a]) continue;
    for (int b = 0; b < n1; ++b) {
      if (!gem_node_x[b]) continue;
      auto r1 = x.relations_between(a, b);
      if (r1.empty()) continue;
      auto r2 = y.relations_between(gem_partner[a], gem_partner[b]);
      std::size_t i = 0, j = 0;
      while (i < r1.size() && j < r2.size()) {
        if (r1[i].first == r2[j].first) {
          const int m = std::min(r1[i].second, r2[j].second);
          budget_x[{a, b, r1[i].first}] = m;
          budget_y[{gem_partner[a], gem_partner[b], r1[i].first}] = m;
          ++i;
          ++j;
        } else if (r1[i].first < r2[j].first) {
          ++i;
        } else {
          ++j;
        }
      }
    }
  }

  auto split_edges = [](const AttributedGraph& g, EdgeBudget& budget,
                        std::vector<ComponentRef>& gem,
                        std::vector<ComponentRef>& diff) {
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
      auto [s, d] = g.edge_endpoints(e);
      auto it = budget.find({s, d, g.edges()[e].rel});
      if (it != budget.end() && it->second > 0) {
        it->second -= 1;
        gem.push_back({ComponentRef::Kind::kEdge, static_cast<int>(e)});
      } else {
        diff.push_back({ComponentRef::Kind::kEdge, static_cast<int>(e)});
      }
    }
  };
  split_edges(x, budget_x, res.gem_x, res.diff_x);
  split_edges(y, budget_y, res.gem_y, res.diff_y);

  auto weight_of = [&cfg](const std::vector<ComponentRef>& refs) {
    double w = 0.0;
    for (const auto& r : refs) {
      w += r.kind == ComponentRef::Kind::kNode ? cfg.node_weight
                                               : cfg.edge_weight;
    }
    return w;
  };
  res.gem_weight_x = weight_of(res.gem_x);
  res.diff_weight_x = weight_of(res.diff_x);
  res.gem_weight_y = weight_of(res.gem_y);
  res.diff_weight_y = weight_of(res.diff_y);

  if (x.empty() || y.empty()) {
    res.value = 0.0;
    return res;
  }
  const double frac_x = res.gem_weight_x / (res.gem_weight_x + res.diff_weight_x);
  const double frac_y = res.gem_weight_y / (res.gem_weight_y + res.diff_weight_y);
  res.value = (frac_x + frac_y) / 2.0;
  return res;
}

}  // namespace

}  // namespace casegraph
