#include <algorithm>
#include <chrono>
#include <numeric>
#include <queue>

#include "casegraph/assignment.hpp"
#include "casegraph/similarity.hpp"

namespace casegraph {

namespace {

using Clock = std::chrono::steady_clock;

// Substitutions are never charged above delete + insert, keeping the
// mapping-based minimum equal to the cheapest edit sequence.
double node_sub_cost(const EditCosts& c) {
  return std::min(c.node_substitute, c.node_delete + c.node_insert);
}
double edge_sub_cost(const EditCosts& c) {
  return std::min(c.edge_substitute, c.edge_delete + c.edge_insert);
}

int total_count(std::span<const std::pair<std::string, int>> rels) {
  int t = 0;
  for (const auto& [rel, c] : rels) {
    (void)rel;
    t += c;
  }
  return t;
}

// Cost of reconciling the relation multisets of one ordered node pair:
// equal relations match free, leftovers are substituted while both sides
// last, the rest deleted/inserted.
double pair_edge_cost(std::span<const std::pair<std::string, int>> r1,
                      std::span<const std::pair<std::string, int>> r2,
                      const EditCosts& c) {
  int matched = 0;
  std::size_t i = 0, j = 0;
  while (i < r1.size() && j < r2.size()) {
    if (r1[i].first == r2[j].first) {
      matched += std::min(r1[i].second, r2[j].second);
      ++i;
      ++j;
    } else if (r1[i].first < r2[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  const int l1 = total_count(r1) - matched;
  const int l2 = total_count(r2) - matched;
  const int subs = std::min(l1, l2);
  return edge_sub_cost(c) * subs + c.edge_delete * (l1 - subs) +
         c.edge_insert * (l2 - subs);
}

// Exact cost induced by a complete node mapping (-1 = deleted).
double mapping_cost(const AttributedGraph& x, const AttributedGraph& y,
                    const std::vector<int>& map, const EditCosts& c) {
  const int n1 = static_cast<int>(x.nodes().size());
  const int n2 = static_cast<int>(y.nodes().size());
  std::vector<char> is_image(n2, 0);
  double cost = 0.0;
  for (int u = 0; u < n1; ++u) {
    if (map[u] < 0) {
      cost += c.node_delete;
    } else {
      is_image[map[u]] = 1;
      if (x.node_key(u) != y.node_key(map[u])) {
        cost += node_sub_cost(c);
      }
    }
  }
  for (int v = 0; v < n2; ++v) {
    if (!is_image[v]) cost += c.node_insert;
  }
  for (int a = 0; a < n1; ++a) {
    for (int b = 0; b < n1; ++b) {
      auto r1 = x.relations_between(a, b);
      if (map[a] >= 0 && map[b] >= 0) {
        cost += pair_edge_cost(r1, y.relations_between(map[a], map[b]), c);
      } else {
        cost += c.edge_delete * total_count(r1);
      }
    }
  }
  for (std::size_t e = 0; e < y.edges().size(); ++e) {
    auto [s, d] = y.edge_endpoints(e);
    if (!is_image[s] || !is_image[d]) cost += c.edge_insert;
  }
  return cost;
}

// Assignment-based upper bound: solve a linear assignment over node
// substitution costs with a degree-difference hint, then price the induced
// complete mapping exactly.
double assignment_upper_bound(const AttributedGraph& x,
                              const AttributedGraph& y, const EditCosts& c) {
  const int n1 = static_cast<int>(x.nodes().size());
  const int n2 = static_cast<int>(y.nodes().size());
  const int n = n1 + n2;
  if (n == 0) {
    return c.edge_insert * static_cast<double>(y.edges().size()) +
           c.edge_delete * static_cast<double>(x.edges().size());
  }
  const double big = 1e18;
  std::vector<double> cost(static_cast<std::size_t>(n) * n, 0.0);
  auto at = [&](int i, int j) -> double& {
    return cost[static_cast<std::size_t>(i) * n + j];
  };
  for (int u = 0; u < n1; ++u) {
    for (int v = 0; v < n2; ++v) {
      const double sub = x.node_key(u) == y.node_key(v) ? 0.0 : node_sub_cost(c);
      const double deg_gap =
          0.5 * (c.edge_delete * std::max(0, x.degree(u) - y.degree(v)) +
                 c.edge_insert * std::max(0, y.degree(v) - x.degree(u)));
      at(u, v) = sub + deg_gap;
    }
    for (int j = 0; j < n1; ++j) {
      at(u, n2 + j) = (j == u)
                          ? c.node_delete + 0.5 * c.edge_delete * x.degree(u)
                          : big;
    }
  }
  for (int i = 0; i < n2; ++i) {
    for (int v = 0; v < n2; ++v) {
      at(n1 + i, v) = (v == i)
                          ? c.node_insert + 0.5 * c.edge_insert * y.degree(i)
                          : big;
    }
  }
  const std::vector<int> assign = min_cost_assignment(cost, n, n);
  std::vector<int> map(n1, -1);
  for (int u = 0; u < n1; ++u) {
    if (assign[u] < n2) map[u] = assign[u];
  }
  return mapping_cost(x, y, map, c);
}

struct SearchState {
  double f = 0.0;  // g + h
  double g = 0.0;
  int depth = 0;
  std::vector<int> map;  // decided prefix in branch order; -1 = deleted

  bool operator>(const SearchState& o) const { return f > o.f; }
};

class EditSearch {
 public:
  EditSearch(const AttributedGraph& x, const AttributedGraph& y,
             const EditCosts& costs, Clock::time_point deadline)
      : x_(x), y_(y), c_(costs), deadline_(deadline) {
    const int n1 = static_cast<int>(x.nodes().size());
    const int n2 = static_cast<int>(y.nodes().size());
    order_.resize(n1);
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](int a, int b) {
      if (x.degree(a) != x.degree(b)) return x.degree(a) > x.degree(b);
      return a < b;
    });
    std::map<std::string, int> class_of;
    class_x_.resize(n1);
    class_y_.resize(n2);
    for (int i = 0; i < n1; ++i) {
      auto [it, _] = class_of.emplace(x.node_key(i), class_of.size());
      class_x_[i] = it->second;
    }
    for (int j = 0; j < n2; ++j) {
      auto [it, _] = class_of.emplace(y.node_key(j), class_of.size());
      class_y_[j] = it->second;
    }
    n_classes_ = static_cast<int>(class_of.size());
  }

  // Returns the optimal cost, or the seeded upper bound on timeout
  // (completed_ tells which).
  double run(double upper_bound) {
    std::priority_queue<SearchState, std::vector<SearchState>,
                        std::greater<SearchState>>
        open;
    SearchState root;
    root.g = 0.0;
    root.depth = 0;
    root.f = heuristic(root);
    open.push(root);
    long expansions = 0;
    while (!open.empty()) {
      if (++expansions % 256 == 0 && Clock::now() > deadline_) {
        completed_ = false;
        return upper_bound;
      }
      SearchState st = open.top();
      open.pop();
      if (st.depth == static_cast<int>(order_.size())) {
        completed_ = true;
        return st.g;
      }
      const int u = order_[st.depth];
      std::vector<char> taken(y_.nodes().size(), 0);
      for (int j : st.map) {
        if (j >= 0) taken[j] = 1;
      }
      for (int v = -1; v < static_cast<int>(y_.nodes().size()); ++v) {
        if (v >= 0 && taken[v]) continue;
        SearchState next = st;
        next.map.push_back(v);
        next.depth = st.depth + 1;
        next.g = st.g + step_cost(st, u, v);
        if (next.depth == static_cast<int>(order_.size())) {
          next.g += terminal_cost(next);
        }
        next.f = next.g + heuristic(next);
        // Slack absorbs last-ulp rounding of the heuristic against the
        // seeded bound; the returned value is always an exact g.
        if (next.f <= upper_bound + 1e-9) {
          open.push(std::move(next));
        }
      }
    }
    completed_ = true;
    return upper_bound;
  }

  bool completed() const { return completed_; }

 private:
  // Cost of deciding node u (branch position st.depth) as v (-1 = delete),
  // finalizing edge pairs against previously decided nodes.
  double step_cost(const SearchState& st, int u, int v) const {
    double cost = 0.0;
    if (v < 0) {
      cost += c_.node_delete;
      cost += c_.edge_delete * total_count(x_.relations_between(u, u));
      for (int k = 0; k < st.depth; ++k) {
        const int w = order_[k];
        cost += c_.edge_delete * (total_count(x_.relations_between(u, w)) +
                                  total_count(x_.relations_between(w, u)));
      }
      return cost;
    }
    if (x_.node_key(u) != y_.node_key(v)) {
      cost += node_sub_cost(c_);
    }
    cost += pair_edge_cost(x_.relations_between(u, u),
                           y_.relations_between(v, v), c_);
    for (int k = 0; k < st.depth; ++k) {
      const int w = order_[k];
      const int w2 = st.map[k];
      if (w2 < 0) {
        cost += c_.edge_delete * (total_count(x_.relations_between(u, w)) +
                                  total_count(x_.relations_between(w, u)));
      } else {
        cost += pair_edge_cost(x_.relations_between(u, w),
                               y_.relations_between(v, w2), c_);
        cost += pair_edge_cost(x_.relations_between(w, u),
                               y_.relations_between(w2, v), c_);
      }
    }
    return cost;
  }

  // Insertions owed once every x node is decided: unmatched y nodes and
  // y edges touching them.
  double terminal_cost(const SearchState& st) const {
    std::vector<char> is_image(y_.nodes().size(), 0);
    for (int j : st.map) {
      if (j >= 0) is_image[j] = 1;
    }
    double cost = 0.0;
    for (std::size_t v = 0; v < y_.nodes().size(); ++v) {
      if (!is_image[v]) cost += c_.node_insert;
    }
    for (std::size_t e = 0; e < y_.edges().size(); ++e) {
      auto [s, d] = y_.edge_endpoints(e);
      if (!is_image[s] || !is_image[d]) cost += c_.edge_insert;
    }
    return cost;
  }

  // Admissible lower bound on the remaining cost: class-count node bound
  // plus pending-edge imbalance.
  double heuristic(const SearchState& st) const {
    const int n1 = static_cast<int>(order_.size());
    if (st.depth == n1) return 0.0;
    std::vector<int> rem_x(n_classes_, 0), rem_y(n_classes_, 0);
    for (int k = st.depth; k < n1; ++k) rem_x[class_x_[order_[k]]]++;
    std::vector<char> taken(y_.nodes().size(), 0);
    for (int j : st.map) {
      if (j >= 0) taken[j] = 1;
    }
    int r2 = 0;
    for (std::size_t v = 0; v < y_.nodes().size(); ++v) {
      if (!taken[v]) {
        rem_y[class_y_[v]]++;
        ++r2;
      }
    }
    const int r1 = n1 - st.depth;
    int zero_pairs = 0;
    for (int cidx = 0; cidx < n_classes_; ++cidx) {
      zero_pairs += std::min(rem_x[cidx], rem_y[cidx]);
    }
    const int a = std::min(r1, r2);
    double h = c_.node_delete * (r1 - a) + c_.node_insert * (r2 - a) +
               node_sub_cost(c_) * std::max(0, a - zero_pairs);

    // Pending edges: x edges with an undecided endpoint, y edges with an
    // unmatched endpoint. Matches and substitutions pair them one to one.
    std::vector<char> decided(x_.nodes().size(), 0);
    for (int k = 0; k < st.depth; ++k) decided[order_[k]] = 1;
    int px = 0;
    for (std::size_t e = 0; e < x_.edges().size(); ++e) {
      auto [s, d] = x_.edge_endpoints(e);
      if (!decided[s] || !decided[d]) ++px;
    }
    int py = 0;
    for (std::size_t e = 0; e < y_.edges().size(); ++e) {
      auto [s, d] = y_.edge_endpoints(e);
      if (!taken[s] || !taken[d]) ++py;
    }
    h += c_.edge_delete * std::max(0, px - py) +
         c_.edge_insert * std::max(0, py - px);
    return h;
  }

  const AttributedGraph& x_;
  const AttributedGraph& y_;
  const EditCosts& c_;
  Clock::time_point deadline_;
  std::vector<int> order_;
  std::vector<int> class_x_, class_y_;
  int n_classes_ = 0;
  bool completed_ = true;
};

bool structurally_identical(const AttributedGraph& x,
                            const AttributedGraph& y) {
  if (x.nodes().size() != y.nodes().size() ||
      x.edges().size() != y.edges().size()) {
    return false;
  }
  for (std::size_t i = 0; i < x.nodes().size(); ++i) {
    if (x.node_key(i) != y.node_key(i)) return false;
  }
  std::vector<std::tuple<int, int, std::string>> tx, ty;
  for (std::size_t e = 0; e < x.edges().size(); ++e) {
    auto [s, d] = x.edge_endpoints(e);
    tx.emplace_back(s, d, x.edges()[e].rel);
  }
  for (std::size_t e = 0; e < y.edges().size(); ++e) {
    auto [s, d] = y.edge_endpoints(e);
    ty.emplace_back(s, d, y.edges()[e].rel);
  }
  std::sort(tx.begin(), tx.end());
  std::sort(ty.begin(), ty.end());
  return tx == ty;
}

}  // namespace

EditDistanceResult edit_distance(const AttributedGraph& x,
                                 const AttributedGraph& y,
                                 const SimilarityConfig& cfg) {
  const EditCosts& c = cfg.edit;
  if (structurally_identical(x, y)) {
    return {0.0, true};
  }
  // When insert and delete cost the same per kind the distance is
  // direction-free; canonical orientation then makes it exactly symmetric
  // on the approximate path too.
  if (c.node_insert == c.node_delete && c.edge_insert == c.edge_delete &&
      compare_content(x, y) > 0) {
    return edit_distance(y, x, cfg);
  }
  if (x.empty()) {
    return {c.node_insert * static_cast<double>(y.nodes().size()) +
                c.edge_insert * static_cast<double>(y.edges().size()),
            true};
  }
  if (y.empty()) {
    return {c.node_delete * static_cast<double>(x.nodes().size()) +
                c.edge_delete * static_cast<double>(x.edges().size()),
            true};
  }
  const double upper = assignment_upper_bound(x, y, c);
  if (x.size() > cfg.exact_size_limit || y.size() > cfg.exact_size_limit) {
    return {upper, false};
  }
  const auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double>(cfg.time_budget_seconds));
  EditSearch search(x, y, c, deadline);
  const double cost = search.run(upper);
  return {cost, search.completed()};
}

}  // namespace casegraph
