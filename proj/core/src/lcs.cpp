#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>

#include "casegraph/similarity.hpp"

namespace casegraph {

namespace {

using Clock = std::chrono::steady_clock;

// Sum over relations of min(count_a, count_b); both spans sorted by relation.
int matched_relation_count(std::span<const std::pair<std::string, int>> a,
                           std::span<const std::pair<std::string, int>> b) {
  int total = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first == b[j].first) {
      total += std::min(a[i].second, b[j].second);
      ++i;
      ++j;
    } else if (a[i].first < b[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return total;
}

// True when the index-order mapping x[i] -> y[i] is a full isomorphism by
// relabeling. Catches lcs(G, G) and exact duplicates without searching.
bool identical_by_index(const AttributedGraph& x, const AttributedGraph& y) {
  if (x.nodes().size() != y.nodes().size() ||
      x.edges().size() != y.edges().size()) {
    return false;
  }
  for (std::size_t i = 0; i < x.nodes().size(); ++i) {
    if (x.node_key(i) != y.node_key(i)) {
      return false;
    }
  }
  auto triples = [](const AttributedGraph& g) {
    std::vector<std::tuple<int, int, std::string>> t;
    t.reserve(g.edges().size());
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
      auto [s, d] = g.edge_endpoints(e);
      t.emplace_back(s, d, g.edges()[e].rel);
    }
    std::sort(t.begin(), t.end());
    return t;
  };
  return triples(x) == triples(y);
}

struct MatchState {
  std::vector<int> match_x;   // -2 undecided, -1 skipped, else y node index
  std::vector<char> matched_y;
  std::vector<int> matched_list;  // x nodes currently matched, in match order
  int score = 0;
};

// Edge-match gain of adding the pair (u, v) on top of the current state,
// counting ordered pairs against every already matched node and the self
// loop pair (u,u)/(v,v).
int pair_gain(const AttributedGraph& x, const AttributedGraph& y,
              const MatchState& st, int u, int v) {
  int gain = matched_relation_count(x.relations_between(u, u),
                                    y.relations_between(v, v));
  for (int w : st.matched_list) {
    const int w2 = st.match_x[w];
    gain += matched_relation_count(x.relations_between(u, w),
                                   y.relations_between(v, w2));
    gain += matched_relation_count(x.relations_between(w, u),
                                   y.relations_between(w2, v));
  }
  return gain;
}

// Greedy anytime matching: repeatedly take the compatible pair with the
// largest immediate gain. Always yields a valid common subgraph.
MatchState greedy_match(const AttributedGraph& x, const AttributedGraph& y) {
  const int n1 = static_cast<int>(x.nodes().size());
  const int n2 = static_cast<int>(y.nodes().size());
  MatchState st;
  st.match_x.assign(n1, -2);
  st.matched_y.assign(n2, 0);
  while (true) {
    int best_gain = -1, best_u = -1, best_v = -1;
    for (int u = 0; u < n1; ++u) {
      if (st.match_x[u] != -2) continue;
      for (int v = 0; v < n2; ++v) {
        if (st.matched_y[v] || x.node_key(u) != y.node_key(v)) continue;
        const int g = 1 + pair_gain(x, y, st, u, v);
        if (g > best_gain) {
          best_gain = g;
          best_u = u;
          best_v = v;
        }
      }
    }
    if (best_u < 0) break;
    st.match_x[best_u] = best_v;
    st.matched_y[best_v] = 1;
    st.matched_list.push_back(best_u);
    st.score += best_gain;
  }
  for (int u = 0; u < n1; ++u) {
    if (st.match_x[u] == -2) st.match_x[u] = -1;
  }
  return st;
}

class LcsSearch {
 public:
  LcsSearch(const AttributedGraph& x, const AttributedGraph& y,
            Clock::time_point deadline)
      : x_(x), y_(y), deadline_(deadline) {
    const int n1 = static_cast<int>(x.nodes().size());
    const int n2 = static_cast<int>(y.nodes().size());
    // Content classes shared by both sides, for the node part of the bound.
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
    const int nc = static_cast<int>(class_of.size());
    rem_x_.assign(nc, 0);
    rem_y_.assign(nc, 0);
    for (int c : class_x_) rem_x_[c]++;
    for (int c : class_y_) rem_y_[c]++;

    compat_.resize(n1);
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n2; ++j) {
        if (x.node_key(i) == y.node_key(j)) compat_[i].push_back(j);
      }
    }
    order_.resize(n1);
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](int a, int b) {
      if (x.degree(a) != x.degree(b)) return x.degree(a) > x.degree(b);
      return a < b;
    });

    incident_x_.resize(n1);
    for (std::size_t e = 0; e < x.edges().size(); ++e) {
      auto [s, d] = x.edge_endpoints(e);
      incident_x_[s].push_back(static_cast<int>(e));
      if (d != s) incident_x_[d].push_back(static_cast<int>(e));
    }
    incident_y_.resize(n2);
    for (std::size_t e = 0; e < y.edges().size(); ++e) {
      auto [s, d] = y.edge_endpoints(e);
      incident_y_[s].push_back(static_cast<int>(e));
      if (d != s) incident_y_[d].push_back(static_cast<int>(e));
    }
    pending_x_ = static_cast<int>(x.edges().size());
    pending_y_ = static_cast<int>(y.edges().size());

    st_.match_x.assign(n1, -2);
    st_.matched_y.assign(n2, 0);
  }

  // Seeds the incumbent; the search only keeps strictly better solutions,
  // so the seed itself is returned when already optimal.
  void seed(const MatchState& incumbent) {
    best_score_ = incumbent.score;
    best_match_ = incumbent.match_x;
  }

  bool run() {
    dfs(0);
    return !timed_out_;
  }

  int best_score() const { return best_score_; }
  const std::vector<int>& best_match() const { return best_match_; }

 private:
  int node_bound() const {
    int b = 0;
    for (std::size_t c = 0; c < rem_x_.size(); ++c) {
      b += std::min(rem_x_[c], rem_y_[c]);
    }
    return b;
  }

  // Called when x node u leaves the undecided set.
  void retire_x(int u, int delta) {
    rem_x_[class_x_[u]] += delta;
    for (int e : incident_x_[u]) {
      auto [s, d] = x_.edge_endpoints(e);
      const int other = (s == u) ? d : s;
      if (other == u || st_.match_x[other] != -2) pending_x_ += delta;
    }
  }

  // Called when y node v joins/leaves the matched set.
  void retire_y(int v, int delta) {
    rem_y_[class_y_[v]] += delta;
    for (int e : incident_y_[v]) {
      auto [s, d] = y_.edge_endpoints(e);
      const int other = (s == v) ? d : s;
      if (other == v || st_.matched_y[other]) pending_y_ += delta;
    }
  }

  void dfs(int pos) {
    if (timed_out_) return;
    if (++expansions_ % 1024 == 0 && Clock::now() > deadline_) {
      timed_out_ = true;
      return;
    }
    if (st_.score + node_bound() + std::min(pending_x_, pending_y_) <=
        best_score_) {
      return;
    }
    if (pos == static_cast<int>(order_.size())) {
      if (st_.score > best_score_) {
        best_score_ = st_.score;
        best_match_ = st_.match_x;
      }
      return;
    }
    const int u = order_[pos];
    // Try matches in decreasing immediate-gain order for earlier pruning.
    std::vector<std::pair<int, int>> cands;  // (-gain, v)
    for (int v : compat_[u]) {
      if (st_.matched_y[v]) continue;
      cands.emplace_back(-pair_gain(x_, y_, st_, u, v), v);
    }
    std::sort(cands.begin(), cands.end());
    for (auto [neg_gain, v] : cands) {
      const int gain = 1 - neg_gain;
      st_.match_x[u] = v;
      retire_x(u, -1);
      st_.matched_y[v] = 1;
      retire_y(v, -1);
      st_.matched_list.push_back(u);
      st_.score += gain;

      dfs(pos + 1);

      st_.score -= gain;
      st_.matched_list.pop_back();
      retire_y(v, +1);
      st_.matched_y[v] = 0;
      retire_x(u, +1);
      st_.match_x[u] = -2;
      if (timed_out_) return;
    }
    // Skip u.
    st_.match_x[u] = -1;
    retire_x(u, -1);
    dfs(pos + 1);
    retire_x(u, +1);
    st_.match_x[u] = -2;
  }

  const AttributedGraph& x_;
  const AttributedGraph& y_;
  Clock::time_point deadline_;
  std::vector<std::vector<int>> compat_;
  std::vector<int> order_;
  std::vector<int> class_x_, class_y_;
  std::vector<int> rem_x_, rem_y_;
  std::vector<std::vector<int>> incident_x_, incident_y_;
  int pending_x_ = 0, pending_y_ = 0;
  MatchState st_;
  int best_score_ = -1;
  std::vector<int> best_match_;
  long expansions_ = 0;
  bool timed_out_ = false;
};

// Builds the common subgraph induced by a node correspondence, reusing the
// x side's ids and labels.
AttributedGraph build_subgraph(const AttributedGraph& x,
                               const AttributedGraph& y,
                               const std::vector<int>& match_x) {
  std::vector<ConceptNode> nodes;
  std::vector<int> matched;
  for (std::size_t u = 0; u < match_x.size(); ++u) {
    if (match_x[u] >= 0) {
      nodes.push_back(x.nodes()[u]);
      matched.push_back(static_cast<int>(u));
    }
  }
  std::vector<RelationEdge> edges;
  for (int u : matched) {
    for (int w : matched) {
      auto a = x.relations_between(u, w);
      auto b = y.relations_between(match_x[u], match_x[w]);
      std::size_t i = 0, j = 0;
      while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
          const int m = std::min(a[i].second, b[j].second);
          for (int c = 0; c < m; ++c) {
            edges.push_back({x.nodes()[u].id, x.nodes()[w].id, a[i].first});
          }
          ++i;
          ++j;
        } else if (a[i].first < b[j].first) {
          ++i;
        } else {
          ++j;
        }
      }
    }
  }
  return AttributedGraph::from_parts(std::move(nodes), std::move(edges));
}

LcsResult finish(const AttributedGraph& x, const AttributedGraph& y,
                 const std::vector<int>& match_x, bool exact) {
  LcsResult res;
  res.subgraph = build_subgraph(x, y, match_x);
  for (std::size_t u = 0; u < match_x.size(); ++u) {
    if (match_x[u] >= 0) {
      res.node_pairs.emplace_back(static_cast<int>(u), match_x[u]);
    }
  }
  res.exact = exact;
  return res;
}

}  // namespace

LcsResult lcs(const AttributedGraph& x, const AttributedGraph& y,
              const SimilarityConfig& cfg) {
  if (x.empty() || y.empty()) {
    return {AttributedGraph{}, {}, true};
  }
  if (identical_by_index(x, y)) {
    std::vector<int> identity(x.nodes().size());
    std::iota(identity.begin(), identity.end(), 0);
    return finish(x, y, identity, true);
  }
  // Canonical orientation keeps the result (and the greedy fallback size)
  // exactly symmetric in the arguments.
  if (compare_content(x, y) > 0) {
    LcsResult res = lcs(y, x, cfg);
    for (auto& [a, b] : res.node_pairs) {
      std::swap(a, b);
    }
    std::sort(res.node_pairs.begin(), res.node_pairs.end());
    return res;
  }
  const MatchState greedy = greedy_match(x, y);
  if (x.size() > cfg.exact_size_limit || y.size() > cfg.exact_size_limit) {
    return finish(x, y, greedy.match_x, false);
  }
  const auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double>(cfg.time_budget_seconds));
  LcsSearch search(x, y, deadline);
  search.seed(greedy);
  const bool completed = search.run();
  return finish(x, y, search.best_match(), completed);
}

}  // namespace casegraph
