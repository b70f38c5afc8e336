#include "casegraph/ranker.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "casegraph/errors.hpp"
#include "casegraph/parallel.hpp"
#include "casegraph/rng.hpp"
#include "json_util.hpp"

namespace casegraph {

double DecisionTree::score(const FeatureVector& fv) const {
  std::size_t node = 0;
  while (!nodes[node].is_leaf()) {
    const TreeNode& n = nodes[node];
    node = static_cast<std::size_t>(fv.at(n.feature) < n.threshold ? n.left
                                                                   : n.right);
  }
  return nodes[node].estimate;
}

std::size_t DecisionTree::split_count() const {
  std::size_t count = 0;
  for (const TreeNode& n : nodes) {
    if (!n.is_leaf()) ++count;
  }
  return count;
}

double RankingModel::score(const FeatureVector& fv) const {
  double total = 0.0;
  for (const DecisionTree& tree : trees) {
    total += tree.score(fv);
  }
  return total / static_cast<double>(trees.size());
}

namespace {

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> columns;  // [feature][item]
  std::vector<char> gold;
  // Position of the item's candidate_id in ascending order within its
  // question; the ranking tie-break.
  std::vector<int> cid_rank;
  std::vector<std::vector<std::size_t>> questions;
};

Dataset prepare_dataset(const std::vector<RankItem>& items) {
  if (items.empty()) {
    throw DataError("empty ranking dataset");
  }
  Dataset ds;
  for (const auto& [name, value] : items[0].features.values) {
    (void)value;
    ds.feature_names.push_back(name);
  }
  if (ds.feature_names.empty()) {
    throw DataError("ranking dataset has no features");
  }
  ds.columns.assign(ds.feature_names.size(),
                    std::vector<double>(items.size(), 0.0));
  ds.gold.resize(items.size());
  ds.cid_rank.assign(items.size(), 0);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const RankItem& item = items[i];
    if (item.features.values.size() != ds.feature_names.size()) {
      throw DataError("inconsistent feature names at item " +
                      item.question_id + "/" + item.candidate_id);
    }
    std::size_t f = 0;
    for (const auto& [name, value] : item.features.values) {
      if (name != ds.feature_names[f]) {
        throw DataError("inconsistent feature names at item " +
                        item.question_id + "/" + item.candidate_id +
                        ": unexpected '" + name + "'");
      }
      ds.columns[f][i] = value;
      ++f;
    }
    ds.gold[i] = item.gold_label ? 1 : 0;
  }
  std::map<std::string, std::vector<std::size_t>> by_question;
  for (std::size_t i = 0; i < items.size(); ++i) {
    by_question[items[i].question_id].push_back(i);
  }
  bool any_mixed = false;
  for (auto& [qid, indices] : by_question) {
    (void)qid;
    std::vector<std::size_t> by_cid = indices;
    std::sort(by_cid.begin(), by_cid.end(), [&](std::size_t a, std::size_t b) {
      return items[a].candidate_id < items[b].candidate_id;
    });
    for (std::size_t r = 0; r < by_cid.size(); ++r) {
      ds.cid_rank[by_cid[r]] = static_cast<int>(r);
    }
    bool has_pos = false, has_neg = false;
    for (std::size_t i : indices) {
      (ds.gold[i] ? has_pos : has_neg) = true;
    }
    any_mixed = any_mixed || (has_pos && has_neg);
    ds.questions.push_back(std::move(indices));
  }
  if (!any_mixed) {
    throw DataError(
        "degenerate ranking dataset: no question has both a positive and a "
        "negative candidate");
  }
  return ds;
}

double laplace(long long pos, long long n) {
  return static_cast<double>(pos + 1) / static_cast<double>(n + 2);
}

// Grows one rank-optimizing tree on a bag of question slots. Every split
// decision evaluates the bag's full MRR under the candidate leaf estimates.
class TreeGrower {
 public:
  TreeGrower(const Dataset& ds, const std::vector<std::size_t>& bag,
             const RankerParams& params)
      : ds_(ds), params_(params) {
    slot_range_.reserve(bag.size());
    for (std::size_t q : bag) {
      const auto& qitems = ds.questions[q];
      const std::size_t begin = items_.size();
      for (std::size_t item : qitems) {
        items_.push_back(item);
      }
      slot_range_.emplace_back(begin, items_.size());
    }
    leaf_of_.assign(items_.size(), 0);
    score_of_.assign(items_.size(), 0.0);
  }

  DecisionTree build() {
    nodes_.clear();
    nodes_.push_back(TreeNode{});
    LeafInfo root;
    root.entries.resize(items_.size());
    for (std::size_t e = 0; e < items_.size(); ++e) {
      root.entries[e] = e;
      root.n += 1;
      root.pos += ds_.gold[items_[e]];
    }
    for (std::size_t s = 0; s < slot_range_.size(); ++s) {
      root.slots.push_back(s);
    }
    nodes_[0].estimate = laplace(root.pos, root.n);
    for (std::size_t e = 0; e < items_.size(); ++e) {
      score_of_[e] = nodes_[0].estimate;
    }
    leaves_.emplace(0, std::move(root));

    slot_rr_.assign(slot_range_.size(), 0.0);
    total_rr_ = 0.0;
    for (std::size_t s = 0; s < slot_range_.size(); ++s) {
      slot_rr_[s] = current_rr(s);
      total_rr_ += slot_rr_[s];
    }

    std::size_t splits = 0;
    while (splits < params_.max_splits) {
      if (!grow_once()) break;
      ++splits;
    }
    DecisionTree tree;
    tree.nodes = nodes_;
    return tree;
  }

  double training_mrr() const {
    return total_rr_ / static_cast<double>(slot_range_.size());
  }

 private:
  struct LeafInfo {
    std::vector<std::size_t> entries;
    long long n = 0, pos = 0;
    std::vector<std::size_t> slots;  // sorted unique slots touching the leaf
  };

  struct SplitChoice {
    bool valid = false;
    double mrr = -1.0;
    double threshold = 0.0;
  };

  // Reciprocal rank of a slot under an arbitrary per-entry score function.
  template <typename ScoreFn>
  double slot_rr_under(std::size_t slot, ScoreFn&& sc) const {
    const auto [begin, end] = slot_range_[slot];
    auto better = [&](std::size_t a, std::size_t b) {
      const double sa = sc(a), sb = sc(b);
      if (sa != sb) return sa > sb;
      return ds_.cid_rank[items_[a]] < ds_.cid_rank[items_[b]];
    };
    std::size_t best_gold = end;
    for (std::size_t e = begin; e < end; ++e) {
      if (!ds_.gold[items_[e]]) continue;
      if (best_gold == end || better(e, best_gold)) best_gold = e;
    }
    if (best_gold == end) return 0.0;
    std::size_t ahead = 0;
    for (std::size_t e = begin; e < end; ++e) {
      if (e != best_gold && better(e, best_gold)) ++ahead;
    }
    return 1.0 / static_cast<double>(1 + ahead);
  }

  double current_rr(std::size_t slot) const {
    return slot_rr_under(slot, [&](std::size_t e) { return score_of_[e]; });
  }

  SplitChoice best_split_for(int leaf, std::size_t feature) const {
    const LeafInfo& info = leaves_.at(leaf);
    const std::vector<double>& column = ds_.columns[feature];
    // Sorted (value, gold) with prefix positive counts for O(log) count
    // queries per threshold.
    std::vector<std::pair<double, char>> sorted;
    sorted.reserve(info.entries.size());
    for (std::size_t e : info.entries) {
      sorted.emplace_back(column[items_[e]], ds_.gold[items_[e]]);
    }
    std::sort(sorted.begin(), sorted.end());
    std::vector<long long> pos_prefix(sorted.size() + 1, 0);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      pos_prefix[i + 1] = pos_prefix[i] + sorted[i].second;
    }
    std::vector<double> distinct;
    for (const auto& [v, g] : sorted) {
      (void)g;
      if (distinct.empty() || distinct.back() != v) distinct.push_back(v);
    }
    if (distinct.size() < 2) return {};

    std::vector<double> thresholds;
    const std::size_t gaps = distinct.size() - 1;
    if (gaps <= params_.max_thresholds) {
      for (std::size_t i = 0; i < gaps; ++i) {
        thresholds.push_back((distinct[i] + distinct[i + 1]) / 2.0);
      }
    } else {
      for (std::size_t k = 0; k < params_.max_thresholds; ++k) {
        const std::size_t i = (k + 1) * gaps / (params_.max_thresholds + 1);
        const double t = (distinct[i] + distinct[i + 1]) / 2.0;
        if (thresholds.empty() || thresholds.back() != t) {
          thresholds.push_back(t);
        }
      }
    }

    SplitChoice best;
    for (const double t : thresholds) {
      const auto lo_end = std::lower_bound(
          sorted.begin(), sorted.end(), t,
          [](const std::pair<double, char>& p, double v) { return p.first < v; });
      const long long n_lo = lo_end - sorted.begin();
      const long long n_hi = static_cast<long long>(sorted.size()) - n_lo;
      if (n_lo == 0 || n_hi == 0) continue;
      const long long pos_lo = pos_prefix[static_cast<std::size_t>(n_lo)];
      const long long pos_hi = info.pos - pos_lo;
      const double p_lo = laplace(pos_lo, n_lo);
      const double p_hi = laplace(pos_hi, n_hi);

      double new_total = total_rr_;
      for (std::size_t slot : info.slots) {
        const double rr = slot_rr_under(slot, [&](std::size_t e) {
          if (leaf_of_[e] == leaf) {
            return column[items_[e]] < t ? p_lo : p_hi;
          }
          return score_of_[e];
        });
        new_total += rr - slot_rr_[slot];
      }
      const double mrr = new_total / static_cast<double>(slot_range_.size());
      if (!best.valid || mrr > best.mrr) {
        best.valid = true;
        best.mrr = mrr;
        best.threshold = t;
      }
    }
    return best;
  }

  bool grow_once() {
    std::vector<int> leaf_ids;
    leaf_ids.reserve(leaves_.size());
    for (const auto& [id, info] : leaves_) {
      (void)info;
      leaf_ids.push_back(id);
    }
    const std::size_t n_features = ds_.feature_names.size();
    const std::size_t n_units = leaf_ids.size() * n_features;
    std::vector<SplitChoice> results(n_units);
    parallel_for(n_units, params_.parallelism, [&](std::size_t u) {
      results[u] = best_split_for(leaf_ids[u / n_features], u % n_features);
    });

    const double current_mrr = training_mrr();
    std::size_t best_unit = n_units;
    for (std::size_t u = 0; u < n_units; ++u) {
      if (!results[u].valid) continue;
      if (best_unit == n_units || results[u].mrr > results[best_unit].mrr) {
        best_unit = u;
      }
    }
    if (best_unit == n_units || results[best_unit].mrr <= current_mrr) {
      return false;
    }
    apply_split(leaf_ids[best_unit / n_features], best_unit % n_features,
                results[best_unit].threshold);
    return true;
  }

  void apply_split(int leaf, std::size_t feature, double threshold) {
    const LeafInfo info = std::move(leaves_.at(leaf));
    leaves_.erase(leaf);
    const std::vector<double>& column = ds_.columns[feature];

    const int left_id = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{});
    const int right_id = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{});

    LeafInfo left, right;
    for (std::size_t e : info.entries) {
      const bool lo = column[items_[e]] < threshold;
      LeafInfo& side = lo ? left : right;
      side.entries.push_back(e);
      side.n += 1;
      side.pos += ds_.gold[items_[e]];
      leaf_of_[e] = lo ? left_id : right_id;
    }
    nodes_[static_cast<std::size_t>(left_id)].estimate =
        laplace(left.pos, left.n);
    nodes_[static_cast<std::size_t>(right_id)].estimate =
        laplace(right.pos, right.n);
    for (std::size_t e : left.entries) {
      score_of_[e] = nodes_[static_cast<std::size_t>(left_id)].estimate;
    }
    for (std::size_t e : right.entries) {
      score_of_[e] = nodes_[static_cast<std::size_t>(right_id)].estimate;
    }

    auto split_slots = [&](LeafInfo& side) {
      std::vector<std::size_t> slots;
      for (std::size_t e : side.entries) {
        slots.push_back(slot_of(e));
      }
      std::sort(slots.begin(), slots.end());
      slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
      side.slots = std::move(slots);
    };
    split_slots(left);
    split_slots(right);

    TreeNode& parent = nodes_[static_cast<std::size_t>(leaf)];
    parent.feature = ds_.feature_names[feature];
    parent.threshold = threshold;
    parent.left = left_id;
    parent.right = right_id;

    // Same slot order and arithmetic as the candidate evaluation, so the
    // running total stays bit-identical to the chosen candidate's MRR.
    for (std::size_t slot : info.slots) {
      const double rr = current_rr(slot);
      total_rr_ += rr - slot_rr_[slot];
      slot_rr_[slot] = rr;
    }

    leaves_.emplace(left_id, std::move(left));
    leaves_.emplace(right_id, std::move(right));
  }

  std::size_t slot_of(std::size_t entry) const {
    // Entries are laid out slot by slot; binary search the range table.
    std::size_t lo = 0, hi = slot_range_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (entry < slot_range_[mid].second) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return lo;
  }

  const Dataset& ds_;
  const RankerParams& params_;
  std::vector<std::size_t> items_;  // per entry: dataset item index
  std::vector<std::pair<std::size_t, std::size_t>> slot_range_;
  std::vector<int> leaf_of_;
  std::vector<double> score_of_;
  std::vector<double> slot_rr_;
  double total_rr_ = 0.0;
  std::vector<TreeNode> nodes_;
  std::map<int, LeafInfo> leaves_;
};

}  // namespace

RankingModel train_ranker(const std::vector<RankItem>& items,
                          const RankerParams& params) {
  if (params.n_trees == 0) {
    throw ConfigError("n_trees must be positive");
  }
  if (params.max_thresholds == 0) {
    throw ConfigError("max_thresholds must be positive");
  }
  const Dataset ds = prepare_dataset(items);

  RankingModel model;
  model.params = params;
  model.feature_names = ds.feature_names;
  model.metadata["bagging"] = "question-bootstrap";
  model.metadata["monotonicity_constraints"] = "none";
  model.metadata["split_criterion"] = "training-mrr";

  const std::size_t n_questions = ds.questions.size();
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    Rng rng(mix_seed(params.seed, t));
    std::vector<std::size_t> bag(n_questions);
    for (std::size_t i = 0; i < n_questions; ++i) {
      bag[i] = static_cast<std::size_t>(rng.below(n_questions));
    }
    TreeGrower grower(ds, bag, params);
    model.trees.push_back(grower.build());
  }
  return model;
}

std::vector<RankedCandidate> rank(const RankingModel& model,
                                  const std::vector<RankItem>& candidates) {
  if (candidates.empty()) {
    throw DataError("rank needs a nonempty candidate list");
  }
  std::vector<RankedCandidate> out(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out[i] = {i, model.score(candidates[i].features)};
  }
  std::sort(out.begin(), out.end(),
            [&](const RankedCandidate& a, const RankedCandidate& b) {
              if (a.score != b.score) return a.score > b.score;
              return candidates[a.item_index].candidate_id <
                     candidates[b.item_index].candidate_id;
            });
  return out;
}

std::map<std::string, double> feature_usage(const RankingModel& model) {
  std::map<std::string, long long> counts;
  long long total = 0;
  for (const DecisionTree& tree : model.trees) {
    for (const TreeNode& node : tree.nodes) {
      if (!node.is_leaf()) {
        counts[node.feature] += 1;
        total += 1;
      }
    }
  }
  std::map<std::string, double> out;
  if (total == 0) return out;
  for (const auto& [name, count] : counts) {
    out[name] = static_cast<double>(count) / static_cast<double>(total);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model persistence
// ---------------------------------------------------------------------------

namespace {
constexpr const char* kModelFormat = "casegraph-ranker-v1";
}

std::string serialize_model(const RankingModel& model) {
  detail::json jtrees = detail::json::array();
  for (const DecisionTree& tree : model.trees) {
    detail::json jnodes = detail::json::array();
    for (const TreeNode& node : tree.nodes) {
      if (node.is_leaf()) {
        jnodes.push_back({{"estimate", node.estimate}});
      } else {
        jnodes.push_back({{"feature", node.feature},
                          {"threshold", node.threshold},
                          {"left", node.left},
                          {"right", node.right}});
      }
    }
    jtrees.push_back({{"nodes", jnodes}});
  }
  detail::json j{
      {"format", kModelFormat},
      {"params",
       {{"n_trees", model.params.n_trees},
        {"max_splits", model.params.max_splits},
        {"seed", model.params.seed},
        {"max_thresholds", model.params.max_thresholds}}},
      {"feature_names", model.feature_names},
      {"metadata", model.metadata},
      {"trees", jtrees}};
  return j.dump(2) + "\n";
}

RankingModel parse_model(std::string_view text) {
  const detail::json j = detail::parse_json(text, "model");
  if (detail::require_string(j, "format", "model") != kModelFormat) {
    throw ParseError("model: unsupported format");
  }
  try {
    RankingModel model;
    const detail::json& params = detail::require_field(j, "params", "model");
    model.params.n_trees = params.at("n_trees").get<std::size_t>();
    model.params.max_splits = params.at("max_splits").get<std::size_t>();
    model.params.seed = params.at("seed").get<std::uint64_t>();
    model.params.max_thresholds =
        params.at("max_thresholds").get<std::size_t>();
    for (const auto& name :
         detail::require_field(j, "feature_names", "model")) {
      model.feature_names.push_back(name.get<std::string>());
    }
    if (auto it = j.find("metadata"); it != j.end()) {
      for (const auto& [k, v] : it->items()) {
        model.metadata[k] = v.get<std::string>();
      }
    }
    for (const auto& jtree : detail::require_field(j, "trees", "model")) {
      DecisionTree tree;
      for (const auto& jnode : detail::require_field(jtree, "nodes", "tree")) {
        TreeNode node;
        if (auto it = jnode.find("feature"); it != jnode.end()) {
          node.feature = it->get<std::string>();
          node.threshold = jnode.at("threshold").get<double>();
          node.left = jnode.at("left").get<int>();
          node.right = jnode.at("right").get<int>();
        } else {
          node.estimate = jnode.at("estimate").get<double>();
        }
        tree.nodes.push_back(std::move(node));
      }
      if (tree.nodes.empty()) {
        throw ParseError("model: tree with no nodes");
      }
      for (const TreeNode& node : tree.nodes) {
        if (!node.is_leaf() &&
            (node.left < 0 || node.right < 0 ||
             node.left >= static_cast<int>(tree.nodes.size()) ||
             node.right >= static_cast<int>(tree.nodes.size()))) {
          throw ParseError("model: split node with dangling child index");
        }
      }
      model.trees.push_back(std::move(tree));
    }
    if (model.trees.empty()) {
      throw ParseError("model: no trees");
    }
    return model;
  } catch (const detail::json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

void save_model(const RankingModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot open output file: " + path);
  }
  out << serialize_model(model);
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

RankingModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open model file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace casegraph
