#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sgi/common.hpp"
#include "sgi/env.hpp"
#include "sgi/graph.hpp"

namespace sgi {

// ---------------------------------------------------------------------------
// Dataset: one row per distinct completion vector observed in a trajectory,
// labeled with the co-observed eligibility vector.

struct LabeledDataset {
  std::vector<BitVec> rows;    // completion vectors
  std::vector<BitVec> labels;  // labels[r][i]: eligibility of subtask i

  int n_subtasks() const { return rows.empty() ? 0 : int(rows[0].size()); }
};

inline LabeledDataset extract_dataset(const Trajectory& traj) {
  if (traj.empty()) throw DataError("extract_dataset: empty trajectory");
  std::map<BitVec, BitVec> seen;
  for (const StepRecord& rec : traj) {
    auto [it, inserted] = seen.emplace(rec.x, rec.e);
    if (!inserted && it->second != rec.e)
      throw DataError(
          "extract_dataset: conflicting eligibility labels for one "
          "completion vector");
  }
  LabeledDataset ds;
  ds.rows.reserve(seen.size());
  ds.labels.reserve(seen.size());
  for (auto& [x, e] : seen) {
    ds.rows.push_back(x);
    ds.labels.push_back(e);
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Binary CART with Gini impurity over bit features.

struct TreeNode {
  int feature = -1;      // split feature; -1 marks a leaf
  int lo = -1, hi = -1;  // children for feature == 0 / == 1
  bool leaf_value = false;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root, if any

  bool predict(const BitVec& x) const {
    int cur = 0;
    for (;;) {
      const TreeNode& nd = nodes[std::size_t(cur)];
      if (nd.feature < 0) return nd.leaf_value;
      cur = x[std::size_t(nd.feature)] ? nd.hi : nd.lo;
    }
  }
};

namespace detail {

inline double gini(long pos, long total) {
  if (total == 0) return 0.0;
  double p = double(pos) / double(total);
  return 2.0 * p * (1.0 - p);
}

// Recursive split. Grows until leaves are pure, choosing the split with the
// lowest weighted child impurity (ties toward the lowest feature index) among
// splits that actually partition the rows; zero-gain splits are taken while
// the node is impure so consistent data is always fit exactly.
inline int grow_tree(const std::vector<BitVec>& rows,
                     const std::vector<std::uint8_t>& y,
                     std::vector<int>& idx, int exclude_feature,
                     DecisionTree& tree) {
  long pos = 0;
  for (int r : idx) pos += y[std::size_t(r)];
  int node = int(tree.nodes.size());
  tree.nodes.emplace_back();
  if (pos == 0 || pos == long(idx.size())) {
    tree.nodes[std::size_t(node)].leaf_value = pos != 0;
    return node;
  }

  int n_features = int(rows[0].size());
  int best_f = -1;
  double best_impurity = 0.0;
  for (int f = 0; f < n_features; ++f) {
    if (f == exclude_feature) continue;
    long n1 = 0, pos1 = 0;
    for (int r : idx) {
      if (rows[std::size_t(r)][std::size_t(f)]) {
        ++n1;
        pos1 += y[std::size_t(r)];
      }
    }
    long n0 = long(idx.size()) - n1;
    if (n0 == 0 || n1 == 0) continue;  // does not partition
    long pos0 = pos - pos1;
    double imp = (double(n0) * gini(pos0, n0) + double(n1) * gini(pos1, n1)) /
                 double(idx.size());
    if (best_f < 0 || imp < best_impurity - 1e-12) {
      best_f = f;
      best_impurity = imp;
    }
  }

  if (best_f < 0) {
    // No partitioning split left (inconsistent duplicate rows); majority
    // label, ties toward false.
    tree.nodes[std::size_t(node)].leaf_value = pos * 2 > long(idx.size());
    return node;
  }

  std::vector<int> left, right;
  for (int r : idx)
    (rows[std::size_t(r)][std::size_t(best_f)] ? right : left).push_back(r);
  idx.clear();
  idx.shrink_to_fit();
  int lo = grow_tree(rows, y, left, exclude_feature, tree);
  int hi = grow_tree(rows, y, right, exclude_feature, tree);
  tree.nodes[std::size_t(node)].feature = best_f;
  tree.nodes[std::size_t(node)].lo = lo;
  tree.nodes[std::size_t(node)].hi = hi;
  return node;
}

}  // namespace detail

// Fits the eligibility of one subtask as a function of the completion vector.
// The subtask's own completion bit is excluded from candidate splits.
inline DecisionTree fit_cart(const LabeledDataset& ds, int subtask) {
  if (ds.rows.empty()) throw DataError("fit_cart: empty dataset");
  if (subtask < 0 || subtask >= ds.n_subtasks())
    throw ContractError("fit_cart: subtask index out of range");
  std::vector<std::uint8_t> y(ds.rows.size());
  for (std::size_t r = 0; r < ds.rows.size(); ++r)
    y[r] = ds.labels[r][std::size_t(subtask)];
  std::vector<int> idx(ds.rows.size());
  for (std::size_t r = 0; r < idx.size(); ++r) idx[r] = int(r);
  DecisionTree tree;
  detail::grow_tree(ds.rows, y, idx, subtask, tree);
  return tree;
}

// ---------------------------------------------------------------------------
// Tree -> sum-of-products precondition. Each path to a TRUE leaf becomes a
// clause (the 0-branch contributes a negated literal). Clauses are
// canonicalized, de-duplicated and absorption-filtered; a TRUE root becomes
// ALWAYS-TRUE and a tree with no TRUE leaf becomes `never`.

inline Precondition tree_to_sop(const DecisionTree& tree) {
  Precondition pre;
  Clause path;
  bool any_true = false, tautology = false;

  std::function<void(int)> dfs = [&](int node) {
    const TreeNode& nd = tree.nodes[std::size_t(node)];
    if (nd.feature < 0) {
      if (nd.leaf_value) {
        any_true = true;
        if (path.empty())
          tautology = true;
        else
          pre.clauses.push_back(path);
      }
      return;
    }
    path.push_back(Literal{nd.feature, true});
    dfs(nd.lo);
    path.back().negated = false;
    dfs(nd.hi);
    path.pop_back();
  };
  dfs(0);

  if (tautology) return Precondition{};  // ALWAYS-TRUE
  if (!any_true) {
    Precondition never;
    never.never = true;
    return never;
  }
  for (Clause& c : pre.clauses) std::sort(c.begin(), c.end());
  std::sort(pre.clauses.begin(), pre.clauses.end());
  pre.clauses.erase(std::unique(pre.clauses.begin(), pre.clauses.end()),
                    pre.clauses.end());
  // Absorption: drop clauses containing another clause's literal set.
  std::vector<Clause> kept;
  for (std::size_t i = 0; i < pre.clauses.size(); ++i) {
    bool absorbed = false;
    for (std::size_t j = 0; j < pre.clauses.size() && !absorbed; ++j) {
      if (i == j) continue;
      const Clause& small = pre.clauses[j];
      const Clause& big = pre.clauses[i];
      if (small.size() > big.size()) continue;
      if (small.size() == big.size() && j > i) continue;  // keep one of equals
      absorbed = std::includes(big.begin(), big.end(), small.begin(),
                               small.end());
    }
    if (!absorbed) kept.push_back(pre.clauses[i]);
  }
  pre.clauses = std::move(kept);
  return pre;
}

// ---------------------------------------------------------------------------
// Reward statistics over eligible executions of each subtask.

struct RewardEstimate {
  double mu = 0.0;
  double sigma = 0.0;
  long count = 0;
};

inline std::vector<RewardEstimate> infer_rewards(const Trajectory& traj,
                                                 int n_subtasks) {
  std::vector<double> sum(std::size_t(n_subtasks), 0.0);
  std::vector<double> sumsq(std::size_t(n_subtasks), 0.0);
  std::vector<long> cnt(std::size_t(n_subtasks), 0);
  for (const StepRecord& rec : traj) {
    if (rec.option < 0 || rec.option >= n_subtasks)
      throw DataError("infer_rewards: option index out of range");
    if (!rec.e[std::size_t(rec.option)]) continue;
    sum[std::size_t(rec.option)] += rec.reward;
    sumsq[std::size_t(rec.option)] += rec.reward * rec.reward;
    ++cnt[std::size_t(rec.option)];
  }
  std::vector<RewardEstimate> out(static_cast<std::size_t>(n_subtasks));
  for (int i = 0; i < n_subtasks; ++i) {
    if (cnt[std::size_t(i)] == 0) continue;
    double mu = sum[std::size_t(i)] / double(cnt[std::size_t(i)]);
    double var = sumsq[std::size_t(i)] / double(cnt[std::size_t(i)]) - mu * mu;
    out[std::size_t(i)] =
        RewardEstimate{mu, std::sqrt(std::max(var, 0.0)),
                       cnt[std::size_t(i)]};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full graph inference from one adaptation trajectory.

inline SubtaskGraph infer_graph(const Trajectory& traj,
                                const std::vector<std::string>& names) {
  int n = int(names.size());
  if (n == 0) throw ContractError("infer_graph: no subtask names");
  if (!traj.empty() && int(traj.front().x.size()) != n)
    throw AlignmentError("infer_graph: trajectory width != name count");

  SubtaskGraph g;
  g.subtasks.resize(std::size_t(n));
  g.preconds.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    g.subtasks[std::size_t(i)].name = names[std::size_t(i)];
    g.subtasks[std::size_t(i)].kind = SubtaskKind::Normal;
    g.subtasks[std::size_t(i)].page = 0;
  }
  if (traj.empty()) return g;  // degenerate: ALWAYS-TRUE, zero rewards

  LabeledDataset ds = extract_dataset(traj);
  for (int i = 0; i < n; ++i)
    g.preconds[std::size_t(i)] = tree_to_sop(fit_cart(ds, i));

  std::vector<RewardEstimate> rew = infer_rewards(traj, n);
  for (int i = 0; i < n; ++i) {
    g.subtasks[std::size_t(i)].mu = rew[std::size_t(i)].mu;
    g.subtasks[std::size_t(i)].sigma = rew[std::size_t(i)].sigma;
  }

  // Kind recovery from terminal rewards: a completion that ended the episode
  // with positive reward marks the goal, with negative reward a failure
  // distractor. Timeouts carry no terminal reward and stay Normal.
  for (const StepRecord& rec : traj) {
    if (!rec.done || rec.reward == 0.0) continue;
    if (!rec.e[std::size_t(rec.option)] || rec.x[std::size_t(rec.option)])
      continue;
    g.subtasks[std::size_t(rec.option)].kind =
        rec.reward > 0 ? SubtaskKind::Goal : SubtaskKind::FailureDistractor;
  }
  return g;
}

}  // namespace sgi
