#pragma once

#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sgi/common.hpp"
#include "sgi/graph.hpp"

namespace sgi {

// ---------------------------------------------------------------------------
// TaskConfig: a runnable task (graph + episode budget + derived page gates).

struct TaskConfig {
  std::string name;
  int episode_length = 0;
  SubtaskGraph graph;

  // Derived at finalize time.
  int n_pages = 1;
  std::vector<std::optional<int>> page_gates;  // gate of page p, p < n_pages-1

  int size() const { return graph.size(); }

  void finalize(bool runnable = true);
};

namespace detail {

// Gate of page p: the unique subtask on page p whose completion is a
// (transitive) required precondition of every subtask on page p+1. When
// several candidates qualify (a gate's own inputs also qualify through it),
// the one that requires all the others wins; ambiguity or absence means no
// gate and later pages open immediately.
inline std::vector<std::optional<int>> compute_page_gates(
    const SubtaskGraph& g, int n_pages) {
  std::vector<std::set<int>> req = required_ancestors(g);
  std::vector<std::optional<int>> gates;
  if (n_pages <= 1) return gates;
  gates.assign(std::size_t(n_pages - 1), std::nullopt);
  for (int p = 0; p + 1 < n_pages; ++p) {
    std::vector<int> next_page;
    for (int i = 0; i < g.size(); ++i)
      if (g.subtasks[std::size_t(i)].page == p + 1) next_page.push_back(i);
    if (next_page.empty()) continue;
    std::vector<int> candidates;
    for (int s = 0; s < g.size(); ++s) {
      if (g.subtasks[std::size_t(s)].page != p) continue;
      bool all = true;
      for (int t : next_page)
        if (!req[std::size_t(t)].count(s)) { all = false; break; }
      if (all) candidates.push_back(s);
    }
    if (candidates.size() == 1) {
      gates[std::size_t(p)] = candidates[0];
    } else if (candidates.size() > 1) {
      for (int c : candidates) {
        bool maximal = true;
        for (int other : candidates)
          if (other != c && !req[std::size_t(c)].count(other)) {
            maximal = false;
            break;
          }
        if (maximal) { gates[std::size_t(p)] = c; break; }
      }
    }
  }
  return gates;
}

inline int longest_required_chain(const SubtaskGraph& g) {
  auto order = topo_order(g);
  if (!order) return 0;
  std::vector<int> depth(std::size_t(g.size()), 1);
  int best = 0;
  for (int i : *order) {
    for (const Clause& c : g.preconds[std::size_t(i)].clauses)
      for (const Literal& l : c)
        if (!l.negated)
          depth[std::size_t(i)] =
              std::max(depth[std::size_t(i)], depth[std::size_t(l.index)] + 1);
    best = std::max(best, depth[std::size_t(i)]);
  }
  return best;
}

}  // namespace detail

inline void TaskConfig::finalize(bool runnable) {
  validate_graph(graph);
  bool acyclic = is_acyclic(graph);
  if (runnable && !acyclic)
    throw StructuralError("task '" + name + "': precondition graph is cyclic");
  n_pages = 1;
  for (const SubtaskSpec& s : graph.subtasks) {
    if (s.page < 0) throw StructuralError("task '" + name + "': negative page");
    n_pages = std::max(n_pages, s.page + 1);
  }
  // Inferred (non-runnable) graphs may be cyclic; they carry no page
  // structure, so gates only matter for runnable configs anyway.
  page_gates.clear();
  if (acyclic) page_gates = detail::compute_page_gates(graph, n_pages);
  else page_gates.assign(std::size_t(std::max(n_pages - 1, 0)), std::nullopt);
  if (runnable) {
    if (name.empty()) throw StructuralError("task: empty name");
    if (episode_length < 1)
      throw StructuralError("task '" + name + "': episode_length must be >= 1");
    int chain = detail::longest_required_chain(graph);
    if (episode_length < chain)
      std::cerr << "warning: task '" << name << "': episode_length "
                << episode_length << " is shorter than the longest "
                << "precondition chain (" << chain << ")\n";
  }
}

// ---------------------------------------------------------------------------
// Environment state and trajectories

struct EnvState {
  BitVec x;  // completion
  BitVec e;  // eligibility (pure function of x)
  int step_epi = 0;
  int step_phase = 0;
  int page = 0;
  bool done = false;
};

struct StepRecord {
  BitVec x;  // state before the action
  BitVec e;
  int option = 0;
  double reward = 0.0;
  bool done = false;  // episode boundary
  friend bool operator==(const StepRecord& a, const StepRecord& b) {
    return a.x == b.x && a.e == b.e && a.option == b.option &&
           a.reward == b.reward && a.done == b.done;
  }
};

using Trajectory = std::vector<StepRecord>;

struct StepResult {
  double reward = 0.0;
  bool done = false;   // did this step end the episode
  int completed = -1;  // subtask completed on this step, -1 if none
};

// Number of pages currently open, walking gates in order: a completed gate
// opens the next page, a page without a gate opens it unconditionally.
inline int page_threshold(const TaskConfig& cfg, const BitVec& x) {
  int p = 0;
  while (p < cfg.n_pages - 1) {
    const std::optional<int>& gate = cfg.page_gates[std::size_t(p)];
    if (gate && !x[std::size_t(*gate)]) break;
    ++p;
  }
  return p;
}

inline BitVec visible_set(const TaskConfig& cfg, const EnvState& st) {
  BitVec v(std::size_t(cfg.size()), 0);
  for (int i = 0; i < cfg.size(); ++i)
    v[std::size_t(i)] = cfg.graph.subtasks[std::size_t(i)].page <= st.page;
  return v;
}

// ---------------------------------------------------------------------------
// Env: executes options against one task for one phase (a budget of steps
// spanning episodes; the episode resets internally while budget remains).

class Env {
 public:
  Env(const TaskConfig& cfg, std::uint64_t seed, int phase_budget)
      : cfg_(&cfg), rng_(seed), phase_budget_(phase_budget) {
    if (phase_budget < 1) throw ContractError("Env: phase budget must be >= 1");
    st_.step_phase = phase_budget;
    episode_reset();
  }

  const TaskConfig& cfg() const { return *cfg_; }
  const EnvState& state() const { return st_; }

  BitVec visible() const { return visible_set(*cfg_, st_); }

  // eligible & visible & incomplete
  BitVec executable_mask() const {
    BitVec v = visible();
    BitVec m(std::size_t(cfg_->size()), 0);
    for (int i = 0; i < cfg_->size(); ++i)
      m[std::size_t(i)] =
          st_.e[std::size_t(i)] && v[std::size_t(i)] && !st_.x[std::size_t(i)];
    return m;
  }

  BitVec visible_incomplete_mask() const {
    BitVec v = visible();
    BitVec m(std::size_t(cfg_->size()), 0);
    for (int i = 0; i < cfg_->size(); ++i)
      m[std::size_t(i)] = v[std::size_t(i)] && !st_.x[std::size_t(i)];
    return m;
  }

  // Executes one option. Ineligible, invisible or already-completed options
  // are silent no-ops that still consume a step. Goal / failure-distractor
  // completion or an exhausted episode budget ends the episode; if phase
  // budget remains the episode resets in place.
  StepResult step(int option) {
    if (st_.done) throw ContractError("Env::step: phase is over");
    if (option < 0 || option >= cfg_->size())
      throw ContractError("Env::step: option index out of range");
    --st_.step_epi;
    --st_.step_phase;

    StepResult res;
    BitVec vis = visible();
    bool executable = !st_.x[std::size_t(option)] &&
                      st_.e[std::size_t(option)] && vis[std::size_t(option)];
    if (executable) {
      const SubtaskSpec& sp = cfg_->graph.subtasks[std::size_t(option)];
      st_.x[std::size_t(option)] = 1;
      st_.e = eligibility(cfg_->graph, st_.x);
      st_.page = page_threshold(*cfg_, st_.x);
      res.reward = rng_.normal(sp.mu, sp.sigma);
      res.completed = option;
      if (sp.kind == SubtaskKind::Goal ||
          sp.kind == SubtaskKind::FailureDistractor)
        st_.done = true;
    }
    if (st_.step_epi <= 0) st_.done = true;  // timeout: no terminal reward
    res.done = st_.done;
    if (st_.done && st_.step_phase > 0) episode_reset();
    if (st_.step_phase <= 0) st_.done = true;
    return res;
  }

 private:
  void episode_reset() {
    st_.x.assign(std::size_t(cfg_->size()), 0);
    st_.e = eligibility(cfg_->graph, st_.x);
    st_.page = page_threshold(*cfg_, st_.x);
    st_.step_epi = cfg_->episode_length;
    st_.done = false;
  }

  const TaskConfig* cfg_;
  Rng rng_;
  int phase_budget_;
  EnvState st_;
};

}  // namespace sgi
