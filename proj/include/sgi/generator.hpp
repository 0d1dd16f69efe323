#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "sgi/common.hpp"
#include "sgi/env.hpp"
#include "sgi/graph.hpp"

namespace sgi {

// ---------------------------------------------------------------------------
// Parameters for the synthetic checkout-style task generator.

struct GenParams {
  int n_subtasks = 40;
  int n_pages = 5;
  int max_clause = 3;   // literal budget per random field clause
  int max_clauses = 2;  // clause budget per field precondition
  double neg_prob = 0.15;
  int n_failure_distractors = 2;
  int n_noop_distractors = 3;
  std::uint64_t seed = 0;

  void check() const {
    if (n_pages < 1 || n_subtasks < n_pages)
      throw GenerationError("GenParams: need n_subtasks >= n_pages >= 1");
    if (max_clause < 1 || max_clauses < 1)
      throw GenerationError("GenParams: clause budgets must be >= 1");
    if (neg_prob < 0.0 || neg_prob > 1.0)
      throw GenerationError("GenParams: neg_prob outside [0, 1]");
    if (n_failure_distractors < 0 || n_noop_distractors < 0)
      throw GenerationError("GenParams: negative distractor count");
  }
};

namespace detail {

// Role plan shared by a family of twin tasks: how many fields each page has,
// where the distractors live, and the name attached to every role. Twins
// keep the plan and redraw the wiring.
struct FamilyPlan {
  std::vector<int> fields_per_page;
  std::vector<int> failure_pages, noop_pages;
  std::vector<std::vector<std::string>> field_names;
  std::vector<std::string> gate_names;
  std::string goal_name;
  std::vector<std::string> failure_names, noop_names;
};

inline std::string numbered(const char* stem, const char* const* words,
                            int n_words, int j) {
  std::string name = std::string(stem) + words[j % n_words];
  if (j >= n_words) name += "_" + std::to_string(j / n_words + 1);
  return name;
}

inline FamilyPlan make_plan(const GenParams& prm, Rng& rng) {
  prm.check();
  int pages = prm.n_pages;
  int fields_total = prm.n_subtasks - 1 - prm.n_failure_distractors -
                     prm.n_noop_distractors - (pages - 1);
  if (fields_total < pages)
    throw GenerationError(
        "GenParams: n_subtasks too small for one field per page plus gates, "
        "goal and distractors");

  FamilyPlan plan;
  plan.fields_per_page.assign(std::size_t(pages), 1);
  for (int k = fields_total - pages; k > 0; --k)
    ++plan.fields_per_page[std::size_t(rng.uniform_int(std::uint64_t(pages)))];
  // Failure distractors sit on the landing page with no precondition, like
  // ever-present external links; tying them to a page gate would make the
  // gate's completion look harmful to a propagation policy.
  plan.failure_pages.assign(std::size_t(prm.n_failure_distractors), 0);
  for (int k = 0; k < prm.n_noop_distractors; ++k)
    plan.noop_pages.push_back(int(rng.uniform_int(std::uint64_t(pages))));

  static const char* kFieldWords[] = {
      "email",   "name",   "street", "city",   "zip",    "phone", "card",
      "cvv",     "expiry", "coupon", "quantity", "size",  "color", "gift",
      "note",    "state",  "country", "company", "suite", "nickname"};
  static const char* kFailureWords[] = {"terms", "help", "contact", "privacy",
                                        "careers"};
  static const char* kNoopWords[] = {"subscribe", "banner", "logo", "zoom",
                                     "review"};
  int j = 0;
  plan.field_names.resize(std::size_t(pages));
  for (int p = 0; p < pages; ++p)
    for (int f = 0; f < plan.fields_per_page[std::size_t(p)]; ++f)
      plan.field_names[std::size_t(p)].push_back(
          numbered("fill_", kFieldWords, 20, j++));
  for (int p = 0; p + 1 < pages; ++p)
    plan.gate_names.push_back("click_continue_" + std::to_string(p));
  plan.goal_name = "click_place_order";
  for (int k = 0; k < prm.n_failure_distractors; ++k)
    plan.failure_names.push_back(numbered("click_", kFailureWords, 5, k));
  for (int k = 0; k < prm.n_noop_distractors; ++k)
    plan.noop_names.push_back(numbered("click_", kNoopWords, 5, k));
  return plan;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Greedy topological oracle: a concrete option sequence reaching the goal,
// choosing the cheapest clause per needed subtask and executing the positive
// closure in topological order. Throws GenerationError when no plan exists.

inline std::vector<int> greedy_solve(const TaskConfig& cfg) {
  const SubtaskGraph& g = cfg.graph;
  int goal = -1;
  for (int i = 0; i < g.size(); ++i)
    if (g.subtasks[std::size_t(i)].kind == SubtaskKind::Goal) {
      if (goal >= 0) throw StructuralError("greedy_solve: multiple goals");
      goal = i;
    }
  if (goal < 0) throw StructuralError("greedy_solve: no goal subtask");

  std::set<int> need{goal};
  std::vector<int> stack{goal};
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    const Precondition& pre = g.preconds[std::size_t(t)];
    if (pre.never)
      throw GenerationError("greedy_solve: needed subtask is never eligible");
    if (pre.clauses.empty()) continue;
    const Clause* best = nullptr;
    std::size_t best_pos = 0;
    for (const Clause& c : pre.clauses) {
      std::size_t n_pos = 0;
      for (const Literal& l : c) n_pos += !l.negated;
      if (!best || n_pos < best_pos) {
        best = &c;
        best_pos = n_pos;
      }
    }
    for (const Literal& l : *best) {
      if (l.negated) {
        if (need.count(l.index))
          throw GenerationError(
              "greedy_solve: clause forbids a needed subtask");
        continue;
      }
      if (need.insert(l.index).second) stack.push_back(l.index);
    }
  }

  auto order = topo_order(g);
  if (!order) throw StructuralError("greedy_solve: cyclic task graph");
  std::vector<int> seq;
  for (int i : *order)
    if (need.count(i)) seq.push_back(i);

  // Verify the plan against the real environment semantics.
  Env env(cfg, /*seed=*/0, /*phase_budget=*/cfg.episode_length);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    StepResult res = env.step(seq[k]);
    if (res.completed != seq[k])
      throw GenerationError("greedy_solve: plan step was not executable");
    if (res.done) {
      if (seq[k] == goal && k + 1 == seq.size()) return seq;
      throw GenerationError("greedy_solve: episode ended before the goal");
    }
  }
  throw GenerationError("greedy_solve: plan did not reach the goal");
}

// ---------------------------------------------------------------------------
// One task from a plan + wiring seed.

namespace detail {

inline TaskConfig generate_from_plan(const GenParams& prm,
                                     const FamilyPlan& plan,
                                     std::uint64_t wiring_seed,
                                     const std::string& task_name) {
  Rng rng(wiring_seed);
  TaskConfig cfg;
  cfg.name = task_name;
  SubtaskGraph& g = cfg.graph;

  auto add = [&](const std::string& name, SubtaskKind kind, double mu,
                 int page, Precondition pre) {
    g.subtasks.push_back(SubtaskSpec{name, kind, mu, 0.0, page});
    g.preconds.push_back(std::move(pre));
    return g.size() - 1;
  };
  // Progress subtasks pay a small deterministic reward each (mining-style
  // shaping); the goal still dominates with its +5 terminal payoff.
  auto field_mu = [&] { return 0.1 + 0.4 * rng.uniform01(); };

  // Noop distractors are declared first so fields can reference them in
  // negated literals; their preconditions are patched in once gates exist.
  std::vector<int> noop_idx;
  for (std::size_t k = 0; k < plan.noop_names.size(); ++k)
    noop_idx.push_back(add(plan.noop_names[k], SubtaskKind::NoopDistractor,
                           0.0, plan.noop_pages[k], Precondition{}));

  std::vector<int> gate_of_page(std::size_t(prm.n_pages), -1);
  int prev_gate = -1;
  std::vector<int> last_page_sinks;
  for (int p = 0; p < prm.n_pages; ++p) {
    const std::vector<std::string>& names = plan.field_names[std::size_t(p)];
    std::vector<int> page_fields;
    std::set<int> referenced;  // page fields used positively by later fields
    std::vector<int> prev_layer;

    std::size_t f = 0;
    while (f < names.size()) {
      std::size_t remaining = names.size() - f;
      std::size_t layer_size =
          1 + rng.uniform_int(std::min<std::uint64_t>(3, remaining));
      std::vector<int> layer;
      for (std::size_t s = 0; s < layer_size; ++s, ++f) {
        Precondition pre;
        if (prev_layer.empty()) {
          if (prev_gate >= 0)
            pre.clauses.push_back(Clause{Literal{prev_gate, false}});
          // page 0 layer 0: ALWAYS-TRUE root
        } else {
          int n_clauses =
              1 + int(rng.uniform_int(std::uint64_t(prm.max_clauses)));
          for (int c = 0; c < n_clauses; ++c) {
            Clause cl;
            // The first clause is always negation-free so that completing a
            // no-op distractor can change when a field becomes eligible but
            // never lock it out for the rest of the episode; tasks stay
            // solvable under any completion order.
            bool want_neg = c > 0 && prm.max_clause >= 2 &&
                            rng.uniform01() < prm.neg_prob;
            std::vector<int> eligible_noops;
            for (std::size_t k = 0; k < noop_idx.size(); ++k)
              if (plan.noop_pages[k] <= p)
                eligible_noops.push_back(noop_idx[k]);
            if (eligible_noops.empty()) want_neg = false;
            std::uint64_t pos_cap = std::min<std::uint64_t>(
                std::uint64_t(prm.max_clause - (want_neg ? 1 : 0)),
                prev_layer.size());
            std::size_t n_pos = 1 + rng.uniform_int(pos_cap);
            std::vector<int> pool = prev_layer;
            for (std::size_t t = 0; t < n_pos; ++t) {
              std::size_t pick = rng.uniform_int(pool.size());
              cl.push_back(Literal{pool[pick], false});
              referenced.insert(pool[pick]);
              pool.erase(pool.begin() + long(pick));
            }
            if (want_neg) {
              int nd = eligible_noops[std::size_t(
                  rng.uniform_int(eligible_noops.size()))];
              cl.push_back(Literal{nd, true});
            }
            std::sort(cl.begin(), cl.end());
            pre.clauses.push_back(std::move(cl));
          }
          std::sort(pre.clauses.begin(), pre.clauses.end());
          pre.clauses.erase(
              std::unique(pre.clauses.begin(), pre.clauses.end()),
              pre.clauses.end());
        }
        layer.push_back(add(names[f], SubtaskKind::Normal, field_mu(), p,
                            std::move(pre)));
      }
      page_fields.insert(page_fields.end(), layer.begin(), layer.end());
      prev_layer = std::move(layer);
    }

    std::vector<int> sinks;
    for (int idx : page_fields)
      if (!referenced.count(idx)) sinks.push_back(idx);
    if (sinks.empty()) sinks = page_fields;  // single-field pages etc.

    if (p + 1 < prm.n_pages) {
      Clause cl;
      for (int s : sinks) cl.push_back(Literal{s, false});
      Precondition pre;
      pre.clauses.push_back(std::move(cl));
      prev_gate = add(plan.gate_names[std::size_t(p)], SubtaskKind::Normal,
                      field_mu(), p, std::move(pre));
      gate_of_page[std::size_t(p)] = prev_gate;
    } else {
      last_page_sinks = sinks;
    }
  }

  {
    Clause cl;
    for (int s : last_page_sinks) cl.push_back(Literal{s, false});
    Precondition pre;
    pre.clauses.push_back(std::move(cl));
    add(plan.goal_name, SubtaskKind::Goal, 5.0, prm.n_pages - 1,
        std::move(pre));
  }
  // Distractors off page 0 require the gate that opens their page, so the
  // gate stays a required precondition of everything on the following page.
  auto gated_pre = [&](int page) {
    Precondition pre;
    if (page > 0 && gate_of_page[std::size_t(page - 1)] >= 0)
      pre.clauses.push_back(
          Clause{Literal{gate_of_page[std::size_t(page - 1)], false}});
    return pre;
  };
  for (std::size_t k = 0; k < plan.failure_names.size(); ++k)
    add(plan.failure_names[k], SubtaskKind::FailureDistractor, -1.0,
        plan.failure_pages[k], gated_pre(plan.failure_pages[k]));
  for (std::size_t k = 0; k < noop_idx.size(); ++k)
    g.preconds[std::size_t(noop_idx[k])] = gated_pre(plan.noop_pages[k]);

  int n_required = 0;
  for (const SubtaskSpec& s : g.subtasks)
    n_required += s.kind == SubtaskKind::Normal || s.kind == SubtaskKind::Goal;
  cfg.episode_length = int(std::ceil(1.1 * n_required)) + 2;
  cfg.finalize();
  greedy_solve(cfg);  // throws when unsolvable
  return cfg;
}

}  // namespace detail

// Deterministic in (params, seed); retries wiring draws until the solvability
// oracle passes (a broken draw is not expected, but the check is cheap).
inline TaskConfig generate_task(const GenParams& prm) {
  prm.check();
  Rng plan_rng(hash_combine(prm.seed, 0x706c616eULL));
  detail::FamilyPlan plan = detail::make_plan(prm, plan_rng);
  std::string name = "gen_" + std::to_string(prm.seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    try {
      return detail::generate_from_plan(
          prm, plan, hash_combine(prm.seed, std::uint64_t(attempt)), name);
    } catch (const GenerationError&) {
      continue;
    }
  }
  throw GenerationError("generate_task: no solvable draw in 100 attempts");
}

// ---------------------------------------------------------------------------
// Twin families: train/test tasks drawn from one shared role plan, with a
// bounded fraction of per-twin renames so every pair keeps >= `overlap`
// name overlap while the wiring differs.

struct SplitResult {
  std::vector<TaskConfig> train;
  std::vector<TaskConfig> test;
};

inline double name_overlap(const SubtaskGraph& a, const SubtaskGraph& b) {
  std::set<std::string> na, nb;
  for (const SubtaskSpec& s : a.subtasks) na.insert(s.name);
  for (const SubtaskSpec& s : b.subtasks) nb.insert(s.name);
  std::size_t inter = 0;
  for (const std::string& s : na) inter += nb.count(s);
  return double(inter) / double(std::max(na.size(), nb.size()));
}

inline SplitResult make_split(std::uint64_t pool_seed, int n_train, int n_test,
                              const GenParams& prm, double overlap = 0.8) {
  prm.check();
  if (n_train < 1 || n_test < 1)
    throw GenerationError("make_split: need n_train >= 1 and n_test >= 1");
  if (overlap < 0.0 || overlap > 1.0)
    throw GenerationError("make_split: overlap outside [0, 1]");

  Rng plan_rng(hash_combine(pool_seed, 0x706f6f6cULL));
  detail::FamilyPlan plan = detail::make_plan(prm, plan_rng);
  int rename_budget =
      int(std::floor((1.0 - overlap) / 2.0 * prm.n_subtasks));

  SplitResult out;
  for (int k = 0; k < n_train + n_test; ++k) {
    bool is_test = k >= n_train;
    std::string name = (is_test ? "test_" : "train_") +
                       std::to_string(is_test ? k - n_train : k);
    TaskConfig cfg;
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      std::uint64_t seed_k =
          hash_combine(hash_combine(pool_seed, std::uint64_t(k)),
                       std::uint64_t(attempt));
      try {
        cfg = detail::generate_from_plan(prm, plan, seed_k, name);
      } catch (const GenerationError&) {
        continue;
      }
      // Rename a bounded set of fields / noop distractors to twin-unique
      // names; gates, goal and failure distractors anchor the shared pool.
      Rng rrng(hash_combine(seed_k, 0x72656e616d65ULL));
      std::vector<int> renameable;
      for (int i = 0; i < cfg.size(); ++i) {
        SubtaskKind kind = cfg.graph.subtasks[std::size_t(i)].kind;
        if (kind == SubtaskKind::NoopDistractor ||
            (kind == SubtaskKind::Normal &&
             cfg.graph.subtasks[std::size_t(i)].name.rfind("fill_", 0) == 0))
          renameable.push_back(i);
      }
      for (int r = 0; r < rename_budget && !renameable.empty(); ++r) {
        std::size_t pick = rrng.uniform_int(renameable.size());
        cfg.graph.subtasks[std::size_t(renameable[pick])].name =
            "alt_" + std::to_string(k) + "_" + std::to_string(r);
        renameable.erase(renameable.begin() + long(pick));
      }
      // Train and test graphs must not coincide structurally.
      bool clash = false;
      if (is_test)
        for (const TaskConfig& tr : out.train)
          if (tr.graph == cfg.graph) { clash = true; break; }
      if (clash) continue;
      if (is_test) {
        double best = 0.0;
        for (const TaskConfig& tr : out.train)
          best = std::max(best, name_overlap(cfg.graph, tr.graph));
        if (best + 1e-9 < overlap) continue;
      }
      ok = true;
    }
    if (!ok)
      throw GenerationError("make_split: could not build twin '" + name + "'");
    (is_test ? out.test : out.train).push_back(std::move(cfg));
  }
  return out;
}

}  // namespace sgi
