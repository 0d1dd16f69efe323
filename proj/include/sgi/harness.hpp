#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sgi/common.hpp"
#include "sgi/env.hpp"
#include "sgi/explore.hpp"
#include "sgi/graph.hpp"
#include "sgi/grprop.hpp"
#include "sgi/ilp.hpp"
#include "sgi/prior.hpp"
#include "sgi/task_io.hpp"

namespace sgi {

// ---------------------------------------------------------------------------
// Run configuration

enum class Agent { Mtsgi, Msgi, Random };
enum class Explorer { Random, Ucb, MtUcb };

inline const char* agent_to_string(Agent a) {
  switch (a) {
    case Agent::Mtsgi: return "mtsgi";
    case Agent::Msgi: return "msgi";
    case Agent::Random: return "random";
  }
  return "msgi";
}

inline const char* explorer_to_string(Explorer e) {
  switch (e) {
    case Explorer::Random: return "random";
    case Explorer::Ucb: return "ucb";
    case Explorer::MtUcb: return "mtucb";
  }
  return "ucb";
}

struct RunConfig {
  int budget = 1000;       // adaptation steps per task and seed
  int eval_episodes = 32;  // evaluation episodes per checkpoint
  std::vector<int> checkpoints;  // empty -> 0..budget in budget/10 steps
  std::vector<std::uint64_t> seeds{0, 1, 2, 3};
  Agent agent = Agent::Msgi;
  std::optional<Explorer> explorer;  // default depends on the agent
  GRPropParams grprop;
  UcbVariant ucb_variant = UcbVariant::Typeset;
  std::optional<double> alpha_override;
  bool temperature_ramp = false;  // 1 -> grprop.temperature across the budget
  int sample_budget = 4096;       // precision/recall sample size (N > 16)
  double kappa = 1.0, beta = 10.0;
  std::uint64_t base_seed = 0;

  std::vector<int> effective_checkpoints() const {
    if (!checkpoints.empty()) return checkpoints;
    std::vector<int> cps;
    int step = std::max(budget / 10, 1);
    for (int c = 0; c <= budget; c += step) cps.push_back(c);
    return cps;
  }

  Explorer effective_explorer() const {
    if (explorer) return *explorer;
    switch (agent) {
      case Agent::Mtsgi: return Explorer::MtUcb;
      case Agent::Msgi: return Explorer::Ucb;
      case Agent::Random: return Explorer::Random;
    }
    return Explorer::Ucb;
  }
};

// ---------------------------------------------------------------------------
// Policies as closures over the environment.

using Policy = std::function<int(const Env&, Rng&)>;

inline Policy make_random_policy() {
  return [](const Env& env, Rng& rng) {
    return random_pick(env.executable_mask(), env.visible_incomplete_mask(),
                       rng);
  };
}

inline Policy make_grprop_policy(const SubtaskGraph& graph,
                                 const GRPropParams& prm) {
  auto pol = std::make_shared<GRPropPolicy>(graph, prm);
  return [pol](const Env& env, Rng& rng) {
    return pick_option(pol->logits(env.state().x), env.executable_mask(),
                       env.visible_incomplete_mask(), rng);
  };
}

// Current-task GRProp mixed with a prior task's GRProp, aligned by name.
inline Policy make_mixed_policy(const SubtaskGraph& current,
                                const SubtaskGraph& prior,
                                const GRPropParams& prm, double alpha) {
  auto cur_pol = std::make_shared<GRPropPolicy>(current, prm);
  auto pri_pol = std::make_shared<GRPropPolicy>(prior, prm);
  // current index -> prior index (-1 when the prior lacks the name)
  auto align = std::make_shared<std::vector<int>>(current.subtasks.size(), -1);
  {
    std::map<std::string, int> pidx;
    for (int j = 0; j < prior.size(); ++j)
      pidx[prior.subtasks[std::size_t(j)].name] = j;
    for (int i = 0; i < current.size(); ++i) {
      auto it = pidx.find(current.subtasks[std::size_t(i)].name);
      if (it != pidx.end()) (*align)[std::size_t(i)] = it->second;
    }
  }
  int prior_n = prior.size();
  return [cur_pol, pri_pol, align, alpha, prior_n](const Env& env, Rng& rng) {
    const BitVec& x = env.state().x;
    BitVec xp(std::size_t(prior_n), 0);
    for (std::size_t i = 0; i < align->size(); ++i)
      if ((*align)[i] >= 0) xp[std::size_t((*align)[i])] = x[i];
    const std::vector<double>& lt = cur_pol->logits(x);
    const std::vector<double>& lp = pri_pol->logits(xp);
    std::vector<double> lp_cur(lt.size(), 0.0);
    for (std::size_t i = 0; i < align->size(); ++i)
      if ((*align)[i] >= 0) lp_cur[i] = lp[std::size_t((*align)[i])];
    std::vector<double> mixed = mixed_logits(lt, lp_cur, alpha);
    return pick_option(mixed, env.executable_mask(),
                       env.visible_incomplete_mask(), rng);
  };
}

// ---------------------------------------------------------------------------
// Adaptation: exactly `budget` environment steps under an exploration policy,
// spanning episodes via the environment's internal resets.

struct AdaptResult {
  Trajectory traj;
  ExplorationParams params;
};

inline AdaptResult run_adaptation(const TaskConfig& cfg, Explorer explorer,
                                  int budget, std::uint64_t seed,
                                  const ExplorationParams* init = nullptr,
                                  UcbVariant variant = UcbVariant::Typeset) {
  if (budget < 1) throw ContractError("run_adaptation: budget must be >= 1");
  if (init && init->size() != cfg.size())
    throw AlignmentError("run_adaptation: init params size mismatch");
  AdaptResult out;
  out.params = init ? *init : ExplorationParams(cfg.size());
  Env env(cfg, hash_combine(seed, 0x656e76ULL), budget);
  Rng policy_rng(hash_combine(seed, 0x706f6cULL));
  out.traj.reserve(std::size_t(budget));
  for (int t = 0; t < budget; ++t) {
    StepRecord rec;
    rec.x = env.state().x;
    rec.e = env.state().e;
    int option;
    if (explorer == Explorer::Random) {
      option = random_pick(env.executable_mask(),
                           env.visible_incomplete_mask(), policy_rng);
    } else {
      option = pick_option(ucb_logits(out.params, variant),
                           env.executable_mask(),
                           env.visible_incomplete_mask(), policy_rng);
    }
    StepResult res = env.step(option);
    update_params(out.params, option, res.reward);
    rec.option = option;
    rec.reward = res.reward;
    rec.done = res.done;
    out.traj.push_back(std::move(rec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation: fresh episodes under a frozen policy.

struct EvalResult {
  double success_rate = 0.0;
  double mean_return = 0.0;
};

inline EvalResult evaluate(const TaskConfig& cfg, const Policy& policy,
                           int episodes, std::uint64_t seed) {
  if (episodes < 1) throw ContractError("evaluate: episodes must be >= 1");
  int goal = -1;
  for (int i = 0; i < cfg.size(); ++i)
    if (cfg.graph.subtasks[std::size_t(i)].kind == SubtaskKind::Goal) goal = i;
  long successes = 0;
  double total_return = 0.0;
  for (int ep = 0; ep < episodes; ++ep) {
    Env env(cfg, hash_combine(seed, 0x65766100ULL + std::uint64_t(ep)),
            cfg.episode_length);
    Rng rng(hash_combine(seed, 0x706f6c00ULL + std::uint64_t(ep)));
    for (;;) {
      StepResult res = env.step(policy(env, rng));
      total_return += res.reward;
      if (res.done) {
        successes += res.completed >= 0 && res.completed == goal;
        break;
      }
    }
  }
  return EvalResult{double(successes) / double(episodes),
                    total_return / double(episodes)};
}

// ---------------------------------------------------------------------------
// Meta-training: adapt, infer, evaluate, and bank one prior entry per task.

inline PriorStore meta_train(const std::vector<TaskConfig>& tasks,
                             const RunConfig& rc) {
  PriorStore store;
  Explorer explorer = rc.explorer.value_or(Explorer::Ucb);
  if (explorer == Explorer::MtUcb) explorer = Explorer::Ucb;  // nothing prior
  for (const TaskConfig& cfg : tasks) {
    std::uint64_t task_seed = hash_combine(
        hash_combine(rc.base_seed, hash_str(cfg.name)), 0x747261696eULL);
    AdaptResult ar =
        run_adaptation(cfg, explorer, rc.budget, task_seed, nullptr,
                       rc.ucb_variant);
    std::vector<std::string> names;
    for (const SubtaskSpec& s : cfg.graph.subtasks) names.push_back(s.name);
    SubtaskGraph inferred = infer_graph(ar.traj, names);
    Policy policy = make_grprop_policy(inferred, rc.grprop);
    EvalResult ev = evaluate(cfg, policy, rc.eval_episodes,
                             hash_combine(task_seed, 0x6576616cULL));
    store.entries.push_back(
        PriorEntry{cfg.name, std::move(inferred), ar.params, ev.mean_return});
  }
  return store;
}

// ---------------------------------------------------------------------------
// Meta-testing: per task and seed, one adaptation run; at every checkpoint,
// re-infer from the trajectory prefix, build the agent's policy, evaluate,
// and score the inferred graph against the ground truth.

struct MetricsRow {
  std::string task;
  std::uint64_t seed = 0;
  int steps = 0;
  double success = 0.0;
  double ret = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

inline std::vector<MetricsRow> meta_test(const std::vector<TaskConfig>& tasks,
                                         const PriorStore* store,
                                         const RunConfig& rc) {
  std::vector<int> checkpoints = rc.effective_checkpoints();
  for (int c : checkpoints)
    if (c < 0 || c > rc.budget)
      throw ContractError("meta_test: checkpoint outside [0, budget]");
  Explorer explorer = rc.effective_explorer();
  if ((rc.agent == Agent::Mtsgi || explorer == Explorer::MtUcb) &&
      (!store || store->entries.empty()))
    throw SelectionError("meta_test: agent needs a nonempty prior store");

  std::vector<MetricsRow> rows;
  for (const TaskConfig& cfg : tasks) {
    std::vector<std::string> names;
    for (const SubtaskSpec& s : cfg.graph.subtasks) names.push_back(s.name);
    const PriorEntry* prior = nullptr;
    if (store && !store->entries.empty() &&
        (rc.agent == Agent::Mtsgi || explorer == Explorer::MtUcb))
      prior = &store->entries[std::size_t(
          select_prior(*store, names, rc.kappa, rc.beta))];

    for (std::uint64_t seed : rc.seeds) {
      std::uint64_t run_seed = hash_combine(
          hash_combine(hash_combine(rc.base_seed, hash_str(cfg.name)), seed),
          0x74657374ULL);
      ExplorationParams init(cfg.size());
      if (explorer == Explorer::MtUcb && prior)
        init = init_from_prior(names, prior->names(), prior->explore);
      AdaptResult ar = run_adaptation(cfg, explorer, rc.budget, run_seed,
                                      &init, rc.ucb_variant);

      for (int c : checkpoints) {
        Trajectory prefix(ar.traj.begin(), ar.traj.begin() + c);
        SubtaskGraph inferred = infer_graph(prefix, names);
        PrecisionRecall pr = graph_precision_recall(
            inferred, cfg.graph, rc.sample_budget,
            hash_combine(run_seed, 0x7072ULL + std::uint64_t(c)));

        GRPropParams gp = rc.grprop;
        if (rc.temperature_ramp && rc.budget > 0)
          gp.temperature =
              1.0 + (rc.grprop.temperature - 1.0) * double(c) /
                        double(rc.budget);

        Policy policy;
        switch (rc.agent) {
          case Agent::Random:
            policy = make_random_policy();
            break;
          case Agent::Msgi:
            policy = make_grprop_policy(inferred, gp);
            break;
          case Agent::Mtsgi: {
            double alpha = rc.alpha_override
                               ? *rc.alpha_override
                               : alpha_schedule(c, rc.budget);
            policy = make_mixed_policy(inferred, prior->graph, gp, alpha);
            break;
          }
        }
        EvalResult ev =
            evaluate(cfg, policy, rc.eval_episodes,
                     hash_combine(run_seed, 0x6576ULL + std::uint64_t(c)));
        rows.push_back(MetricsRow{cfg.name, seed, c, ev.success_rate,
                                  ev.mean_return, pr.precision, pr.recall});
      }
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const MetricsRow& a, const MetricsRow& b) {
                     if (a.task != b.task) return a.task < b.task;
                     if (a.seed != b.seed) return a.seed < b.seed;
                     return a.steps < b.steps;
                   });
  return rows;
}

// ---------------------------------------------------------------------------
// Metrics CSV

inline constexpr const char* kCsvHeader =
    "task,seed,steps,success,return,precision,recall";

inline std::string emit_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const MetricsRow& r : rows) {
    os << r.task << ',' << r.seed << ',' << r.steps << ','
       << format_real(r.success) << ',' << format_real(r.ret) << ','
       << format_real(r.precision) << ',' << format_real(r.recall) << "\n";
  }
  return os.str();
}

inline std::vector<MetricsRow> parse_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  std::vector<MetricsRow> rows;
  bool saw_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kCsvHeader)
        throw ParseError("bad CSV header '" + line + "'", line_no);
      saw_header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7)
      throw ParseError("expected 7 CSV fields", line_no);
    MetricsRow r;
    r.task = cells[0];
    r.seed = std::uint64_t(parse_int(cells[1], line_no));
    r.steps = int(parse_int(cells[2], line_no));
    r.success = parse_real(cells[3], line_no);
    r.ret = parse_real(cells[4], line_no);
    r.precision = parse_real(cells[5], line_no);
    r.recall = parse_real(cells[6], line_no);
    rows.push_back(std::move(r));
  }
  if (!saw_header) throw ParseError("missing CSV header", 1);
  return rows;
}

}  // namespace sgi
