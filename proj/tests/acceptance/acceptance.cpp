// Acceptance suite: ten numbered end-to-end criteria, one PASS/FAIL line
// each, nonzero exit when any fail. Tolerances and workloads are pinned in
// the constants below; expected values come from independent oracles
// (tests/support/oracles.hpp) or closed-form arithmetic.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "sgi/sgi.hpp"

using namespace sgi;

namespace {

int g_failures = 0;

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct Check {
  bool pass = true;
  std::string detail;

  void require(bool cond, const std::string& why) {
    if (!cond && pass) {
      pass = false;
      detail = why;
    }
  }
};

using CriterionFn = Check (*)();

void run_criterion(int id, const char* name, CriterionFn fn) {
  auto t0 = std::chrono::steady_clock::now();
  Check c;
  try {
    c = fn();
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  std::cout << "criterion " << id << ": " << (c.pass ? "PASS" : "FAIL")
            << " - " << name;
  if (!c.detail.empty()) std::cout << " [" << c.detail << "]";
  std::cout << " (" << fmt(secs, 1) << "s)" << std::endl;
  if (!c.pass) ++g_failures;
}

// ---------------------------------------------------------------------------
// 1. Eligibility equals an independent brute-force evaluator.

Check criterion1() {
  Check c;
  long vectors = 0;
  for (std::uint32_t s = 0; s < 200 && c.pass; ++s) {
    int n = 2 + int(s % 11);  // 2..12 subtasks
    SubtaskGraph g = oracle::random_layered_graph(n, 2, 3, 0.3, 10000 + s);
    for (const BitVec& x : oracle::all_vectors(n)) {
      BitVec e = eligibility(g, x);
      ++vectors;
      for (int i = 0; i < n; ++i) {
        if (bool(e[std::size_t(i)]) !=
            oracle::sop_eval(g.preconds[std::size_t(i)], x)) {
          c.require(false, "mismatch at graph seed " + std::to_string(s) +
                               " subtask " + std::to_string(i));
          break;
        }
      }
      if (!c.pass) break;
    }
  }
  if (c.pass)
    c.detail = "200 graphs, " + std::to_string(vectors) + " vectors exact";
  return c;
}

// ---------------------------------------------------------------------------
// 2. Exact precondition recovery from complete truth tables.

Check criterion2() {
  Check c;
  for (std::uint32_t s = 0; s < 100 && c.pass; ++s) {
    int n = 4 + int(s % 9);  // 4..12 subtasks
    SubtaskGraph truth = oracle::random_layered_graph(n, 2, 3, 0.3, 20000 + s);
    Trajectory traj;
    for (const BitVec& x : oracle::all_vectors(n))
      traj.push_back(StepRecord{x, eligibility(truth, x), 0, 0.0, false});
    std::vector<std::string> names;
    for (const SubtaskSpec& sp : truth.subtasks) names.push_back(sp.name);
    SubtaskGraph inferred = infer_graph(traj, names);
    PrecisionRecall pr = graph_precision_recall(inferred, truth);
    c.require(pr.precision == 1.0 && pr.recall == 1.0,
              "graph seed " + std::to_string(s) + " p=" + fmt(pr.precision) +
                  " r=" + fmt(pr.recall));
  }
  if (c.pass) c.detail = "100 graphs recovered exactly";
  return c;
}

// ---------------------------------------------------------------------------
// 3. Precision/recall of graphs inferred from 1000-step UCB adaptation.

Check criterion3() {
  Check c;
  const int kBudget = 1000;
  const int kSizes[4] = {30, 36, 40, 46};
  double worst_p = 1.0, worst_r = 1.0;
  for (int t = 0; t < 4; ++t) {
    GenParams prm;
    prm.n_subtasks = kSizes[t];
    prm.seed = 3100 + std::uint64_t(t);
    TaskConfig cfg = generate_task(prm);
    std::vector<std::string> names;
    for (const SubtaskSpec& sp : cfg.graph.subtasks) names.push_back(sp.name);

    double sum_p = 0.0, sum_r = 0.0;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      AdaptResult ar = run_adaptation(cfg, Explorer::Ucb, kBudget,
                                      hash_combine(prm.seed, seed));
      SubtaskGraph inferred = infer_graph(ar.traj, names);
      PrecisionRecall pr =
          graph_precision_recall(inferred, cfg.graph, 4096, 33000 + seed);
      sum_p += pr.precision;
      sum_r += pr.recall;
    }
    double avg_p = sum_p / 4.0, avg_r = sum_r / 4.0;
    worst_p = std::min(worst_p, avg_p);
    worst_r = std::min(worst_r, avg_r);
    c.require(avg_p >= 0.95 && avg_r >= 0.85,
              std::to_string(kSizes[t]) + " subtasks: p=" + fmt(avg_p) +
                  " r=" + fmt(avg_r));
  }
  if (c.pass)
    c.detail = "4 sizes x 4 seeds, worst avg p=" + fmt(worst_p) +
               " r=" + fmt(worst_r);
  return c;
}

// ---------------------------------------------------------------------------
// 4. Analytic GRProp Jacobian vs central finite differences.

Check criterion4() {
  Check c;
  const double kH = 1e-5;
  const double kTol = 1e-4;
  GRPropParams prm;
  Rng rng(44001);
  double worst = 0.0;
  for (std::uint32_t s = 0; s < 100; ++s) {
    int n = 3 + int(s % 8);  // 3..10 subtasks
    SubtaskGraph g = oracle::random_layered_graph(n, 2, 3, 0.3, 40000 + s);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& xi : x) xi = rng.uniform01();
    SoftState ss = smoothed_eligibility(g, x, prm);
    std::vector<double> fd = oracle::fd_jacobian(g, x, prm, kH);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        double a = ss.de_dx(j, i);
        double f = fd[std::size_t(j) * n + i];
        double rel = std::abs(a - f) / std::max(std::abs(f), 1e-6);
        worst = std::max(worst, rel);
      }
    }
  }
  c.require(worst <= kTol, "max relative error " + fmt(worst, 8));
  if (c.pass)
    c.detail = "100 cases, max relative error " + fmt(worst, 8);
  return c;
}

// ---------------------------------------------------------------------------
// 5. Greedy GRProp solves generated tasks and shuns failure distractors.

Check criterion5() {
  Check c;
  GRPropParams gp;
  int solved = 0;
  int ordered = 0;
  const int kTasks = 100;
  for (int t = 0; t < kTasks; ++t) {
    GenParams prm;
    prm.n_subtasks = 30 + t % 17;  // 30..46
    prm.n_pages = 3 + t % 3;
    prm.seed = 50000 + std::uint64_t(t);
    TaskConfig cfg = generate_task(prm);

    int goal = -1;
    for (int i = 0; i < cfg.size(); ++i)
      if (cfg.graph.subtasks[std::size_t(i)].kind == SubtaskKind::Goal)
        goal = i;

    // Greedy rollout: argmax of the executable-masked logits.
    GRPropPolicy pol(cfg.graph, gp);
    Env env(cfg, 1, cfg.episode_length);
    bool success = false;
    while (!env.state().done) {
      std::vector<double> logits = pol.logits(env.state().x);
      BitVec ex = env.executable_mask();
      for (std::size_t i = 0; i < logits.size(); ++i)
        if (!ex[i]) logits[i] = kNegInf;
      int pick = argmax_logit(logits);
      if (pick < 0) {
        BitVec vi = env.visible_incomplete_mask();
        pick = 0;
        for (std::size_t i = 0; i < vi.size(); ++i)
          if (vi[i]) { pick = int(i); break; }
      }
      StepResult res = env.step(pick);
      if (res.done) {
        success = res.completed == goal;
        break;
      }
    }
    solved += success;

    // Logit ordering at the initial state: every failure distractor below
    // the strongest subtask on the goal's required path.
    BitVec x0(std::size_t(cfg.size()), 0);
    std::vector<double> l0 = grprop_logits(cfg.graph, x0, gp);
    std::set<int> goal_path = required_ancestors(cfg.graph)[std::size_t(goal)];
    goal_path.insert(goal);
    double best_path = kNegInf;
    for (int i : goal_path) best_path = std::max(best_path, l0[std::size_t(i)]);
    bool below = true;
    for (int i = 0; i < cfg.size(); ++i)
      if (cfg.graph.subtasks[std::size_t(i)].kind ==
              SubtaskKind::FailureDistractor &&
          !(l0[std::size_t(i)] < best_path))
        below = false;
    ordered += below;
  }
  c.require(solved >= 95, "solved " + std::to_string(solved) + "/100");
  c.require(ordered == kTasks,
            "failure-logit ordering held on " + std::to_string(ordered) +
                "/100");
  if (c.pass)
    c.detail = "solved " + std::to_string(solved) +
               "/100, ordering 100/100";
  return c;
}

// ---------------------------------------------------------------------------
// 6 + 7 share one twin-family suite; results are computed once.

struct SuiteResults {
  bool ready = false;
  std::string error;
  // mean success per checkpoint, averaged over families and seeds
  std::map<int, double> msgi, mtsgi, random_agent;
  std::map<int, double> mtsgi_ucb, mtsgi_random;  // explorer ablations
  double zero_shot_store1 = 0.0, zero_shot_store4 = 0.0;
  double min_overlap = 1.0;
};

const std::vector<int> kCheckpoints{0, 500, 1000, 1500, 2000};
const int kBudget6 = 2000;
const int kFamilies = 10;

double mean_at(const std::vector<MetricsRow>& rows, int step) {
  double sum = 0.0;
  long cnt = 0;
  for (const MetricsRow& r : rows)
    if (r.steps == step) {
      sum += r.success;
      ++cnt;
    }
  return cnt ? sum / double(cnt) : 0.0;
}

double auc(const std::map<int, double>& curve) {
  // Normalized trapezoidal area under the success curve.
  double area = 0.0;
  auto it = curve.begin();
  auto prev = it++;
  for (; it != curve.end(); prev = it++)
    area += 0.5 * (prev->second + it->second) *
            double(it->first - prev->first);
  return area / double(curve.rbegin()->first - curve.begin()->first);
}

SuiteResults& suite() {
  static SuiteResults res = [] {
    SuiteResults r;
    std::map<int, std::vector<double>> acc_msgi, acc_mtsgi, acc_random,
        acc_ucb, acc_rnd;
    std::vector<double> zs1, zs4;
    try {
      for (int fam = 0; fam < kFamilies; ++fam) {
        GenParams prm;  // default 40-subtask, 5-page tasks
        SplitResult split =
            make_split(7000 + std::uint64_t(fam), 4, 1, prm, 0.8);
        const TaskConfig& test = split.test[0];
        r.min_overlap = std::min(
            r.min_overlap, name_overlap(test.graph, split.train[0].graph));

        RunConfig trc;
        trc.budget = kBudget6;
        trc.eval_episodes = 16;
        trc.base_seed = 9000 + std::uint64_t(fam);
        PriorStore store1 =
            meta_train({split.train[0]}, trc);
        PriorStore store4 = meta_train(split.train, trc);

        RunConfig rc;
        rc.budget = kBudget6;
        rc.eval_episodes = 16;
        rc.checkpoints = kCheckpoints;
        rc.seeds = {0, 1, 2, 3};
        rc.sample_budget = 256;
        rc.base_seed = 9000 + std::uint64_t(fam);

        auto collect = [&](Agent agent, const PriorStore* store,
                           std::optional<Explorer> explorer,
                           std::map<int, std::vector<double>>& acc)
            -> std::vector<MetricsRow> {
          RunConfig cur = rc;
          cur.agent = agent;
          cur.explorer = explorer;
          std::vector<MetricsRow> rows = meta_test({test}, store, cur);
          for (int cp : kCheckpoints) acc[cp].push_back(mean_at(rows, cp));
          return rows;
        };

        std::vector<MetricsRow> mtsgi_rows =
            collect(Agent::Mtsgi, &store1, std::nullopt, acc_mtsgi);
        collect(Agent::Msgi, nullptr, std::nullopt, acc_msgi);
        collect(Agent::Random, nullptr, std::nullopt, acc_random);
        collect(Agent::Mtsgi, &store1, Explorer::Ucb, acc_ucb);
        collect(Agent::Mtsgi, &store1, Explorer::Random, acc_rnd);

        zs1.push_back(mean_at(mtsgi_rows, 0));
        RunConfig zrc = rc;
        zrc.budget = 1;
        zrc.checkpoints = {0};
        zrc.agent = Agent::Mtsgi;
        std::vector<MetricsRow> z4 = meta_test({test}, &store4, zrc);
        zs4.push_back(mean_at(z4, 0));
      }
      auto fold = [](const std::map<int, std::vector<double>>& acc,
                     std::map<int, double>& out) {
        for (const auto& [cp, vals] : acc) {
          double s = 0.0;
          for (double v : vals) s += v;
          out[cp] = s / double(vals.size());
        }
      };
      fold(acc_msgi, r.msgi);
      fold(acc_mtsgi, r.mtsgi);
      fold(acc_random, r.random_agent);
      fold(acc_ucb, r.mtsgi_ucb);
      fold(acc_rnd, r.mtsgi_random);
      double s1 = 0.0, s4 = 0.0;
      for (double v : zs1) s1 += v;
      for (double v : zs4) s4 += v;
      r.zero_shot_store1 = s1 / double(zs1.size());
      r.zero_shot_store4 = s4 / double(zs4.size());
      r.ready = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    return r;
  }();
  return res;
}

// 6. Twin-transfer gaps: MTSGI zero-shot, MTSGI final, MSGI vs Random.

Check criterion6() {
  Check c;
  SuiteResults& r = suite();
  if (!r.ready) {
    c.require(false, "suite failed: " + r.error);
    return c;
  }
  c.require(r.min_overlap >= 0.8 - 1e-9,
            "twin name overlap " + fmt(r.min_overlap));
  double mtsgi0 = r.mtsgi.at(0), msgi0 = r.msgi.at(0);
  double mtsgiF = r.mtsgi.at(kBudget6);
  double msgiF = r.msgi.at(kBudget6), randF = r.random_agent.at(kBudget6);
  c.require(mtsgi0 >= msgi0 + 0.2, "zero-shot mtsgi=" + fmt(mtsgi0) +
                                       " msgi=" + fmt(msgi0));
  c.require(mtsgiF >= 0.9, "mtsgi final=" + fmt(mtsgiF));
  c.require(msgiF >= randF + 0.2,
            "final msgi=" + fmt(msgiF) + " random=" + fmt(randF));
  if (c.pass)
    c.detail = "zero-shot " + fmt(mtsgi0) + " vs " + fmt(msgi0) +
               ", mtsgi final " + fmt(mtsgiF) + ", msgi/random final " +
               fmt(msgiF) + "/" + fmt(randF);
  return c;
}

// 7. Explorer AUC ordering and prior-size monotonicity.

Check criterion7() {
  Check c;
  SuiteResults& r = suite();
  if (!r.ready) {
    c.require(false, "suite failed: " + r.error);
    return c;
  }
  double a_mtucb = auc(r.mtsgi), a_ucb = auc(r.mtsgi_ucb),
         a_rnd = auc(r.mtsgi_random);
  c.require(a_mtucb + 1e-9 >= a_ucb && a_ucb + 1e-9 >= a_rnd,
            "auc mtucb=" + fmt(a_mtucb) + " ucb=" + fmt(a_ucb) +
                " random=" + fmt(a_rnd));
  c.require(r.zero_shot_store4 + 1e-9 >= r.zero_shot_store1,
            "zero-shot n_train 4 = " + fmt(r.zero_shot_store4) +
                " < n_train 1 = " + fmt(r.zero_shot_store1));
  if (c.pass)
    c.detail = "auc " + fmt(a_mtucb) + " >= " + fmt(a_ucb) +
               " >= " + fmt(a_rnd) + "; zero-shot " +
               fmt(r.zero_shot_store1) + " -> " + fmt(r.zero_shot_store4);
  return c;
}

// ---------------------------------------------------------------------------
// 8. Closed-form spot checks.

Check criterion8() {
  Check c;
  ExplorationParams p(2);
  p.n = {1.0, 3.0};
  std::vector<double> ucb = ucb_logits(p);
  c.require(std::abs(ucb[0] - 1.9605162869) <= 1e-3,
            "ucb[0]=" + fmt(ucb[0], 7));
  c.require(std::abs(ucb[1] - 0.6535054290) <= 1e-3,
            "ucb[1]=" + fmt(ucb[1], 7));

  double and_val = soft_and({1.0, 0.0}, 3.0).value;
  c.require(std::abs(and_val - 0.5078883299) <= 1e-3,
            "soft_and=" + fmt(and_val, 7));

  double f10 = f_beta({"a", "b", "c", "d"}, {"a"});
  c.require(std::abs(f10 - 0.2518703241) <= 1e-4, "f10=" + fmt(f10, 7));

  // Reward MLE equals the incremental running mean to machine precision.
  Rng rng(88);
  Trajectory traj;
  ExplorationParams run(1);
  for (int t = 0; t < 64; ++t) {
    double rew = rng.normal(0.7, 0.3);
    traj.push_back(StepRecord{BitVec{0}, BitVec{1}, 0, rew, false});
    update_params(run, 0, rew);
  }
  std::vector<RewardEstimate> est = infer_rewards(traj, 1);
  c.require(std::abs(est[0].mu - run.r[0]) <= 1e-12,
            "mle mu=" + fmt(est[0].mu, 15) + " running=" + fmt(run.r[0], 15));
  if (c.pass)
    c.detail = "ucb (" + fmt(ucb[0], 4) + ", " + fmt(ucb[1], 4) +
               "), soft_and " + fmt(and_val, 6) + ", f10 " + fmt(f10, 6);
  return c;
}

// ---------------------------------------------------------------------------
// 9. Environment contract.

Check criterion9() {
  Check c;
  TaskConfig cfg;
  cfg.name = "contract";
  cfg.episode_length = 7;
  cfg.graph.subtasks = {
      SubtaskSpec{"first", SubtaskKind::Normal, 0.0, 0.0, 0},
      SubtaskSpec{"second", SubtaskKind::Normal, 0.0, 0.0, 0},
      SubtaskSpec{"gate", SubtaskKind::Normal, 0.0, 0.0, 0},
      SubtaskSpec{"goal", SubtaskKind::Goal, 5.0, 0.0, 1},
      SubtaskSpec{"bad", SubtaskKind::FailureDistractor, -1.0, 0.0, 1},
      SubtaskSpec{"noop", SubtaskKind::NoopDistractor, 0.0, 0.0, 0}};
  cfg.graph.preconds.resize(6);
  cfg.graph.preconds[1].clauses = {Clause{Literal{0, false}}};
  cfg.graph.preconds[2].clauses = {Clause{Literal{1, false}}};
  cfg.graph.preconds[3].clauses = {Clause{Literal{2, false}}};
  cfg.graph.preconds[4].clauses = {Clause{Literal{2, false}}};
  cfg.finalize();

  {  // goal pays +5 and terminates
    Env env(cfg, 3, 100);
    env.step(0);
    env.step(1);
    env.step(2);
    StepResult res = env.step(3);
    c.require(res.reward == 5.0 && res.done && res.completed == 3,
              "goal: reward " + fmt(res.reward) + " done " +
                  std::to_string(res.done));
  }
  {  // failure distractor pays -1 and terminates
    Env env(cfg, 3, 100);
    env.step(0);
    env.step(1);
    env.step(2);
    StepResult res = env.step(4);
    c.require(res.reward == -1.0 && res.done && res.completed == 4,
              "failure: reward " + fmt(res.reward));
  }
  {  // ineligible execution is a silent no-op that consumes a step
    Env env(cfg, 3, 100);
    StepResult res = env.step(1);
    c.require(res.reward == 0.0 && !res.done && res.completed == -1 &&
                  env.state().x == BitVec{0, 0, 0, 0, 0, 0} &&
                  env.state().step_epi == cfg.episode_length - 1,
              "ineligible step changed state");
    // invisible execution equally
    StepResult inv = env.step(3);
    c.require(inv.completed == -1 && inv.reward == 0.0, "invisible step");
    // completed execution equally
    env.step(0);
    StepResult re = env.step(0);
    c.require(re.completed == -1 && re.reward == 0.0, "re-execution");
  }
  {  // timeout terminates with no terminal reward
    Env env(cfg, 3, 100);
    StepResult res;
    for (int t = 0; t < cfg.episode_length; ++t) res = env.step(3);
    c.require(res.done && res.reward == 0.0, "timeout reward/done");
  }
  {  // deterministic means when sigma is zero
    Env env(cfg, 99, 100);
    c.require(env.step(0).reward == 0.0, "normal subtask mean");
  }
  if (c.pass) c.detail = "goal/failure/no-op/timeout exact";
  return c;
}

// ---------------------------------------------------------------------------
// 10. parse(serialize(.)) identity on random instances.

Check criterion10() {
  Check c;
  Rng rng(101010);

  for (int k = 0; k < 50 && c.pass; ++k) {  // task files
    GenParams prm;
    prm.n_subtasks = 12 + int(rng.uniform_int(12));
    prm.n_pages = 1 + int(rng.uniform_int(4));
    prm.n_noop_distractors = 2;
    prm.n_failure_distractors = 1;
    prm.seed = 60000 + std::uint64_t(k);
    TaskConfig cfg = generate_task(prm);
    TaskConfig back = parse_task(serialize_task(cfg));
    c.require(back.graph == cfg.graph && back.name == cfg.name &&
                  back.episode_length == cfg.episode_length &&
                  serialize_task(back) == serialize_task(cfg),
              "task round-trip " + std::to_string(k));
  }

  for (int k = 0; k < 50 && c.pass; ++k) {  // prior stores
    PriorStore store;
    int n_entries = 1 + int(rng.uniform_int(3));
    for (int e = 0; e < n_entries; ++e) {
      PriorEntry entry;
      entry.task_name = "entry_" + std::to_string(k) + "_" + std::to_string(e);
      int n = 3 + int(rng.uniform_int(6));
      entry.graph = oracle::random_layered_graph(
          n, 2, 3, 0.3, 61000 + std::uint32_t(k * 7 + e));
      entry.explore = ExplorationParams(n);
      for (int i = 0; i < n; ++i) {
        entry.explore.r[std::size_t(i)] = rng.normal(0.0, 2.0);
        entry.explore.n[std::size_t(i)] = double(rng.uniform_int(50));
      }
      entry.eval_return = rng.normal(2.0, 3.0);
      store.entries.push_back(std::move(entry));
    }
    PriorStore back = parse_store(serialize_store(store));
    bool same = back.entries.size() == store.entries.size() &&
                serialize_store(back) == serialize_store(store);
    for (std::size_t e = 0; same && e < store.entries.size(); ++e)
      same = back.entries[e].graph == store.entries[e].graph &&
             back.entries[e].explore.r == store.entries[e].explore.r &&
             back.entries[e].explore.n == store.entries[e].explore.n &&
             back.entries[e].eval_return == store.entries[e].eval_return;
    c.require(same, "store round-trip " + std::to_string(k));
  }

  for (int k = 0; k < 50 && c.pass; ++k) {  // trajectories
    int n = 2 + int(rng.uniform_int(10));
    Trajectory traj;
    int steps = 1 + int(rng.uniform_int(30));
    for (int t = 0; t < steps; ++t) {
      StepRecord rec;
      rec.x.resize(std::size_t(n));
      rec.e.resize(std::size_t(n));
      for (int i = 0; i < n; ++i) {
        rec.x[std::size_t(i)] = rng.uniform01() < 0.5;
        rec.e[std::size_t(i)] = rng.uniform01() < 0.5;
      }
      rec.option = int(rng.uniform_int(std::uint64_t(n)));
      rec.reward = rng.normal(0.0, 2.5);
      rec.done = rng.uniform01() < 0.2;
      traj.push_back(std::move(rec));
    }
    Trajectory back = parse_trajectory(serialize_trajectory(traj));
    bool same = back.size() == traj.size();
    for (std::size_t t = 0; same && t < traj.size(); ++t)
      same = back[t] == traj[t];
    c.require(same, "trajectory round-trip " + std::to_string(k));
  }

  for (int k = 0; k < 50 && c.pass; ++k) {  // metrics CSV
    std::vector<MetricsRow> rows;
    int n_rows = 1 + int(rng.uniform_int(20));
    for (int t = 0; t < n_rows; ++t) {
      MetricsRow r;
      r.task = "task_" + std::to_string(rng.uniform_int(5));
      r.seed = rng.uniform_int(100);
      r.steps = int(rng.uniform_int(2000));
      r.success = rng.uniform01();
      r.ret = rng.normal(0.0, 3.0);
      r.precision = rng.uniform01();
      r.recall = rng.uniform01();
      rows.push_back(std::move(r));
    }
    std::vector<MetricsRow> back = parse_csv(emit_csv(rows));
    bool same = back.size() == rows.size();
    for (std::size_t t = 0; same && t < rows.size(); ++t)
      same = back[t].task == rows[t].task && back[t].seed == rows[t].seed &&
             back[t].steps == rows[t].steps &&
             back[t].success == rows[t].success && back[t].ret == rows[t].ret &&
             back[t].precision == rows[t].precision &&
             back[t].recall == rows[t].recall;
    c.require(same, "csv round-trip " + std::to_string(k));
  }

  if (c.pass) c.detail = "50 tasks, 50 stores, 50 trajectories, 50 csvs";
  return c;
}

}  // namespace

int main() {
  run_criterion(1, "eligibility matches the brute-force oracle", criterion1);
  run_criterion(2, "exact recovery from complete truth tables", criterion2);
  run_criterion(3, "inference quality after 1000-step UCB adaptation",
                criterion3);
  run_criterion(4, "analytic Jacobian vs finite differences", criterion4);
  run_criterion(5, "greedy propagation solves generated tasks", criterion5);
  run_criterion(6, "transfer gaps on twin families", criterion6);
  run_criterion(7, "explorer AUC ordering and prior-size monotonicity",
                criterion7);
  run_criterion(8, "closed-form spot checks", criterion8);
  run_criterion(9, "environment reward/termination contract", criterion9);
  run_criterion(10, "serialization round-trips", criterion10);

  if (g_failures) {
    std::cout << g_failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all criteria passed" << std::endl;
  return 0;
}
