// sgi — command-line front end for the subtask-graph-inference library.
//
// Verbs:
//   gen         generate random tasks (or a train/test twin split)
//   meta-train  build a prior store from training tasks
//   meta-test   run the adaptation/evaluation grid and emit metrics CSV
//   infer       infer a subtask graph from a recorded trajectory
//   eval-graph  evaluate a propagation policy built from a graph file
//   export-dot  render a task's subtask graph as Graphviz DOT
//
// All verbs exit 0 on success and nonzero with a diagnostic on stderr.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sgi/sgi.hpp"

namespace {

std::vector<long long> parse_list(const std::string& text,
                                  const std::string& flag) {
  std::vector<long long> out;
  std::string cur;
  for (char ch : text + ",") {
    if (ch == ',') {
      if (cur.empty())
        throw CLI::ValidationError(flag, "empty element in list '" + text + "'");
      try {
        size_t used = 0;
        out.push_back(std::stoll(cur, &used));
        if (used != cur.size()) throw std::invalid_argument(cur);
      } catch (const std::exception&) {
        throw CLI::ValidationError(flag, "bad integer '" + cur + "'");
      }
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  return out;
}

sgi::Agent parse_agent(const std::string& s) {
  if (s == "mtsgi") return sgi::Agent::Mtsgi;
  if (s == "msgi") return sgi::Agent::Msgi;
  if (s == "random") return sgi::Agent::Random;
  throw CLI::ValidationError("--agent", "expected mtsgi|msgi|random");
}

sgi::Explorer parse_explorer(const std::string& s) {
  if (s == "ucb") return sgi::Explorer::Ucb;
  if (s == "mtucb") return sgi::Explorer::MtUcb;
  if (s == "random") return sgi::Explorer::Random;
  throw CLI::ValidationError("--explorer", "expected ucb|mtucb|random");
}

std::vector<sgi::TaskConfig> load_tasks(const std::vector<std::string>& paths) {
  std::vector<sgi::TaskConfig> tasks;
  for (const std::string& p : paths) tasks.push_back(sgi::load_task(p));
  return tasks;
}

// ---------------------------------------------------------------------------

int cmd_gen(const std::string& out_dir, sgi::GenParams prm, int count,
            bool split, int n_train, int n_test, double overlap) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto emit = [&](const sgi::TaskConfig& cfg) {
    std::string path = (fs::path(out_dir) / (cfg.name + ".task")).string();
    sgi::write_file(path, sgi::serialize_task(cfg));
    std::cout << path << "\n";
  };
  if (split) {
    sgi::SplitResult sr =
        sgi::make_split(prm.seed, n_train, n_test, prm, overlap);
    for (const sgi::TaskConfig& t : sr.train) emit(t);
    for (const sgi::TaskConfig& t : sr.test) emit(t);
  } else {
    for (int k = 0; k < count; ++k) {
      sgi::GenParams cur = prm;
      cur.seed = prm.seed + std::uint64_t(k);
      emit(sgi::generate_task(cur));
    }
  }
  return 0;
}

int cmd_meta_train(const std::vector<std::string>& task_paths,
                   const std::string& store_path, const std::string& traj_dir,
                   const sgi::RunConfig& rc) {
  std::vector<sgi::TaskConfig> tasks = load_tasks(task_paths);
  sgi::PriorStore store = sgi::meta_train(tasks, rc);
  sgi::save_store(store_path, store);
  if (!traj_dir.empty()) {
    // Re-run each task's adaptation (same seed chain as meta_train) so the
    // collected trajectories can be inspected or fed to `infer`.
    namespace fs = std::filesystem;
    fs::create_directories(traj_dir);
    sgi::Explorer explorer = rc.explorer.value_or(sgi::Explorer::Ucb);
    if (explorer == sgi::Explorer::MtUcb) explorer = sgi::Explorer::Ucb;
    for (const sgi::TaskConfig& cfg : tasks) {
      std::uint64_t task_seed = sgi::hash_combine(
          sgi::hash_combine(rc.base_seed, sgi::hash_str(cfg.name)),
          0x747261696eull);
      sgi::AdaptResult ar = sgi::run_adaptation(cfg, explorer, rc.budget,
                                                task_seed, nullptr,
                                                rc.ucb_variant);
      std::string path = (fs::path(traj_dir) / (cfg.name + ".traj")).string();
      sgi::write_file(path, sgi::serialize_trajectory(ar.traj));
      std::cout << path << "\n";
    }
  }
  for (const sgi::PriorEntry& e : store.entries)
    std::cout << e.task_name << " return=" << sgi::format_real(e.eval_return)
              << "\n";
  std::cout << "wrote " << store_path << " (" << store.entries.size()
            << " entries)\n";
  return 0;
}

int cmd_meta_test(const std::vector<std::string>& task_paths,
                  const std::optional<std::string>& store_path,
                  const std::string& out_path, const sgi::RunConfig& rc) {
  std::optional<sgi::PriorStore> store;
  if (store_path) store = sgi::load_store(*store_path);
  std::vector<sgi::MetricsRow> rows =
      sgi::meta_test(load_tasks(task_paths), store ? &*store : nullptr, rc);
  std::string csv = sgi::emit_csv(rows);
  if (out_path == "-") {
    std::cout << csv;
  } else {
    sgi::write_file(out_path, csv);
    std::cout << "wrote " << out_path << " (" << rows.size() << " rows)\n";
  }
  return 0;
}

int cmd_infer(const std::string& traj_path,
              const std::optional<std::string>& task_path,
              const std::string& out_path) {
  sgi::Trajectory traj = sgi::parse_trajectory(sgi::read_file(traj_path));
  std::vector<std::string> names;
  std::string name = "inferred";
  if (task_path) {
    sgi::TaskConfig truth = sgi::load_task(*task_path, /*runnable=*/false);
    for (const sgi::SubtaskSpec& sp : truth.graph.subtasks)
      names.push_back(sp.name);
    name = truth.name + "_inferred";
  } else {
    if (traj.empty())
      throw sgi::ContractError(
          "infer: empty trajectory and no --task to supply subtask names");
    for (std::size_t i = 0; i < traj.front().x.size(); ++i)
      names.push_back("s" + std::to_string(i));
  }
  sgi::TaskConfig out;
  out.name = name;
  out.graph = sgi::infer_graph(traj, names);
  sgi::write_file(out_path, sgi::serialize_task(out));
  std::cout << "wrote " << out_path << " (" << out.graph.subtasks.size()
            << " subtasks from " << traj.size() << " steps)\n";
  return 0;
}

int cmd_eval_graph(const std::optional<std::string>& graph_path,
                   const std::string& task_path, int episodes,
                   std::uint64_t seed) {
  sgi::TaskConfig env_cfg = sgi::load_task(task_path);
  sgi::SubtaskGraph graph =
      graph_path ? sgi::load_task(*graph_path, /*runnable=*/false).graph
                 : env_cfg.graph;
  sgi::Policy policy = sgi::make_grprop_policy(graph, sgi::GRPropParams{});
  sgi::EvalResult res = sgi::evaluate(env_cfg, policy, episodes, seed);
  std::cout << "success_rate=" << sgi::format_real(res.success_rate)
            << " mean_return=" << sgi::format_real(res.mean_return) << "\n";
  return 0;
}

int cmd_export_dot(const std::string& task_path, const std::string& out_path) {
  sgi::TaskConfig cfg = sgi::load_task(task_path, /*runnable=*/false);
  std::string dot = sgi::to_dot(cfg.graph);
  if (out_path == "-") {
    std::cout << dot;
  } else {
    sgi::write_file(out_path, dot);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subtask-graph inference pipeline"};
  app.require_subcommand(1);

  // --- gen -----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate random tasks or a split");
  std::string gen_out = ".";
  sgi::GenParams prm;
  int gen_count = 1;
  bool gen_split = false;
  int gen_train = 4, gen_test = 1;
  double gen_overlap = 0.8;
  gen->add_option("--out-dir", gen_out, "directory for .task files");
  gen->add_option("--n-subtasks", prm.n_subtasks, "subtasks per task")
      ->capture_default_str();
  gen->add_option("--pages", prm.n_pages, "pages per task")
      ->capture_default_str();
  gen->add_option("--failures", prm.n_failure_distractors,
                  "failure distractors")
      ->capture_default_str();
  gen->add_option("--noops", prm.n_noop_distractors, "no-op distractors")
      ->capture_default_str();
  gen->add_option("--neg-prob", prm.neg_prob,
                  "probability of a negated literal")
      ->capture_default_str();
  gen->add_option("--seed", prm.seed, "generator seed")->capture_default_str();
  gen->add_option("--count", gen_count, "number of tasks (seed, seed+1, ...)")
      ->capture_default_str();
  gen->add_flag("--split", gen_split, "emit a train/test twin split instead");
  gen->add_option("--train", gen_train, "training twins (with --split)")
      ->capture_default_str();
  gen->add_option("--test", gen_test, "test twins (with --split)")
      ->capture_default_str();
  gen->add_option("--overlap", gen_overlap,
                  "minimum shared-name fraction between twins")
      ->capture_default_str();

  // --- shared run-config flags ----------------------------------------------
  sgi::RunConfig rc;
  std::string rc_checkpoints, rc_seeds;
  std::string rc_agent = "msgi", rc_explorer;
  double rc_alpha = -1.0;
  auto add_run_flags = [&](CLI::App* cmd, bool testing) {
    cmd->add_option("--budget", rc.budget, "adaptation steps per task/seed")
        ->capture_default_str();
    cmd->add_option("--eval-episodes", rc.eval_episodes,
                    "evaluation episodes per checkpoint")
        ->capture_default_str();
    cmd->add_option("--base-seed", rc.base_seed, "root seed for the run")
        ->capture_default_str();
    cmd->add_option("--explorer", rc_explorer,
                    "adaptation policy: ucb|mtucb|random (default per agent)");
    if (testing) {
      cmd->add_option("--checkpoints", rc_checkpoints,
                      "comma list of adaptation steps to evaluate at "
                      "(default 0,100,...,budget)");
      cmd->add_option("--seeds", rc_seeds,
                      "comma list of run seeds (default 0,1,2,3)");
      cmd->add_option("--agent", rc_agent, "mtsgi|msgi|random")
          ->capture_default_str();
      cmd->add_option("--alpha", rc_alpha,
                      "fixed prior-mixture weight in [0,1] "
                      "(default: budget-linear schedule)");
      cmd->add_option("--sample-budget", rc.sample_budget,
                      "truth-table samples for precision/recall on wide graphs")
          ->capture_default_str();
    }
  };

  // --- meta-train ------------------------------------------------------------
  auto* mt = app.add_subcommand("meta-train",
                                "adapt+infer on training tasks, save a prior "
                                "store");
  std::vector<std::string> mt_tasks;
  std::string mt_store = "prior.store";
  std::string mt_traj_dir;
  mt->add_option("--task", mt_tasks, "training task file (repeatable)")
      ->required()
      ->expected(-1);
  mt->add_option("--store", mt_store, "output prior store path")
      ->capture_default_str();
  mt->add_option("--dump-trajectories", mt_traj_dir,
                 "also write each task's adaptation trajectory here");
  add_run_flags(mt, /*testing=*/false);

  // --- meta-test -------------------------------------------------------------
  auto* ms = app.add_subcommand("meta-test",
                                "run the adaptation/evaluation grid, emit CSV");
  std::vector<std::string> ms_tasks;
  std::optional<std::string> ms_store;
  std::string ms_out = "metrics.csv";
  ms->add_option("--task", ms_tasks, "test task file (repeatable)")
      ->required()
      ->expected(-1);
  ms->add_option("--store", ms_store, "prior store (required for mtsgi)");
  ms->add_option("--out", ms_out, "output CSV path ('-' for stdout)")
      ->capture_default_str();
  add_run_flags(ms, /*testing=*/true);

  // --- infer -----------------------------------------------------------------
  auto* inf = app.add_subcommand("infer",
                                 "infer a subtask graph from a trajectory");
  std::string inf_traj, inf_out = "inferred.task";
  std::optional<std::string> inf_task;
  inf->add_option("--trajectory", inf_traj, "trajectory file")->required();
  inf->add_option("--task", inf_task,
                  "task file supplying subtask names (optional)");
  inf->add_option("--out", inf_out, "output graph file")
      ->capture_default_str();

  // --- eval-graph ------------------------------------------------------------
  auto* ev = app.add_subcommand("eval-graph",
                                "evaluate a propagation policy on a task");
  std::string ev_task;
  std::optional<std::string> ev_graph;
  int ev_episodes = 32;
  std::uint64_t ev_seed = 0;
  ev->add_option("--task", ev_task, "environment task file")->required();
  ev->add_option("--graph", ev_graph,
                 "graph file for the policy (default: the task's own graph)");
  ev->add_option("--episodes", ev_episodes, "evaluation episodes")
      ->capture_default_str();
  ev->add_option("--seed", ev_seed, "evaluation seed")->capture_default_str();

  // --- export-dot ------------------------------------------------------------
  auto* dot = app.add_subcommand("export-dot", "render a task graph as DOT");
  std::string dot_task, dot_out = "-";
  dot->add_option("--task", dot_task, "task file")->required();
  dot->add_option("--out", dot_out, "output path ('-' for stdout)")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!rc_checkpoints.empty()) {
      rc.checkpoints.clear();
      for (long long v : parse_list(rc_checkpoints, "--checkpoints"))
        rc.checkpoints.push_back(int(v));
    }
    if (!rc_seeds.empty()) {
      rc.seeds.clear();
      for (long long v : parse_list(rc_seeds, "--seeds"))
        rc.seeds.push_back(std::uint64_t(v));
    }
    if (!rc_explorer.empty()) rc.explorer = parse_explorer(rc_explorer);
    rc.agent = parse_agent(rc_agent);
    if (rc_alpha >= 0.0) rc.alpha_override = rc_alpha;

    if (gen->parsed())
      return cmd_gen(gen_out, prm, gen_count, gen_split, gen_train, gen_test,
                     gen_overlap);
    if (mt->parsed()) return cmd_meta_train(mt_tasks, mt_store, mt_traj_dir, rc);
    if (ms->parsed()) return cmd_meta_test(ms_tasks, ms_store, ms_out, rc);
    if (inf->parsed()) return cmd_infer(inf_traj, inf_task, inf_out);
    if (ev->parsed())
      return cmd_eval_graph(ev_graph, ev_task, ev_episodes, ev_seed);
    if (dot->parsed()) return cmd_export_dot(dot_task, dot_out);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
