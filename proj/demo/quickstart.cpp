// Quickstart: generate a task, explore it with UCB, infer its subtask graph
// from the trajectory, and evaluate the propagation policy built from the
// inferred graph. Mirrors the README walkthrough.

#include <iostream>

#include "sgi/sgi.hpp"

int main() {
  using namespace sgi;

  // 1. A random 20-subtask task spread over 3 pages.
  GenParams prm;
  prm.n_subtasks = 20;
  prm.n_pages = 3;
  prm.seed = 7;
  TaskConfig task = generate_task(prm);
  std::cout << "task " << task.name << ": " << task.size() << " subtasks, "
            << task.n_pages << " pages, episode length "
            << task.episode_length << "\n";

  // 2. Adapt for 500 steps with the UCB exploration policy.
  AdaptResult adapt = run_adaptation(task, Explorer::Ucb, 500, /*seed=*/1);
  std::cout << "collected " << adapt.traj.size() << " adaptation steps\n";

  // 3. Infer the latent subtask graph from the trajectory.
  std::vector<std::string> names;
  for (const SubtaskSpec& sp : task.graph.subtasks) names.push_back(sp.name);
  SubtaskGraph inferred = infer_graph(adapt.traj, names);
  PrecisionRecall pr = graph_precision_recall(inferred, task.graph);
  std::cout << "inferred graph precision " << format_real(pr.precision)
            << ", recall " << format_real(pr.recall) << "\n";

  // 4. Evaluate a propagation policy built from the inferred graph.
  Policy policy = make_grprop_policy(inferred, GRPropParams{});
  EvalResult res = evaluate(task, policy, /*episodes=*/16, /*seed=*/2);
  std::cout << "evaluation success rate " << format_real(res.success_rate)
            << ", mean return " << format_real(res.mean_return) << "\n";

  // 5. The graph renders as Graphviz DOT for inspection.
  std::cout << "dot output is " << to_dot(inferred).size() << " bytes\n";
  return 0;
}
