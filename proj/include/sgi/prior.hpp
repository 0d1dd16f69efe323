#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sgi/common.hpp"
#include "sgi/explore.hpp"
#include "sgi/graph.hpp"
#include "sgi/task_io.hpp"

namespace sgi {

// ---------------------------------------------------------------------------
// Prior store: one entry per meta-training task.

struct PriorEntry {
  std::string task_name;
  SubtaskGraph graph;         // inferred graph of the prior task
  ExplorationParams explore;  // final exploration parameters
  double eval_return = 0.0;   // mean evaluation return of the prior policy

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(graph.subtasks.size());
    for (const SubtaskSpec& s : graph.subtasks) out.push_back(s.name);
    return out;
  }
};

struct PriorStore {
  std::vector<PriorEntry> entries;
};

// ---------------------------------------------------------------------------
// Similarity between the current task's subtask-name set and a prior entry.

inline double f_beta(const std::vector<std::string>& current_names,
                     const std::vector<std::string>& prior_names,
                     double beta = 10.0) {
  std::set<std::string> cur(current_names.begin(), current_names.end());
  std::set<std::string> pri(prior_names.begin(), prior_names.end());
  std::size_t inter = 0;
  for (const std::string& s : cur) inter += pri.count(s);
  if (inter == 0) return 0.0;
  double precision = double(inter) / double(pri.size());
  double recall = double(inter) / double(cur.size());
  double b2 = beta * beta;
  return (1.0 + b2) * precision * recall / (b2 * precision + recall);
}

// F_beta name overlap plus the prior policy's normalized empirical return
// (clamped against the +5 goal reward).
inline double similarity(const std::vector<std::string>& current_names,
                         const PriorEntry& entry, double kappa = 1.0,
                         double beta = 10.0) {
  double norm_return = std::min(std::max(entry.eval_return / 5.0, 0.0), 1.0);
  return f_beta(current_names, entry.names(), beta) + kappa * norm_return;
}

// Index of the most similar entry; ties break toward the lexicographically
// smallest task name. An empty store cannot supply a prior.
inline int select_prior(const PriorStore& store,
                        const std::vector<std::string>& current_names,
                        double kappa = 1.0, double beta = 10.0) {
  if (store.entries.empty())
    throw SelectionError("select_prior: empty prior store");
  int best = -1;
  double best_sim = 0.0;
  for (int i = 0; i < int(store.entries.size()); ++i) {
    const PriorEntry& e = store.entries[std::size_t(i)];
    double sim = similarity(current_names, e, kappa, beta);
    if (best < 0 || sim > best_sim ||
        (sim == best_sim &&
         e.task_name < store.entries[std::size_t(best)].task_name)) {
      best = i;
      best_sim = sim;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Policy mixing

// alpha ramps linearly from 0 to 1 over the first half of the adaptation
// budget (so the prior dominates early and washes out by mid-phase).
inline double alpha_schedule(long steps_used, long phase_budget) {
  if (phase_budget < 1) throw ContractError("alpha_schedule: bad budget");
  double half = double(phase_budget) / 2.0;
  return std::min(1.0, double(steps_used) / half);
}

// Blend per-subtask logits of the current-task policy with a prior policy's
// logits aligned by name. The current task's masking survives the blend
// (-inf stays -inf); a prior -inf (completed in the prior's mapped state) is
// neutralized to 0 exactly like a name the prior has never seen.
inline std::vector<double> mixed_logits(const std::vector<double>& l_tau,
                                        const std::vector<double>& l_prior,
                                        double alpha) {
  if (l_tau.size() != l_prior.size())
    throw AlignmentError("mixed_logits: size mismatch");
  std::vector<double> out(l_tau.size());
  for (std::size_t i = 0; i < l_tau.size(); ++i) {
    if (l_tau[i] == kNegInf) {
      out[i] = kNegInf;
    } else {
      double lp = l_prior[i] == kNegInf ? 0.0 : l_prior[i];
      out[i] = alpha * l_tau[i] + (1.0 - alpha) * lp;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Store file format:
//   priorstore v1
//   entry <task_name> return=<real>
//   <embedded graph block (task format)>
//   explore r=<csv> n=<csv>

namespace detail {

inline std::vector<double> parse_csv_reals(const std::string& s, int line_no) {
  std::vector<double> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ','))
    out.push_back(parse_real(cur, line_no));
  if (!s.empty() && s.back() == ',')
    throw ParseError("trailing comma in list", line_no);
  return out;
}

inline std::string reals_to_csv(const std::vector<double>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << format_real(v[i]);
  }
  return os.str();
}

}  // namespace detail

inline std::string serialize_store(const PriorStore& store) {
  std::ostringstream os;
  os << "priorstore v1\n";
  for (const PriorEntry& e : store.entries) {
    os << "entry " << e.task_name << " return=" << format_real(e.eval_return)
       << "\n";
    TaskConfig block;
    block.name = e.task_name;
    block.graph = e.graph;
    os << serialize_task(block);
    os << "explore r=" << detail::reals_to_csv(e.explore.r)
       << " n=" << detail::reals_to_csv(e.explore.n) << "\n";
  }
  return os.str();
}

inline PriorStore parse_store(const std::string& text) {
  std::vector<detail::Line> lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError("empty prior store", 1);
  if (lines[0].text != "priorstore v1")
    throw ParseError("expected header 'priorstore v1'", lines[0].no);
  PriorStore store;
  std::size_t pos = 1;
  while (pos < lines.size()) {
    const detail::Line& ln = lines[pos];
    std::vector<std::string> toks = detail::split_ws(ln.text);
    if (toks.size() != 3 || toks[0] != "entry")
      throw ParseError("expected: entry <task_name> return=<real>", ln.no);
    PriorEntry e;
    e.task_name = toks[1];
    e.eval_return = parse_real(detail::take_kv(toks[2], "return", ln.no),
                               ln.no);
    ++pos;
    TaskConfig block = detail::parse_task_block(lines, pos, /*runnable=*/false);
    if (block.name != e.task_name)
      throw ParseError("embedded graph name '" + block.name +
                           "' differs from entry '" + e.task_name + "'",
                       lines[pos - 1].no);
    e.graph = block.graph;
    if (pos >= lines.size())
      throw ParseError("missing explore line for entry '" + e.task_name + "'",
                       lines.back().no);
    const detail::Line& ex = lines[pos];
    std::vector<std::string> extoks = detail::split_ws(ex.text);
    if (extoks.size() != 3 || extoks[0] != "explore")
      throw ParseError("expected: explore r=<csv> n=<csv>", ex.no);
    e.explore.r = detail::parse_csv_reals(detail::take_kv(extoks[1], "r",
                                                          ex.no), ex.no);
    e.explore.n = detail::parse_csv_reals(detail::take_kv(extoks[2], "n",
                                                          ex.no), ex.no);
    if (e.explore.r.size() != e.graph.subtasks.size() ||
        e.explore.n.size() != e.graph.subtasks.size())
      throw ParseError("explore parameter count differs from subtask count",
                       ex.no);
    ++pos;
    store.entries.push_back(std::move(e));
  }
  return store;
}

inline PriorStore load_store(const std::string& path) {
  try {
    return parse_store(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(ParseError::Raw{}, path + ": " + e.what(), e.line);
  }
}

inline void save_store(const std::string& path, const PriorStore& store) {
  write_file(path, serialize_store(store));
}

}  // namespace sgi
