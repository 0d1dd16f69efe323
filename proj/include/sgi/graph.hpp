#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sgi/common.hpp"

namespace sgi {

// ---------------------------------------------------------------------------
// Core types

enum class SubtaskKind { Normal, Goal, FailureDistractor, NoopDistractor };

inline const char* kind_to_string(SubtaskKind k) {
  switch (k) {
    case SubtaskKind::Normal: return "normal";
    case SubtaskKind::Goal: return "goal";
    case SubtaskKind::FailureDistractor: return "failure";
    case SubtaskKind::NoopDistractor: return "noop";
  }
  return "normal";
}

inline SubtaskKind kind_from_string(const std::string& s, int line_no) {
  if (s == "normal") return SubtaskKind::Normal;
  if (s == "goal") return SubtaskKind::Goal;
  if (s == "failure") return SubtaskKind::FailureDistractor;
  if (s == "noop") return SubtaskKind::NoopDistractor;
  throw ParseError("unknown subtask kind '" + s + "'", line_no);
}

struct Literal {
  int index = 0;
  bool negated = false;
  friend bool operator==(const Literal& a, const Literal& b) {
    return a.index == b.index && a.negated == b.negated;
  }
  friend bool operator<(const Literal& a, const Literal& b) {
    return a.index != b.index ? a.index < b.index : a.negated < b.negated;
  }
};

using Clause = std::vector<Literal>;  // conjunction of literals

// Disjunction of clauses (sum of products). Empty clause list means the
// precondition is ALWAYS-TRUE; `never` marks an always-false precondition
// (a subtask that was never eligible in the data it was inferred from).
struct Precondition {
  std::vector<Clause> clauses;
  bool never = false;

  bool always_true() const { return !never && clauses.empty(); }
  friend bool operator==(const Precondition& a, const Precondition& b) {
    return a.never == b.never && a.clauses == b.clauses;
  }
};

struct SubtaskSpec {
  std::string name;
  SubtaskKind kind = SubtaskKind::Normal;
  double mu = 0.0;
  double sigma = 0.0;
  int page = 0;
  friend bool operator==(const SubtaskSpec& a, const SubtaskSpec& b) {
    return a.name == b.name && a.kind == b.kind && a.mu == b.mu &&
           a.sigma == b.sigma && a.page == b.page;
  }
};

struct SubtaskGraph {
  std::vector<SubtaskSpec> subtasks;
  std::vector<Precondition> preconds;

  int size() const { return int(subtasks.size()); }
  friend bool operator==(const SubtaskGraph& a, const SubtaskGraph& b) {
    return a.subtasks == b.subtasks && a.preconds == b.preconds;
  }
};

// Structural checks shared by every consumer of a graph: parallel arrays,
// unique single-token names, literal indices in range, no self-reference.
inline void validate_graph(const SubtaskGraph& g) {
  int n = g.size();
  if (int(g.preconds.size()) != n)
    throw StructuralError("graph: preconds/subtasks size mismatch");
  std::set<std::string> names;
  for (int i = 0; i < n; ++i) {
    const std::string& nm = g.subtasks[i].name;
    if (nm.empty()) throw StructuralError("graph: empty subtask name");
    if (nm.find_first_of(" \t=") != std::string::npos)
      throw StructuralError("graph: name '" + nm + "' contains reserved chars");
    if (!names.insert(nm).second)
      throw StructuralError("graph: duplicate subtask name '" + nm + "'");
  }
  for (int i = 0; i < n; ++i) {
    for (const Clause& c : g.preconds[i].clauses) {
      if (c.empty()) throw StructuralError("graph: empty clause");
      for (const Literal& l : c) {
        if (l.index < 0 || l.index >= n)
          throw StructuralError("graph: literal index out of range");
        if (l.index == i)
          throw StructuralError("graph: self-referencing precondition on '" +
                                g.subtasks[i].name + "'");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Boolean evaluation

inline bool eval_precondition(const Precondition& pre, const BitVec& x) {
  if (pre.never) return false;
  if (pre.clauses.empty()) return true;
  for (const Clause& c : pre.clauses) {
    bool sat = true;
    for (const Literal& l : c) {
      if (l.index < 0 || l.index >= int(x.size()))
        throw StructuralError("eval_precondition: literal index out of range");
      bool bit = x[std::size_t(l.index)] != 0;
      if (bit == l.negated) { sat = false; break; }
    }
    if (sat) return true;
  }
  return false;
}

inline BitVec eligibility(const SubtaskGraph& g, const BitVec& x) {
  if (int(x.size()) != g.size())
    throw StructuralError("eligibility: completion vector size mismatch");
  BitVec e(x.size(), 0);
  for (int i = 0; i < g.size(); ++i)
    e[std::size_t(i)] = eval_precondition(g.preconds[std::size_t(i)], x) ? 1 : 0;
  return e;
}

// ---------------------------------------------------------------------------
// Dependency structure

// Topological order over edges (literal -> subtask); nullopt when cyclic.
inline std::optional<std::vector<int>> topo_order(const SubtaskGraph& g) {
  int n = g.size();
  std::vector<int> indeg(std::size_t(n), 0);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::set<int> deps;
    for (const Clause& c : g.preconds[std::size_t(i)].clauses)
      for (const Literal& l : c) deps.insert(l.index);
    for (int d : deps) {
      out[std::size_t(d)].push_back(i);
      ++indeg[std::size_t(i)];
    }
  }
  std::vector<int> order;
  order.reserve(std::size_t(n));
  std::vector<int> queue;
  for (int i = 0; i < n; ++i)
    if (indeg[std::size_t(i)] == 0) queue.push_back(i);
  for (std::size_t q = 0; q < queue.size(); ++q) {
    int u = queue[q];
    order.push_back(u);
    for (int v : out[std::size_t(u)])
      if (--indeg[std::size_t(v)] == 0) queue.push_back(v);
  }
  if (int(order.size()) != n) return std::nullopt;
  return order;
}

inline bool is_acyclic(const SubtaskGraph& g) { return topo_order(g).has_value(); }

// Subtasks whose completion is required for i to ever become eligible:
// intersection over clauses of (positive literals plus their own requirements).
// Graph must be acyclic.
inline std::vector<std::set<int>> required_ancestors(const SubtaskGraph& g) {
  auto order = topo_order(g);
  if (!order) throw StructuralError("required_ancestors: graph is cyclic");
  std::vector<std::set<int>> req(static_cast<std::size_t>(g.size()));
  for (int i : *order) {
    const Precondition& pre = g.preconds[std::size_t(i)];
    if (pre.never || pre.clauses.empty()) continue;
    bool first = true;
    std::set<int> acc;
    for (const Clause& c : pre.clauses) {
      std::set<int> clause_req;
      for (const Literal& l : c) {
        if (l.negated) continue;
        clause_req.insert(l.index);
        const std::set<int>& sub = req[std::size_t(l.index)];
        clause_req.insert(sub.begin(), sub.end());
      }
      if (first) {
        acc = std::move(clause_req);
        first = false;
      } else {
        std::set<int> inter;
        std::set_intersection(acc.begin(), acc.end(), clause_req.begin(),
                              clause_req.end(),
                              std::inserter(inter, inter.begin()));
        acc = std::move(inter);
      }
      if (acc.empty()) break;
    }
    req[std::size_t(i)] = std::move(acc);
  }
  return req;
}

// ---------------------------------------------------------------------------
// Truth-table precision / recall between an inferred and a ground-truth graph
// sharing one name set.

struct PrecisionRecall {
  double precision = 1.0;
  double recall = 1.0;
};

namespace detail {

// Permutation mapping inferred subtask index -> truth subtask index by name.
inline std::vector<int> align_by_name(const SubtaskGraph& inferred,
                                      const SubtaskGraph& truth) {
  if (inferred.size() != truth.size())
    throw AlignmentError("precision_recall: graphs differ in size");
  std::map<std::string, int> truth_idx;
  for (int i = 0; i < truth.size(); ++i)
    truth_idx[truth.subtasks[std::size_t(i)].name] = i;
  std::vector<int> perm(std::size_t(inferred.size()), -1);
  for (int i = 0; i < inferred.size(); ++i) {
    auto it = truth_idx.find(inferred.subtasks[std::size_t(i)].name);
    if (it == truth_idx.end())
      throw AlignmentError("precision_recall: name '" +
                           inferred.subtasks[std::size_t(i)].name +
                           "' missing from ground truth");
    perm[std::size_t(i)] = it->second;
  }
  return perm;
}

// Precondition of `pre` with literal indices remapped through perm.
inline Precondition remap_precondition(const Precondition& pre,
                                       const std::vector<int>& perm) {
  Precondition out;
  out.never = pre.never;
  out.clauses.reserve(pre.clauses.size());
  for (const Clause& c : pre.clauses) {
    Clause rc;
    rc.reserve(c.size());
    for (const Literal& l : c)
      rc.push_back(Literal{perm[std::size_t(l.index)], l.negated});
    out.clauses.push_back(std::move(rc));
  }
  return out;
}

}  // namespace detail

// Eligibility agreement measured truth-table-wise over a sample set X in the
// ground truth's index space: exhaustive 2^N when N <= 16, otherwise
// `sample_budget` seeded uniform draws, de-duplicated. Per subtask,
// precision = |P & T| / |P| and recall = |P & T| / |T| with the empty-set
// convention of 1; the result is the mean over subtasks.
inline PrecisionRecall graph_precision_recall(const SubtaskGraph& inferred,
                                              const SubtaskGraph& truth,
                                              int sample_budget = 4096,
                                              std::uint64_t seed = 0) {
  std::vector<int> perm = detail::align_by_name(inferred, truth);
  int n = truth.size();
  std::vector<Precondition> inf_pre(static_cast<std::size_t>(n));
  for (int i = 0; i < inferred.size(); ++i)
    inf_pre[std::size_t(perm[std::size_t(i)])] =
        detail::remap_precondition(inferred.preconds[std::size_t(i)], perm);

  std::vector<BitVec> xs;
  if (n <= 16) {
    xs.reserve(std::size_t(1) << n);
    for (std::uint32_t code = 0; code < (std::uint32_t(1) << n); ++code) {
      BitVec x(std::size_t(n), 0);
      for (int b = 0; b < n; ++b) x[std::size_t(b)] = (code >> b) & 1u;
      xs.push_back(std::move(x));
    }
  } else {
    if (sample_budget <= 0)
      throw ContractError("graph_precision_recall: sample_budget must be > 0");
    Rng rng(hash_combine(seed, 0x70726563ULL));
    std::set<std::vector<std::uint64_t>> seen;
    while (int(xs.size()) < sample_budget) {
      BitVec x(std::size_t(n), 0);
      for (int b = 0; b < n; ++b)
        x[std::size_t(b)] = std::uint8_t(rng.next_u64() & 1u);
      std::vector<std::uint64_t> key((std::size_t(n) + 63) / 64, 0);
      for (int b = 0; b < n; ++b)
        if (x[std::size_t(b)]) key[std::size_t(b) / 64] |= 1ULL << (b % 64);
      if (seen.insert(std::move(key)).second) xs.push_back(std::move(x));
    }
  }

  double psum = 0.0, rsum = 0.0;
  for (int i = 0; i < n; ++i) {
    long np = 0, nt = 0, nboth = 0;
    for (const BitVec& x : xs) {
      bool p = eval_precondition(inf_pre[std::size_t(i)], x);
      bool t = eval_precondition(truth.preconds[std::size_t(i)], x);
      np += p;
      nt += t;
      nboth += (p && t);
    }
    psum += np == 0 ? 1.0 : double(nboth) / double(np);
    rsum += nt == 0 ? 1.0 : double(nboth) / double(nt);
  }
  return PrecisionRecall{psum / n, rsum / n};
}

// ---------------------------------------------------------------------------
// DOT export. One node per subtask; a clause with >= 2 literals materializes
// an AND node; negated literals use dashed edges.

inline std::string to_dot(const SubtaskGraph& g) {
  std::ostringstream os;
  os << "digraph subtasks {\n";
  os << "  rankdir=TB;\n";
  for (int i = 0; i < g.size(); ++i) {
    const SubtaskSpec& s = g.subtasks[std::size_t(i)];
    os << "  n" << i << " [shape=box,label=\"" << s.name << "\\n"
       << kind_to_string(s.kind) << " mu=" << format_real(s.mu);
    if (g.preconds[std::size_t(i)].never) os << "\\nnever";
    os << "\"];\n";
  }
  for (int i = 0; i < g.size(); ++i) {
    const Precondition& pre = g.preconds[std::size_t(i)];
    for (std::size_t c = 0; c < pre.clauses.size(); ++c) {
      const Clause& cl = pre.clauses[c];
      if (cl.size() == 1) {
        os << "  n" << cl[0].index << " -> n" << i;
        if (cl[0].negated) os << " [style=dashed]";
        os << ";\n";
      } else {
        os << "  a" << i << "_" << c
           << " [shape=ellipse,label=\"AND\",width=0.3];\n";
        for (const Literal& l : cl) {
          os << "  n" << l.index << " -> a" << i << "_" << c;
          if (l.negated) os << " [style=dashed]";
          os << ";\n";
        }
        os << "  a" << i << "_" << c << " -> n" << i << ";\n";
      }
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace sgi
