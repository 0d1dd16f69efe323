#pragma once

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "sgi/common.hpp"
#include "sgi/env.hpp"
#include "sgi/graph.hpp"

namespace sgi {

// ---------------------------------------------------------------------------
// Smoothed boolean operators

enum class AndMode {
  SumSoftplus,      // zeta(sum v, w) / zeta(d, w)
  ShiftedSoftplus,  // zeta(sum v - d + 1, w) / zeta(1, w); hard-AND limit
};

struct GRPropParams {
  double lambda_or = 0.6;
  double w_or = 2.0;
  double w_and = 3.0;
  double w_not = 2.0;
  double temperature = 40.0;
  AndMode and_mode = AndMode::SumSoftplus;
  int unroll = 0;  // fixed-point iterations for cyclic graphs; 0 -> N+1
};

// zeta(x, b) = softplus(b*x) / b, numerically stable.
inline double zeta(double x, double b) {
  double bx = b * x;
  if (bx > 0) return (bx + std::log1p(std::exp(-bx))) / b;
  return std::log1p(std::exp(bx)) / b;
}

inline double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

struct SoftValue {
  double value = 0.0;
  std::vector<double> grad;  // d value / d inputs
};

// Weighted softmax-pooled OR: value = s . v with s = softmax(w * v).
inline SoftValue soft_or(const std::vector<double>& v, double w) {
  if (v.empty()) throw ContractError("soft_or: empty input");
  SoftValue out;
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  std::vector<double> s(v.size());
  double z = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    s[k] = std::exp(w * (v[k] - mx));
    z += s[k];
  }
  for (double& sk : s) sk /= z;
  double val = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) val += s[k] * v[k];
  out.value = val;
  out.grad.resize(v.size());
  for (std::size_t k = 0; k < v.size(); ++k)
    out.grad[k] = s[k] * (1.0 + w * (v[k] - val));
  return out;
}

// Softplus-normalized AND over the clause inputs.
inline SoftValue soft_and(const std::vector<double>& v, double w,
                          AndMode mode = AndMode::SumSoftplus) {
  if (v.empty()) throw ContractError("soft_and: empty input");
  double d = double(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  SoftValue out;
  double g = 0.0;
  if (mode == AndMode::SumSoftplus) {
    double denom = zeta(d, w);
    out.value = zeta(sum, w) / denom;
    g = sigmoid(w * sum) / denom;
  } else {
    double denom = zeta(1.0, w);
    out.value = zeta(sum - d + 1.0, w) / denom;
    g = sigmoid(w * (sum - d + 1.0)) / denom;
  }
  out.grad.assign(v.size(), g);
  return out;
}

inline double soft_not(double p, double w) { return -w * p; }

// ---------------------------------------------------------------------------
// Smoothed eligibility network

struct SoftState {
  std::vector<double> e;    // smoothed eligibility per subtask
  std::vector<double> p;    // progress: lambda*e + (1-lambda)*x
  std::vector<double> jac;  // jac[j*n + i] = d e[j] / d x[i]
  int n = 0;

  double de_dx(int j, int i) const { return jac[std::size_t(j) * n + i]; }
};

namespace detail {

// One evaluation of every subtask's smoothed eligibility from a fixed
// progress vector p (with jac_p[k*n+i] = d p[k] / d x[i]), writing e and
// jac_e. Used directly in topological order (exact for DAGs) and as the body
// of the fixed-point iteration for cyclic graphs.
inline void eval_subtask_soft(const SubtaskGraph& g, int i,
                              const GRPropParams& prm,
                              const std::vector<double>& p,
                              const std::vector<double>& jac_p,
                              std::vector<double>& e,
                              std::vector<double>& jac_e) {
  int n = g.size();
  const Precondition& pre = g.preconds[std::size_t(i)];
  double* row = &jac_e[std::size_t(i) * n];
  std::fill(row, row + n, 0.0);
  if (pre.never) { e[std::size_t(i)] = 0.0; return; }
  if (pre.clauses.empty()) { e[std::size_t(i)] = 1.0; return; }

  std::vector<double> clause_vals(pre.clauses.size());
  std::vector<SoftValue> ands(pre.clauses.size());
  for (std::size_t c = 0; c < pre.clauses.size(); ++c) {
    const Clause& cl = pre.clauses[c];
    std::vector<double> xhat(cl.size());
    for (std::size_t k = 0; k < cl.size(); ++k) {
      double pk = p[std::size_t(cl[k].index)];
      xhat[k] = cl[k].negated ? soft_not(pk, prm.w_not) : pk;
    }
    ands[c] = soft_and(xhat, prm.w_and, prm.and_mode);
    clause_vals[c] = ands[c].value;
  }
  SoftValue orv = soft_or(clause_vals, prm.w_or);
  e[std::size_t(i)] = orv.value;

  for (std::size_t c = 0; c < pre.clauses.size(); ++c) {
    const Clause& cl = pre.clauses[c];
    for (std::size_t k = 0; k < cl.size(); ++k) {
      double coeff = orv.grad[c] * ands[c].grad[k] *
                     (cl[k].negated ? -prm.w_not : 1.0);
      if (coeff == 0.0) continue;
      const double* prow = &jac_p[std::size_t(cl[k].index) * n];
      for (int t = 0; t < n; ++t) row[t] += coeff * prow[t];
    }
  }
}

}  // namespace detail

// Smoothed eligibility and its Jacobian w.r.t. the (real-valued) completion
// vector. Exact single pass in topological order for acyclic graphs; cyclic
// graphs run a simultaneous fixed-point unroll that coincides with the
// topological result on DAGs.
inline SoftState smoothed_eligibility(const SubtaskGraph& g,
                                      const std::vector<double>& x,
                                      const GRPropParams& prm) {
  int n = g.size();
  if (int(x.size()) != n)
    throw StructuralError("smoothed_eligibility: x size mismatch");
  SoftState ss;
  ss.n = n;
  ss.e.assign(std::size_t(n), 0.0);
  ss.p.assign(std::size_t(n), 0.0);
  ss.jac.assign(std::size_t(n) * n, 0.0);

  std::vector<double> jac_p(std::size_t(n) * n, 0.0);
  auto set_progress = [&](int k) {
    ss.p[std::size_t(k)] =
        prm.lambda_or * ss.e[std::size_t(k)] +
        (1.0 - prm.lambda_or) * x[std::size_t(k)];
    double* prow = &jac_p[std::size_t(k) * n];
    const double* erow = &ss.jac[std::size_t(k) * n];
    for (int t = 0; t < n; ++t) prow[t] = prm.lambda_or * erow[t];
    prow[k] += 1.0 - prm.lambda_or;
  };

  if (auto order = topo_order(g)) {
    for (int i : *order) {
      detail::eval_subtask_soft(g, i, prm, ss.p, jac_p, ss.e, ss.jac);
      set_progress(i);
    }
    return ss;
  }

  // Cyclic inferred graph: iterate from e = 0 until the unroll budget.
  for (int k = 0; k < n; ++k) set_progress(k);
  int iters = prm.unroll > 0 ? prm.unroll : n + 1;
  std::vector<double> e_next(std::size_t(n), 0.0);
  std::vector<double> jac_next(std::size_t(n) * n, 0.0);
  for (int it = 0; it < iters; ++it) {
    for (int i = 0; i < n; ++i)
      detail::eval_subtask_soft(g, i, prm, ss.p, jac_p, e_next, jac_next);
    ss.e = e_next;
    ss.jac = jac_next;
    for (int k = 0; k < n; ++k) set_progress(k);
  }
  return ss;
}

// ---------------------------------------------------------------------------
// GRProp logits: how much completing each subtask raises the smoothed return
// U = sum_j mu_j * (lambda*e_j + (1-lambda)*x_j), scaled by temperature.
// Completed subtasks and subtasks on pages not yet open are masked to -inf.

inline std::vector<double> grprop_logits_unmasked(const SubtaskGraph& g,
                                                  const BitVec& x,
                                                  const GRPropParams& prm) {
  int n = g.size();
  std::vector<double> xr(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xr[std::size_t(i)] = x[std::size_t(i)] ? 1.0 : 0.0;
  SoftState ss = smoothed_eligibility(g, xr, prm);
  std::vector<double> logits(std::size_t(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double grad = 0.0;
    for (int j = 0; j < n; ++j)
      grad += g.subtasks[std::size_t(j)].mu * ss.de_dx(j, i);
    logits[std::size_t(i)] =
        prm.temperature * (prm.lambda_or * grad +
                           (1.0 - prm.lambda_or) * g.subtasks[std::size_t(i)].mu);
  }
  return logits;
}

inline std::vector<double> grprop_logits(const SubtaskGraph& g, const BitVec& x,
                                         const GRPropParams& prm) {
  std::vector<double> logits = grprop_logits_unmasked(g, x, prm);
  int n = g.size();
  int n_pages = 1;
  for (const SubtaskSpec& s : g.subtasks) n_pages = std::max(n_pages, s.page + 1);
  int page = n_pages - 1;
  if (n_pages > 1 && is_acyclic(g)) {
    std::vector<std::optional<int>> gates =
        detail::compute_page_gates(g, n_pages);
    page = 0;
    while (page < n_pages - 1) {
      const std::optional<int>& gate = gates[std::size_t(page)];
      if (gate && !x[std::size_t(*gate)]) break;
      ++page;
    }
  }
  for (int i = 0; i < n; ++i)
    if (x[std::size_t(i)] || g.subtasks[std::size_t(i)].page > page)
      logits[std::size_t(i)] = kNegInf;
  return logits;
}

// ---------------------------------------------------------------------------
// Caching policy wrapper: logits per distinct completion vector.

class GRPropPolicy {
 public:
  GRPropPolicy(const SubtaskGraph& graph, const GRPropParams& prm)
      : graph_(graph), prm_(prm) {
    validate_graph(graph_);
  }

  const std::vector<double>& logits(const BitVec& x) const {
    std::string key(x.begin(), x.end());
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(std::move(key), grprop_logits(graph_, x, prm_))
        .first->second;
  }

  const SubtaskGraph& graph() const { return graph_; }
  const GRPropParams& params() const { return prm_; }

 private:
  SubtaskGraph graph_;
  GRPropParams prm_;
  mutable std::unordered_map<std::string, std::vector<double>> cache_;
};

}  // namespace sgi
