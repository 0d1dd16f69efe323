#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "sgi/common.hpp"

namespace sgi {

// ---------------------------------------------------------------------------
// Count-based exploration state: empirical mean reward and pull count per
// subtask of the current task.

struct ExplorationParams {
  std::vector<double> r;
  std::vector<double> n;

  explicit ExplorationParams(int size = 0)
      : r(std::size_t(size), 0.0), n(std::size_t(size), 0.0) {}

  int size() const { return int(r.size()); }
};

enum class UcbVariant {
  Typeset,  // r_i + sqrt(2) * log(sum n) / n_i
  Ucb1,     // r_i + sqrt(2 * log(sum n) / n_i)
};

// Exploration logits. Unpulled options use n_i := 1 inside the bonus and the
// total count is floored at 1, so the all-zero state gives uniform logits.
inline std::vector<double> ucb_logits(const ExplorationParams& p,
                                      UcbVariant variant = UcbVariant::Typeset) {
  double total = 0.0;
  for (double ni : p.n) total += ni;
  total = std::max(total, 1.0);
  double lg = std::log(total);
  std::vector<double> logits(p.r.size());
  for (std::size_t i = 0; i < p.r.size(); ++i) {
    double ni = std::max(p.n[i], 1.0);
    double bonus = variant == UcbVariant::Typeset
                       ? std::sqrt(2.0) * lg / ni
                       : std::sqrt(2.0 * lg / ni);
    logits[i] = p.r[i] + bonus;
  }
  return logits;
}

// One executed step: bump the count and fold the reward into the running mean.
inline void update_params(ExplorationParams& p, int option, double reward) {
  if (option < 0 || option >= p.size())
    throw ContractError("update_params: option index out of range");
  p.n[std::size_t(option)] += 1.0;
  p.r[std::size_t(option)] +=
      (reward - p.r[std::size_t(option)]) / p.n[std::size_t(option)];
}

// Warm start from a prior task's parameters, aligned by subtask name.
// Names absent from the prior start at (0, 0); prior-only names are dropped.
inline ExplorationParams init_from_prior(
    const std::vector<std::string>& current_names,
    const std::vector<std::string>& prior_names,
    const ExplorationParams& prior) {
  if (int(prior_names.size()) != prior.size())
    throw AlignmentError("init_from_prior: prior name/param size mismatch");
  std::map<std::string, int> idx;
  for (std::size_t i = 0; i < prior_names.size(); ++i)
    idx[prior_names[i]] = int(i);
  ExplorationParams out(int(current_names.size()));
  for (std::size_t i = 0; i < current_names.size(); ++i) {
    auto it = idx.find(current_names[i]);
    if (it == idx.end()) continue;
    out.r[i] = prior.r[std::size_t(it->second)];
    out.n[i] = prior.n[std::size_t(it->second)];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Action selection shared by every policy: softmax-sample the logits over the
// executable options; when nothing is executable fall back to a uniform pick
// over progressively weaker masks so the policy stays total.

inline int pick_uniform(const BitVec& mask, Rng& rng) {
  std::vector<int> pool;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) pool.push_back(int(i));
  if (pool.empty()) return -1;
  return pool[std::size_t(rng.uniform_int(pool.size()))];
}

inline int pick_option(const std::vector<double>& logits,
                       const BitVec& executable, const BitVec& fallback,
                       Rng& rng) {
  if (logits.size() != executable.size())
    throw ContractError("pick_option: size mismatch");
  std::vector<double> masked(logits);
  for (std::size_t i = 0; i < masked.size(); ++i)
    if (!executable[i]) masked[i] = kNegInf;
  std::vector<double> probs;
  if (masked_softmax(masked, probs)) return sample_categorical(probs, rng);
  int pick = pick_uniform(fallback, rng);
  if (pick >= 0) return pick;
  // Degenerate states: anything incomplete, then anything at all.
  BitVec any(executable.size(), 1);
  return pick_uniform(any, rng);
}

// Uniform over executable options with the same fallback chain.
inline int random_pick(const BitVec& executable, const BitVec& fallback,
                       Rng& rng) {
  int pick = pick_uniform(executable, rng);
  if (pick >= 0) return pick;
  pick = pick_uniform(fallback, rng);
  if (pick >= 0) return pick;
  BitVec any(executable.size(), 1);
  return pick_uniform(any, rng);
}

}  // namespace sgi
