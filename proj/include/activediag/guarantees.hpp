// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Weak adaptive submodularity factors of the group-based reward.
//
// For a belief S and a candidate (v, y) write S'_q = S_q intersected with
// D(y, v, q) and tau = sum_q sum_{x in S'_q} P[x,q]. The sweep factors are
// maxima of
//
//   zeta     : P[union_q S'_q]           / tau
//   zeta_bar : sum_q sum_{x in S'_q} P[x] / tau
//
// over beliefs reached by every action sequence of length 1..k from every
// supported true pair. The empirical factor is the largest ratio
// Delta(v | psi') / Delta(v | psi) over reachable subrealization pairs
// psi in psi' and actions v outside psi'. Expected ordering:
//
//   1 <= zeta_star <= zeta <= zeta_bar <= |Q| / min_{P[x,q] > 0} P[x,q].

#ifndef ACTIVEDIAG_GUARANTEES_HPP_
#define ACTIVEDIAG_GUARANTEES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "activediag/belief.hpp"
#include "activediag/error.hpp"
#include "activediag/model.hpp"
#include "activediag/policy.hpp"
#include "json.hpp"

namespace activediag {

// Delta values at or below this are treated as zero by the empirical factor.
inline constexpr double kDeltaFloor = 1e-12;

struct FactorWitness {
  std::vector<Observation> realization;  // psi_t (for zeta_star: the larger psi')
  std::vector<Observation> subrealization;  // zeta_star only: psi
  std::size_t action = 0;
  std::size_t outcome = 0;  // sweep factors only
  std::optional<std::pair<std::size_t, std::size_t>> true_pair;
  double value = 0.0;
};

struct ZetaResult {
  double value = 0.0;
  FactorWitness witness;
};

struct ZetaStarResult {
  double value = 1.0;
  FactorWitness witness;
  std::size_t pairs_checked = 0;
  // Pairs with Delta(v|psi) ~ 0 but Delta(v|psi') > 0: no finite factor covers them.
  std::size_t hard_violations = 0;
  std::optional<FactorWitness> hard_witness;
};

namespace detail {

inline std::vector<std::uint64_t> SpacesKey(const BeliefState& belief) {
  std::vector<std::uint64_t> key;
  for (const StateSet& s : belief.version_spaces()) {
    key.insert(key.end(), s.words().begin(), s.words().end());
  }
  return key;
}

struct SweepResult {
  ZetaResult zeta;
  ZetaResult zeta_bar;
};

// Ratio maxima over every (v, y) at one belief.
inline void ScoreBelief(const DiagnosisModel& model, const BeliefState& belief,
                        const std::pair<std::size_t, std::size_t>& pair, SweepResult& out) {
  for (std::size_t v = 0; v < model.num_actions(); ++v) {
    const OutcomeSplit split = split_by_outcome(model, belief, v);
    for (std::size_t i = 0; i < split.outcomes.size(); ++i) {
      const double tau = split.tau[i];
      if (!(tau > 0.0)) continue;  // empty restricted support: no realization
      const double ratio = state_mass(model, split.unions[i]) / tau;
      const double ratio_bar = split.mode_summed[i] / tau;
      if (ratio > out.zeta.value) {
        out.zeta = {ratio, {belief.realization().steps(), {}, v, split.outcomes[i], pair, ratio}};
      }
      if (ratio_bar > out.zeta_bar.value) {
        out.zeta_bar = {ratio_bar,
                        {belief.realization().steps(), {}, v, split.outcomes[i], pair, ratio_bar}};
      }
    }
  }
}

// Walks every action sequence v_1..v_k (repeats allowed) with outcomes
// generated by `pair`, scoring each prefix belief of length 1..k. Beliefs are
// scored once per distinct version-space family; a subtree is skipped when
// the same family was already expanded for this pair at the same depth.
inline void WalkSequences(const DiagnosisModel& model, const BeliefState& belief, std::size_t t,
                          std::size_t k, const std::pair<std::size_t, std::size_t>& pair,
                          std::set<std::vector<std::uint64_t>>& scored,
                          std::set<std::pair<std::vector<std::uint64_t>, std::size_t>>& expanded,
                          SweepResult& out) {
  if (t == k) return;
  for (std::size_t v = 0; v < model.num_actions(); ++v) {
    const std::size_t y = model.outcome(v, pair.first, pair.second);
    const BeliefState next = update_belief(model, belief, v, y);
    auto key = SpacesKey(next);
    if (scored.insert(key).second) ScoreBelief(model, next, pair, out);
    if (expanded.emplace(std::move(key), t + 1).second) {
      WalkSequences(model, next, t + 1, k, pair, scored, expanded, out);
    }
  }
}

inline SweepResult Sweep(const DiagnosisModel& model, std::size_t k, std::uint64_t cap,
                         std::optional<std::pair<std::size_t, std::size_t>> only_pair) {
  if (k == 0) throw DomainError("budget must be at least 1");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (only_pair) {
    model.states().check(only_pair->first);
    model.modes().check(only_pair->second);
    if (!(model.prior(only_pair->first, only_pair->second) > 0.0)) {
      throw DomainError("true pair has zero prior probability");
    }
    pairs.push_back(*only_pair);
  } else {
    for (std::size_t x = 0; x < model.num_states(); ++x) {
      for (std::size_t q = 0; q < model.num_modes(); ++q) {
        if (model.prior(x, q) > 0.0) pairs.emplace_back(x, q);
      }
    }
  }
  const std::uint64_t work = SaturatingMul(
      SaturatingMul(pairs.size(), SaturatingPow(model.num_actions(), k)),
      SaturatingMul(model.num_actions(), model.num_outcomes()));
  if (work > cap) {
    throw SizeError("factor sweep needs " + std::to_string(work) +
                    " ratio evaluations, above the cap of " + std::to_string(cap));
  }
  SweepResult out;
  std::set<std::vector<std::uint64_t>> scored;
  const BeliefState root = BeliefState::Initial(model);
  for (const auto& pair : pairs) {
    std::set<std::pair<std::vector<std::uint64_t>, std::size_t>> expanded;
    WalkSequences(model, root, 0, k, pair, scored, expanded, out);
  }
  return out;
}

}  // namespace detail

inline constexpr std::uint64_t kDefaultFactorCap = 2'000'000'000;

// Sweep factor zeta over all supported true pairs (or one pair when given).
inline ZetaResult compute_zeta_algorithm1(
    const DiagnosisModel& model, std::size_t k, std::uint64_t cap = kDefaultFactorCap,
    std::optional<std::pair<std::size_t, std::size_t>> only_pair = std::nullopt) {
  return detail::Sweep(model, k, cap, only_pair).zeta;
}

inline ZetaResult compute_zeta_bar(const DiagnosisModel& model, std::size_t k,
                                   std::uint64_t cap = kDefaultFactorCap) {
  return detail::Sweep(model, k, cap, std::nullopt).zeta_bar;
}

// All realizations reachable with positive probability using distinct
// actions, up to `depth` observations, keyed by their sorted observation set.
class RealizationTree {
 public:
  using Key = std::vector<std::pair<std::size_t, std::size_t>>;

  RealizationTree(const DiagnosisModel& model, std::size_t depth, std::uint64_t cap) {
    nodes_.emplace(Key{}, BeliefState::Initial(model));
    std::vector<Key> frontier{Key{}};
    for (std::size_t d = 0; d < depth && !frontier.empty(); ++d) {
      std::vector<Key> next_frontier;
      for (const Key& key : frontier) {
        const BeliefState& belief = nodes_.at(key);
        for (std::size_t v : untaken_actions(model, belief)) {
          const OutcomeSplit split = split_by_outcome(model, belief, v);
          for (std::size_t i = 0; i < split.outcomes.size(); ++i) {
            if (!(split.tau[i] > 0.0)) continue;
            Key child = key;
            child.emplace_back(v, split.outcomes[i]);
            std::sort(child.begin(), child.end());
            if (nodes_.count(child)) continue;
            nodes_.emplace(child, update_belief(model, belief, v, split.outcomes[i]));
            if (nodes_.size() > cap) {
              throw SizeError("realization tree exceeds the cap of " + std::to_string(cap));
            }
            next_frontier.push_back(std::move(child));
          }
        }
      }
      frontier = std::move(next_frontier);
    }
  }

  const std::map<Key, BeliefState>& nodes() const { return nodes_; }
  const BeliefState& at(const Key& key) const { return nodes_.at(key); }

 private:
  std::map<Key, BeliefState> nodes_;
};

inline constexpr std::uint64_t kDefaultTreeCap = 2'000'000;

// Largest Delta(v|psi') / Delta(v|psi) over reachable psi in psi' with
// |psi'| <= depth and v untaken in psi'. Returns 1 when no ratio exceeds 1.
inline ZetaStarResult empirical_zeta_star(const DiagnosisModel& model, std::size_t depth,
                                          std::uint64_t cap = kDefaultTreeCap) {
  const RealizationTree tree(model, depth, cap);
  std::map<std::pair<RealizationTree::Key, std::size_t>, double> delta_cache;
  auto delta = [&](const RealizationTree::Key& key, std::size_t v) {
    auto it = delta_cache.find({key, v});
    if (it != delta_cache.end()) return it->second;
    const double d = marginal_benefit(model, tree.at(key), v);
    delta_cache.emplace(std::make_pair(key, v), d);
    return d;
  };
  auto steps_of = [](const RealizationTree::Key& key) {
    std::vector<Observation> out;
    for (const auto& [a, y] : key) out.push_back({a, y});
    return out;
  };

  ZetaStarResult result;
  for (const auto& [key, belief] : tree.nodes()) {
    const std::size_t t = key.size();
    const std::vector<std::size_t> open = untaken_actions(model, belief);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << t); ++mask) {
      RealizationTree::Key sub;
      for (std::size_t i = 0; i < t; ++i) {
        if ((mask >> i) & 1u) sub.push_back(key[i]);
      }
      for (std::size_t v : open) {
        const double small = delta(sub, v);
        const double large = delta(key, v);
        ++result.pairs_checked;
        if (small > kDeltaFloor) {
          const double ratio = large / small;
          if (ratio > result.value) {
            result.value = ratio;
            result.witness = {steps_of(key), steps_of(sub), v, 0, std::nullopt, ratio};
          }
        } else if (large > kDeltaFloor) {
          ++result.hard_violations;
          if (!result.hard_witness) {
            result.hard_witness = FactorWitness{steps_of(key), steps_of(sub), v, 0, std::nullopt,
                                                std::numeric_limits<double>::infinity()};
          }
        }
      }
    }
  }
  return result;
}

// Per-outcome quantities of the marginal benefit of v at a belief:
// tau_y = sum_q sum_{x in S_q cap D(y,v,q)} P[x,q] and zeta_y = M_y / tau_y
// with M_y the state mass of the restricted union. Only outcomes with
// tau_y > 0 are listed.
struct DeltaDecomposition {
  std::vector<std::size_t> outcomes;
  std::vector<double> tau;
  std::vector<double> zeta;
  double alive_mass = 0.0;  // state mass of the union of the current version spaces

  double tau_total() const {
    double s = 0.0;
    for (double t : tau) s += t;
    return s;
  }

  // sum zeta_y tau_y - (sum zeta_y tau_y^2) / (sum tau_y). This equals the
  // marginal benefit only when the restricted unions partition the alive
  // states (e.g. a single mode); otherwise it is off by overlap().
  double recombine() const {
    double lin = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
      lin += zeta[i] * tau[i];
      sq += zeta[i] * tau[i] * tau[i];
    }
    return lin - sq / tau_total();
  }

  // sum_i zeta_i tau_i (sum_{j != i} tau_j) / sum tau; algebraically equal to
  // recombine().
  double recombine_pairwise() const {
    const double total = tau_total();
    double s = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) s += zeta[i] * tau[i] * (total - tau[i]);
    return s / total;
  }

  // alive_mass - (sum zeta_y tau_y^2) / (sum tau_y): always the marginal benefit.
  double recombine_with_alive_mass() const {
    double sq = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) sq += zeta[i] * tau[i] * tau[i];
    return alive_mass - sq / tau_total();
  }

  // sum_y M_y - alive_mass. Positive when a state is counted under several
  // outcomes; negative when alive mass is reachable only through zero-prior
  // pairs, whose outcomes carry no tau and are left out.
  double overlap() const {
    double lin = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) lin += zeta[i] * tau[i];
    return lin - alive_mass;
  }
};

inline DeltaDecomposition delta_decomposition(const DiagnosisModel& model,
                                              const BeliefState& belief, std::size_t v) {
  if (!(belief.realization_probability() > 0.0)) {
    throw ContradictionError("realization has zero probability", v, 0);
  }
  const OutcomeSplit split = split_by_outcome(model, belief, v);
  DeltaDecomposition out;
  out.alive_mass = state_mass(model, belief.indistinguishable());
  for (std::size_t i = 0; i < split.outcomes.size(); ++i) {
    if (!(split.tau[i] > 0.0)) continue;
    out.outcomes.push_back(split.outcomes[i]);
    out.tau.push_back(split.tau[i]);
    out.zeta.push_back(state_mass(model, split.unions[i]) / split.tau[i]);
  }
  return out;
}

// b(tau) = sum tau - (sum tau^2) / (sum tau).
inline double b_function(std::span<const double> taus) {
  double total = 0.0, squares = 0.0;
  for (double t : taus) {
    if (!(t >= 0.0)) throw DomainError("b is defined on the nonnegative orthant");
    total += t;
    squares += t * t;
  }
  if (!(total > 0.0)) throw DomainError("b is undefined at the zero vector");
  return total - squares / total;
}

// 1 - exp(-ell / (zeta k)).
inline double guarantee_bound(double zeta, std::size_t k, std::size_t ell) {
  if (!(zeta >= 1.0)) throw DomainError("zeta must be at least 1");
  if (k == 0) throw DomainError("k must be at least 1");
  if (ell == 0) throw DomainError("ell must be at least 1");
  if (std::isinf(zeta)) return 0.0;
  return 1.0 - std::exp(-static_cast<double>(ell) / (zeta * static_cast<double>(k)));
}

// ---------------------------------------------------------------------------

struct FactorReport {
  std::size_t budget = 0;
  std::size_t depth = 0;
  ZetaResult zeta_alg;
  ZetaResult zeta_alg_single_pair;
  ZetaResult zeta_bar;
  ZetaStarResult zeta_star;
  double upper_bound = 0.0;

  // Names of the ordering links that fail, empty when the chain holds.
  std::vector<std::string> chain_violations(double slack = kProbabilityTolerance) const {
    std::vector<std::string> bad;
    if (zeta_star.value < 1.0 - slack) bad.push_back("1 <= zeta_star");
    if (zeta_star.value > zeta_alg.value + slack) bad.push_back("zeta_star <= zeta");
    if (zeta_alg.value > zeta_bar.value + slack) bad.push_back("zeta <= zeta_bar");
    if (zeta_bar.value > upper_bound + slack) bad.push_back("zeta_bar <= |Q|/min P");
    return bad;
  }
};

struct FactorOptions {
  std::size_t budget = 2;
  std::size_t depth = 2;
  std::uint64_t sweep_cap = kDefaultFactorCap;
  std::uint64_t tree_cap = kDefaultTreeCap;
  // Pair used for the single-pair variant; first supported pair when unset.
  std::optional<std::pair<std::size_t, std::size_t>> single_pair;
};

inline FactorReport factor_report(const DiagnosisModel& model, const FactorOptions& options) {
  FactorReport report;
  report.budget = options.budget;
  report.depth = options.depth;
  const detail::SweepResult all = detail::Sweep(model, options.budget, options.sweep_cap, std::nullopt);
  report.zeta_alg = all.zeta;
  report.zeta_bar = all.zeta_bar;
  auto pair = options.single_pair;
  if (!pair) {
    for (std::size_t x = 0; x < model.num_states() && !pair; ++x) {
      for (std::size_t q = 0; q < model.num_modes() && !pair; ++q) {
        if (model.prior(x, q) > 0.0) pair = std::make_pair(x, q);
      }
    }
  }
  report.zeta_alg_single_pair =
      detail::Sweep(model, options.budget, options.sweep_cap, pair).zeta;
  report.zeta_star = empirical_zeta_star(model, options.depth, options.tree_cap);
  report.upper_bound = static_cast<double>(model.num_modes()) / model.min_positive_prior();
  return report;
}

// Sweep witnesses carry the belief, (v, y) and the true pair; empirical
// witnesses carry psi, psi' and v.
inline nlohmann::json witness_to_json(const DiagnosisModel& model, const FactorWitness& w,
                                      bool empirical) {
  auto steps = [&](const std::vector<Observation>& obs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& o : obs) arr.push_back({model.actions()[o.action], model.outcomes()[o.outcome]});
    return arr;
  };
  nlohmann::json j;
  j["realization"] = steps(w.realization);
  j["action"] = model.actions()[w.action];
  if (empirical) {
    j["subrealization"] = steps(w.subrealization);
  } else {
    j["outcome"] = model.outcomes()[w.outcome];
  }
  if (w.true_pair) {
    j["true_state"] = model.states()[w.true_pair->first];
    j["true_mode"] = model.modes()[w.true_pair->second];
  }
  j["value"] = std::isinf(w.value) ? nlohmann::json("inf") : nlohmann::json(w.value);
  return j;
}

inline nlohmann::json factor_report_to_json(const DiagnosisModel& model, const FactorReport& r) {
  nlohmann::json j;
  j["budget"] = r.budget;
  j["depth"] = r.depth;
  j["zeta_alg"] = r.zeta_alg.value;
  j["zeta_alg_single_pair"] = r.zeta_alg_single_pair.value;
  j["zeta_bar"] = r.zeta_bar.value;
  j["zeta_star_empirical"] = r.zeta_star.value;
  j["upper_bound"] = r.upper_bound;
  j["hard_violations"] = r.zeta_star.hard_violations;
  j["subrealization_pairs_checked"] = r.zeta_star.pairs_checked;
  nlohmann::json w;
  w["zeta_alg"] = witness_to_json(model, r.zeta_alg.witness, false);
  w["zeta_alg_single_pair"] = witness_to_json(model, r.zeta_alg_single_pair.witness, false);
  w["zeta_bar"] = witness_to_json(model, r.zeta_bar.witness, false);
  if (r.zeta_star.value > 1.0) {
    w["zeta_star_empirical"] = witness_to_json(model, r.zeta_star.witness, true);
  }
  if (r.zeta_star.hard_witness) {
    w["hard_violation"] = witness_to_json(model, *r.zeta_star.hard_witness, true);
  }
  j["witnesses"] = std::move(w);
  nlohmann::json chain = nlohmann::json::array();
  for (const auto& link : r.chain_violations()) chain.push_back(link);
  j["chain_violations"] = std::move(chain);
  return j;
}

}  // namespace activediag

#endif  // ACTIVEDIAG_GUARANTEES_HPP_
