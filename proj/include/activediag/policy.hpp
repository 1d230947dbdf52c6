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

// Action selection. The expected one-step gain of an action v at belief psi is
//
//   Delta(v | psi) = sum_{x,q} P[x,q | psi] * (U(psi) - U(psi + (v, mu(v,x,q))))
//
// where U is the prior state mass of the union of version spaces. Grouping the
// (x, q) pairs by the outcome they produce gives the partition form used
// by the greedy selector: with tau_y the posterior-unnormalized mass sending
// outcome y and M_y the state mass of the version-space union after seeing y,
//
//   Delta(v | psi) = U(psi) - sum_y tau_y M_y / P[psi].

#ifndef ACTIVEDIAG_POLICY_HPP_
#define ACTIVEDIAG_POLICY_HPP_

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "activediag/belief.hpp"
#include "activediag/error.hpp"
#include "activediag/model.hpp"
#include "activediag/state_set.hpp"

namespace activediag {

// Scores closer than this (after normalization by P[psi]) are ties.
inline constexpr double kTieTolerance = 1e-12;

// Per-outcome split of the current version spaces under one action.
struct OutcomeSplit {
  std::vector<std::size_t> outcomes;  // outcome codes with a nonempty split, ascending
  std::vector<double> tau;            // sum_q sum_{x in S_q, mu(v,x,q)=y} P[x,q]
  std::vector<double> mode_summed;    // same sum with P[x] in place of P[x,q]
  std::vector<StateSet> unions;       // union_q of S_q intersected with D(y, v, q)
};

inline OutcomeSplit split_by_outcome(const DiagnosisModel& model, const BeliefState& belief,
                                     std::size_t v) {
  model.actions().check(v);
  std::vector<int> slot(model.num_outcomes(), -1);
  OutcomeSplit split;
  for (std::size_t q = 0; q < model.num_modes(); ++q) {
    const auto row = model.outcome_row(v, q);
    belief.version_space(q).for_each([&](std::size_t x) {
      const OutcomeCode y = row[x];
      if (slot[y] < 0) {
        slot[y] = static_cast<int>(split.outcomes.size());
        split.outcomes.push_back(y);
        split.tau.push_back(0.0);
        split.mode_summed.push_back(0.0);
        split.unions.emplace_back(model.num_states());
      }
      const auto s = static_cast<std::size_t>(slot[y]);
      split.tau[s] += model.prior(x, q);
      split.mode_summed[s] += model.state_prior(x);
      split.unions[s].set(x);
    });
  }
  // Ascending outcome order keeps every downstream sum order-stable.
  std::vector<std::size_t> order(split.outcomes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return split.outcomes[a] < split.outcomes[b]; });
  OutcomeSplit sorted;
  for (std::size_t i : order) {
    sorted.outcomes.push_back(split.outcomes[i]);
    sorted.tau.push_back(split.tau[i]);
    sorted.mode_summed.push_back(split.mode_summed[i]);
    sorted.unions.push_back(std::move(split.unions[i]));
  }
  return sorted;
}

namespace detail {

inline void RequireSupport(const BeliefState& belief) {
  if (!(belief.realization_probability() > 0.0)) {
    throw ContradictionError("realization has zero probability", 0, 0);
  }
}

// State mass of `alive` minus `subset`, for subset contained in alive.
inline double RemovedMass(const DiagnosisModel& model, const StateSet& alive,
                          const StateSet& subset) {
  double removed = 0.0;
  alive.for_each([&](std::size_t x) {
    if (!subset.test(x)) removed += model.state_prior(x);
  });
  return removed;
}

}  // namespace detail

// Conditional expected marginal benefit, partition form.
inline double marginal_benefit(const DiagnosisModel& model, const BeliefState& belief,
                               std::size_t v) {
  detail::RequireSupport(belief);
  const OutcomeSplit split = split_by_outcome(model, belief, v);
  const StateSet alive = belief.indistinguishable();
  double gain = 0.0;
  for (std::size_t i = 0; i < split.outcomes.size(); ++i) {
    if (split.tau[i] > 0.0) {
      gain += split.tau[i] * detail::RemovedMass(model, alive, split.unions[i]);
    }
  }
  return gain / belief.realization_probability();
}

// Conditional expected marginal benefit summed pair by pair: every supported
// (x, q) contributes P[x,q] times the mass its own outcome would eliminate.
inline double marginal_benefit_direct(const DiagnosisModel& model, const BeliefState& belief,
                                      std::size_t v) {
  detail::RequireSupport(belief);
  model.actions().check(v);
  const StateSet alive = belief.indistinguishable();
  const double alive_mass = state_mass(model, alive);
  std::vector<double> union_mass(model.num_outcomes(), -1.0);
  auto mass_after = [&](OutcomeCode y) {
    if (union_mass[y] < 0.0) {
      StateSet u(model.num_states());
      for (std::size_t q = 0; q < model.num_modes(); ++q) {
        const auto row = model.outcome_row(v, q);
        belief.version_space(q).for_each([&](std::size_t x) {
          if (row[x] == y) u.set(x);
        });
      }
      union_mass[y] = state_mass(model, u);
    }
    return union_mass[y];
  };
  double total = 0.0;
  for (std::size_t q = 0; q < model.num_modes(); ++q) {
    belief.version_space(q).for_each([&](std::size_t x) {
      const double p = model.prior(x, q);
      if (p > 0.0) total += p * (alive_mass - mass_after(model.outcome(v, x, q)));
    });
  }
  return total / belief.realization_probability();
}

// sum_y M_y * tau_y: the quantity the partition-form greedy minimizes.
inline double partition_score(const DiagnosisModel& model, const BeliefState& belief,
                              std::size_t v) {
  const OutcomeSplit split = split_by_outcome(model, belief, v);
  double score = 0.0;
  for (std::size_t i = 0; i < split.outcomes.size(); ++i) {
    if (split.tau[i] > 0.0) score += split.tau[i] * state_mass(model, split.unions[i]);
  }
  return score;
}

enum class GreedyForm { kDirect, kPartition };

inline std::vector<std::size_t> untaken_actions(const DiagnosisModel& model,
                                                const BeliefState& belief) {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < model.num_actions(); ++v) {
    if (!belief.realization().has_action(v)) out.push_back(v);
  }
  return out;
}

struct GreedyEvaluation {
  std::vector<std::size_t> candidates;
  std::vector<double> scores;      // Delta for kDirect, the partition score for kPartition
  std::vector<std::size_t> best;   // optimal candidates before tie-breaking, ascending
};

inline GreedyEvaluation evaluate_greedy(const DiagnosisModel& model, const BeliefState& belief,
                                        GreedyForm form) {
  detail::RequireSupport(belief);
  GreedyEvaluation eval;
  eval.candidates = untaken_actions(model, belief);
  if (eval.candidates.empty()) throw ExhaustedError("every action has already been taken");
  const double norm = belief.realization_probability();
  for (std::size_t v : eval.candidates) {
    eval.scores.push_back(form == GreedyForm::kDirect ? marginal_benefit_direct(model, belief, v)
                                                      : partition_score(model, belief, v));
  }
  if (form == GreedyForm::kDirect) {
    const double top = *std::max_element(eval.scores.begin(), eval.scores.end());
    for (std::size_t i = 0; i < eval.candidates.size(); ++i) {
      if (eval.scores[i] >= top - kTieTolerance) eval.best.push_back(eval.candidates[i]);
    }
  } else {
    const double low = *std::min_element(eval.scores.begin(), eval.scores.end());
    for (std::size_t i = 0; i < eval.candidates.size(); ++i) {
      if ((eval.scores[i] - low) / norm <= kTieTolerance) eval.best.push_back(eval.candidates[i]);
    }
  }
  return eval;
}

// Greedy choice among untaken actions; ties go to the lowest action index.
inline std::size_t greedy_next_action(const DiagnosisModel& model, const BeliefState& belief,
                                      GreedyForm form = GreedyForm::kPartition) {
  return evaluate_greedy(model, belief, form).best.front();
}

// ---------------------------------------------------------------------------
// Exhaustive adaptive search.

namespace detail {

inline std::uint64_t SaturatingPow(std::uint64_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    out *= base;
  }
  return out;
}

inline std::uint64_t SaturatingMul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

// Best expected final reward reachable from `belief` with `budget` more
// actions, conditional on the realization so far.
inline double OptimalContinuation(const DiagnosisModel& model, const BeliefState& belief,
                                  std::size_t budget, std::size_t* best_action = nullptr) {
  const double stop = reward(model, belief);
  if (best_action != nullptr) *best_action = model.num_actions();
  if (budget == 0) return stop;
  const double norm = belief.realization_probability();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t v : untaken_actions(model, belief)) {
    const OutcomeSplit split = split_by_outcome(model, belief, v);
    double value = 0.0;
    for (std::size_t i = 0; i < split.outcomes.size(); ++i) {
      if (!(split.tau[i] > 0.0)) continue;
      const BeliefState next = update_belief(model, belief, v, split.outcomes[i]);
      value += split.tau[i] / norm * OptimalContinuation(model, next, budget - 1);
    }
    // Lowest index wins ties.
    if (value > best + kTieTolerance) {
      best = value;
      if (best_action != nullptr) *best_action = v;
    }
  }
  return std::max(stop, best);
}

}  // namespace detail

inline constexpr std::uint64_t kDefaultSearchCap = 50'000'000;

// Size of the depth-k adaptive search tree, |V|^k * |Y|^k, saturating.
inline std::uint64_t search_tree_bound(const DiagnosisModel& model, std::size_t k) {
  return detail::SaturatingMul(detail::SaturatingPow(model.num_actions(), k),
                               detail::SaturatingPow(model.num_outcomes(), k));
}

// Optimal expected final reward over all deterministic adaptive policies that
// take at most k actions.
inline double exact_optimal_value(const DiagnosisModel& model, std::size_t k,
                                  std::uint64_t cap = kDefaultSearchCap) {
  if (search_tree_bound(model, k) > cap) {
    throw SizeError("adaptive search tree bound exceeds the cap of " + std::to_string(cap));
  }
  return detail::OptimalContinuation(model, BeliefState::Initial(model), k);
}

// ---------------------------------------------------------------------------
// Policies.

struct GreedyDirect {};
struct GreedyPartition {};
struct BruteForceAll {};
struct RandomPolicy {
  std::uint64_t seed = 0;
};
struct ExactOptimal {
  std::uint64_t cap = kDefaultSearchCap;
};

using Policy = std::variant<GreedyDirect, GreedyPartition, BruteForceAll, RandomPolicy, ExactOptimal>;

inline std::string policy_name(const Policy& policy) {
  struct Namer {
    std::string operator()(const GreedyDirect&) const { return "greedy-direct"; }
    std::string operator()(const GreedyPartition&) const { return "greedy"; }
    std::string operator()(const BruteForceAll&) const { return "brute-force"; }
    std::string operator()(const RandomPolicy&) const { return "random"; }
    std::string operator()(const ExactOptimal&) const { return "optimal"; }
  };
  return std::visit(Namer{}, policy);
}

inline Policy parse_policy(std::string_view name, std::uint64_t seed = 0,
                           std::uint64_t cap = kDefaultSearchCap) {
  if (name == "greedy" || name == "greedy-partition") return GreedyPartition{};
  if (name == "greedy-direct") return GreedyDirect{};
  if (name == "brute-force" || name == "bruteforce") return BruteForceAll{};
  if (name == "random") return RandomPolicy{seed};
  if (name == "optimal") return ExactOptimal{cap};
  throw ValidationError("unknown policy '" + std::string(name) +
                        "' (expected greedy, greedy-direct, brute-force, random, optimal)");
}

inline bool exceeds_budget(const Policy& policy) {
  return std::holds_alternative<BruteForceAll>(policy);
}

// Next action of `policy` at `belief` with `remaining` actions left in the
// budget (only the exhaustive search uses it).
inline std::size_t select_action(const Policy& policy, const DiagnosisModel& model,
                                 const BeliefState& belief, std::size_t remaining) {
  if (std::holds_alternative<GreedyDirect>(policy)) {
    return greedy_next_action(model, belief, GreedyForm::kDirect);
  }
  if (std::holds_alternative<GreedyPartition>(policy)) {
    return greedy_next_action(model, belief, GreedyForm::kPartition);
  }
  const std::vector<std::size_t> open = untaken_actions(model, belief);
  if (open.empty()) throw ExhaustedError("every action has already been taken");
  if (std::holds_alternative<BruteForceAll>(policy)) return open.front();
  if (const auto* r = std::get_if<RandomPolicy>(&policy)) {
    std::uint64_t h = r->seed ^ 0x9e3779b97f4a7c15ULL;
    for (const Observation& o : belief.realization().steps()) {
      h = h * 1000003u ^ (o.action * 131u + o.outcome + 1u);
    }
    std::mt19937_64 rng(h);
    std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
    return open[pick(rng)];
  }
  const auto& opt = std::get<ExactOptimal>(policy);
  if (search_tree_bound(model, remaining) > opt.cap) {
    throw SizeError("adaptive search tree bound exceeds the cap of " + std::to_string(opt.cap));
  }
  std::size_t best = model.num_actions();
  detail::OptimalContinuation(model, belief, std::max<std::size_t>(remaining, 1), &best);
  return best < model.num_actions() ? best : open.front();
}

// ---------------------------------------------------------------------------
// Runs.

struct StepRecord {
  std::size_t action = 0;
  std::size_t outcome = 0;
  double reward_after = 0.0;
  double select_seconds = 0.0;  // monotonic clock around action selection only
};

struct RunRecord {
  std::optional<std::size_t> true_state;
  std::optional<std::size_t> true_mode;
  std::string policy;
  std::size_t budget = 0;
  bool budget_exceeded = false;
  std::vector<StepRecord> trace;
  StateSet final_indistinguishable;
  double final_reward = 0.0;

  double mean_select_seconds() const {
    if (trace.empty()) return 0.0;
    double total = 0.0;
    for (const auto& s : trace) total += s.select_seconds;
    return total / static_cast<double>(trace.size());
  }
};

struct RunOptions {
  // Each selection is repeated this many times and the median time recorded.
  std::size_t timing_repeats = 1;
};

namespace detail {

template <class Fn>
std::size_t TimedSelect(Fn&& select, std::size_t repeats, double* seconds) {
  std::vector<double> samples;
  std::size_t chosen = 0;
  for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
    const auto start = std::chrono::steady_clock::now();
    chosen = select();
    const auto stop = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double>(stop - start).count());
  }
  std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
  *seconds = samples[samples.size() / 2];
  return chosen;
}

}  // namespace detail

// Simulates `policy` against the true pair (x0, q0) for k steps (every
// action for BruteForceAll, flagged as exceeding the budget).
inline RunRecord run_policy(const DiagnosisModel& model, const Policy& policy, std::size_t x0,
                            std::size_t q0, std::size_t k, const RunOptions& options = {}) {
  model.states().check(x0);
  model.modes().check(q0);
  if (k == 0) throw DomainError("budget must be at least 1");
  if (!(model.prior(x0, q0) > 0.0)) {
    throw DomainError("true pair (" + model.states()[x0] + ", " + model.modes()[q0] +
                      ") has zero prior probability");
  }
  RunRecord record;
  record.true_state = x0;
  record.true_mode = q0;
  record.policy = policy_name(policy);
  record.budget = k;
  const std::size_t steps =
      exceeds_budget(policy) ? model.num_actions() : std::min(k, model.num_actions());
  record.budget_exceeded = steps > k;

  BeliefState belief = BeliefState::Initial(model);
  for (std::size_t t = 0; t < steps; ++t) {
    StepRecord step;
    const std::size_t remaining = steps - t;
    step.action = detail::TimedSelect(
        [&] { return select_action(policy, model, belief, remaining); }, options.timing_repeats,
        &step.select_seconds);
    step.outcome = model.outcome(step.action, x0, q0);
    belief = update_belief(model, belief, step.action, step.outcome);
    step.reward_after = reward(model, belief);
    record.trace.push_back(step);
  }
  record.final_indistinguishable = belief.indistinguishable();
  record.final_reward = reward(model, belief);
  return record;
}

// Prior-weighted expected final reward over every supported true pair.
inline double f_avg(const DiagnosisModel& model, const Policy& policy, std::size_t k) {
  double total = 0.0;
  for (std::size_t x = 0; x < model.num_states(); ++x) {
    for (std::size_t q = 0; q < model.num_modes(); ++q) {
      const double p = model.prior(x, q);
      if (p > 0.0) total += p * run_policy(model, policy, x, q, k).final_reward;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Operator-driven session: the greedy policy recommends, the operator reports
// the observed outcome.

namespace detail {

inline std::string Trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

inline void PrintBeliefSummary(const DiagnosisModel& model, const BeliefState& belief,
                               std::ostream& out) {
  const PosteriorTable post = posterior(model, belief);
  const StateSet alive = belief.indistinguishable();
  out << "  P[realization] = " << std::setprecision(6) << belief.realization_probability()
      << ", reward = " << reward(model, belief) << "\n";
  out << "  indistinguishable states (" << alive.count() << "):";
  alive.for_each([&](std::size_t x) {
    out << ' ' << model.states()[x] << '(' << std::setprecision(4) << post.state_marginal(x) << ')';
  });
  out << "\n";
}

}  // namespace detail

inline RunRecord interactive_session(const DiagnosisModel& model, std::size_t k, std::istream& in,
                                     std::ostream& out,
                                     GreedyForm form = GreedyForm::kPartition) {
  if (k == 0) throw DomainError("budget must be at least 1");
  RunRecord record;
  record.policy = form == GreedyForm::kDirect ? "greedy-direct" : "greedy";
  record.budget = k;
  BeliefState belief = BeliefState::Initial(model);
  const std::size_t steps = std::min(k, model.num_actions());
  bool done = false;
  for (std::size_t t = 0; t < steps && !done; ++t) {
    StepRecord step;
    step.action = detail::TimedSelect([&] { return greedy_next_action(model, belief, form); }, 1,
                                      &step.select_seconds);
    while (true) {
      out << "action " << (t + 1) << "/" << k << ": " << model.actions()[step.action] << std::endl;
      std::string line;
      if (!std::getline(in, line)) {
        done = true;
        break;
      }
      line = detail::Trim(line);
      if (line == "quit") {
        done = true;
        break;
      }
      if (!model.outcomes().contains(line)) {
        out << "error: unknown outcome '" << line << "'" << std::endl;
        continue;
      }
      const std::size_t y = model.outcomes().index(line);
      try {
        belief = update_belief(model, belief, step.action, y);
      } catch (const ContradictionError& e) {
        out << "warning: " << e.what() << "; step rejected" << std::endl;
        continue;
      }
      step.outcome = y;
      step.reward_after = reward(model, belief);
      record.trace.push_back(step);
      detail::PrintBeliefSummary(model, belief, out);
      break;
    }
  }
  record.final_indistinguishable = belief.indistinguishable();
  record.final_reward = reward(model, belief);
  return record;
}

}  // namespace activediag

#endif  // ACTIVEDIAG_POLICY_HPP_
