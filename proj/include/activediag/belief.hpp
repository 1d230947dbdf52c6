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

// Version-space belief tracking. For every mode q the belief keeps the set of
// states whose outcomes under q agree with every observation so far; the
// posterior over (state, mode) is the prior restricted to those sets.

#ifndef ACTIVEDIAG_BELIEF_HPP_
#define ACTIVEDIAG_BELIEF_HPP_

#include <algorithm>
#include <cstddef>
#include <string_view>
#include <vector>

#include "activediag/error.hpp"
#include "activediag/model.hpp"
#include "activediag/state_set.hpp"

namespace activediag {

struct Observation {
  std::size_t action = 0;
  std::size_t outcome = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// The (action, outcome) pairs observed so far, in execution order.
class PartialRealization {
 public:
  PartialRealization() = default;
  explicit PartialRealization(std::vector<Observation> steps) : steps_(std::move(steps)) {}

  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  const std::vector<Observation>& steps() const { return steps_; }

  bool has_action(std::size_t v) const {
    return std::any_of(steps_.begin(), steps_.end(),
                       [v](const Observation& o) { return o.action == v; });
  }

  // Subrealization test on the underlying sets of pairs.
  bool is_subrealization_of(const PartialRealization& other) const {
    return std::all_of(steps_.begin(), steps_.end(), [&](const Observation& o) {
      return std::find(other.steps_.begin(), other.steps_.end(), o) != other.steps_.end();
    });
  }

  PartialRealization extended(Observation o) const {
    PartialRealization out = *this;
    out.steps_.push_back(o);
    return out;
  }

 private:
  std::vector<Observation> steps_;
};

// Sum of P[x, q] over x in sets[q], summed over q.
inline double realization_mass(const DiagnosisModel& model, const std::vector<StateSet>& sets) {
  double mass = 0.0;
  for (std::size_t q = 0; q < sets.size(); ++q) {
    sets[q].for_each([&](std::size_t x) { mass += model.prior(x, q); });
  }
  return mass;
}

// Sum of the state marginal P[x] over a set of states.
inline double state_mass(const DiagnosisModel& model, const StateSet& set) {
  double mass = 0.0;
  set.for_each([&](std::size_t x) { mass += model.state_prior(x); });
  return mass;
}

inline StateSet union_of(const std::vector<StateSet>& sets, std::size_t width) {
  StateSet out(width);
  for (const StateSet& s : sets) out |= s;
  return out;
}

// Immutable value; copies are independent.
class BeliefState {
 public:
  static BeliefState Initial(const DiagnosisModel& model) {
    BeliefState b;
    b.spaces_.assign(model.num_modes(), StateSet::Full(model.num_states()));
    b.probability_ = realization_mass(model, b.spaces_);
    return b;
  }

  BeliefState(PartialRealization realization, std::vector<StateSet> spaces, double probability)
      : realization_(std::move(realization)),
        spaces_(std::move(spaces)),
        probability_(probability) {}

  const PartialRealization& realization() const { return realization_; }
  const std::vector<StateSet>& version_spaces() const { return spaces_; }
  const StateSet& version_space(std::size_t q) const { return spaces_.at(q); }
  double realization_probability() const { return probability_; }
  std::size_t depth() const { return realization_.size(); }

  // States that cannot be ruled out under any mode hypothesis.
  StateSet indistinguishable() const {
    return union_of(spaces_, spaces_.empty() ? 0 : spaces_.front().width());
  }

  bool same_version_spaces(const BeliefState& other) const { return spaces_ == other.spaces_; }

  std::size_t fingerprint() const {
    std::size_t h = spaces_.size();
    for (const StateSet& s : spaces_) h = h * 1000003u ^ s.hash();
    return h;
  }

 private:
  BeliefState() = default;

  PartialRealization realization_;
  std::vector<StateSet> spaces_;
  double probability_ = 0.0;
};

// States x with outcome(v, x, q) == y.
inline StateSet compatible_states(const DiagnosisModel& model, std::size_t y, std::size_t v,
                                  std::size_t q) {
  model.outcomes().check(y);
  model.actions().check(v);
  model.modes().check(q);
  StateSet out(model.num_states());
  const auto row = model.outcome_row(v, q);
  for (std::size_t x = 0; x < row.size(); ++x) {
    if (row[x] == y) out.set(x);
  }
  return out;
}

inline StateSet compatible_states(const DiagnosisModel& model, std::string_view y,
                                  std::string_view v, std::string_view q) {
  return compatible_states(model, model.outcomes().index(y), model.actions().index(v),
                           model.modes().index(q));
}

// Restricts each version space to the states compatible with (v, y). Throws
// ContradictionError when no positive-prior pair survives.
inline BeliefState update_belief(const DiagnosisModel& model, const BeliefState& belief,
                                 std::size_t v, std::size_t y) {
  model.actions().check(v);
  model.outcomes().check(y);
  std::vector<StateSet> spaces = belief.version_spaces();
  for (std::size_t q = 0; q < spaces.size(); ++q) {
    const auto row = model.outcome_row(v, q);
    StateSet& s = spaces[q];
    s.for_each([&](std::size_t x) {
      if (row[x] != y) s.reset(x);
    });
  }
  const double mass = realization_mass(model, spaces);
  if (!(mass > 0.0)) {
    throw ContradictionError("observation (" + model.actions()[v] + ", " + model.outcomes()[y] +
                                 ") is inconsistent with every supported state/mode pair",
                             v, y);
  }
  return BeliefState(belief.realization().extended({v, y}), std::move(spaces), mass);
}

struct PosteriorTable {
  std::size_t num_states = 0;
  std::size_t num_modes = 0;
  std::vector<double> values;  // row-major (state, mode)

  double at(std::size_t x, std::size_t q) const { return values[x * num_modes + q]; }
  double state_marginal(std::size_t x) const {
    double p = 0.0;
    for (std::size_t q = 0; q < num_modes; ++q) p += at(x, q);
    return p;
  }
};

inline PosteriorTable posterior(const DiagnosisModel& model, const BeliefState& belief) {
  const double norm = belief.realization_probability();
  if (!(norm > 0.0)) {
    throw ContradictionError("posterior undefined: realization has zero probability", 0, 0);
  }
  PosteriorTable table{model.num_states(), model.num_modes(),
                       std::vector<double>(model.num_states() * model.num_modes(), 0.0)};
  for (std::size_t q = 0; q < model.num_modes(); ++q) {
    belief.version_space(q).for_each([&](std::size_t x) {
      table.values[x * model.num_modes() + q] = model.prior(x, q) / norm;
    });
  }
  return table;
}

// Prior mass of the states ruled out under every mode: 1 - sum of P[x] over the
// union of the version spaces. Summed over the eliminated states directly, so
// the empty realization scores exactly 0.
inline double reward(const DiagnosisModel& model, const BeliefState& belief) {
  const StateSet alive = belief.indistinguishable();
  double eliminated = 0.0;
  for (std::size_t x = 0; x < model.num_states(); ++x) {
    if (!alive.test(x)) eliminated += model.state_prior(x);
  }
  return eliminated;
}

}  // namespace activediag

#endif  // ACTIVEDIAG_BELIEF_HPP_
