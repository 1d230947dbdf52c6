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

// The finite group-based diagnosis instance: states (groups), modes (objects
// within a group), actions, outcomes, the joint prior over state/mode pairs and
// the deterministic outcome table.

#ifndef ACTIVEDIAG_MODEL_HPP_
#define ACTIVEDIAG_MODEL_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "activediag/error.hpp"

namespace activediag {

// Absolute tolerance for every probability identity in the library.
inline constexpr double kProbabilityTolerance = 1e-9;

using OutcomeCode = std::uint32_t;

// An ordered set of distinct identifiers with reverse lookup.
class IdentifierList {
 public:
  IdentifierList() = default;
  IdentifierList(std::string kind, std::vector<std::string> names)
      : kind_(std::move(kind)), names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) {
        throw ValidationError(kind_ + " #" + std::to_string(i) + " has an empty identifier");
      }
      if (!index_.emplace(names_[i], i).second) {
        throw ValidationError("duplicate " + kind_ + " identifier '" + names_[i] + "'");
      }
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::string& operator[](std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }

  std::size_t index(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) {
      throw IdentifierError("unknown " + kind_ + " '" + std::string(name) + "'");
    }
    return it->second;
  }
  bool contains(std::string_view name) const {
    return index_.count(std::string(name)) != 0;
  }
  void check(std::size_t i) const {
    if (i >= names_.size()) {
      throw IdentifierError(kind_ + " index " + std::to_string(i) + " out of range (size " +
                            std::to_string(names_.size()) + ")");
    }
  }

 private:
  std::string kind_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

class DiagnosisModel {
 public:
  // `prior` is row-major over (state, mode); `outcome_table` is indexed
  // [action][mode][state] and holds outcome positions.
  DiagnosisModel(std::vector<std::string> states, std::vector<std::string> modes,
                 std::vector<std::string> actions, std::vector<std::string> outcomes,
                 std::vector<double> prior, std::vector<OutcomeCode> outcome_table)
      : states_("state", std::move(states)),
        modes_("mode", std::move(modes)),
        actions_("action", std::move(actions)),
        outcomes_("outcome", std::move(outcomes)),
        prior_(std::move(prior)),
        table_(std::move(outcome_table)) {
    Validate();
    marginal_.assign(num_states(), 0.0);
    for (std::size_t x = 0; x < num_states(); ++x) {
      for (std::size_t q = 0; q < num_modes(); ++q) marginal_[x] += this->prior(x, q);
    }
    min_positive_prior_ = std::numeric_limits<double>::infinity();
    for (double p : prior_) {
      if (p > 0.0 && p < min_positive_prior_) min_positive_prior_ = p;
    }
  }

  std::size_t num_states() const { return states_.size(); }
  std::size_t num_modes() const { return modes_.size(); }
  std::size_t num_actions() const { return actions_.size(); }
  std::size_t num_outcomes() const { return outcomes_.size(); }

  const IdentifierList& states() const { return states_; }
  const IdentifierList& modes() const { return modes_; }
  const IdentifierList& actions() const { return actions_; }
  const IdentifierList& outcomes() const { return outcomes_; }

  double prior(std::size_t x, std::size_t q) const { return prior_[x * num_modes() + q]; }
  // Prior marginal of a state, summed over modes.
  double state_prior(std::size_t x) const { return marginal_[x]; }
  double min_positive_prior() const { return min_positive_prior_; }
  std::span<const double> joint_prior() const { return prior_; }

  OutcomeCode outcome(std::size_t v, std::size_t x, std::size_t q) const {
    return table_[(v * num_modes() + q) * num_states() + x];
  }
  // Outcomes of action v under mode q for every state, indexed by state.
  std::span<const OutcomeCode> outcome_row(std::size_t v, std::size_t q) const {
    return std::span<const OutcomeCode>(table_).subspan((v * num_modes() + q) * num_states(),
                                                        num_states());
  }
  std::span<const OutcomeCode> outcome_table() const { return table_; }

 private:
  void Validate() const {
    if (states_.size() == 0) throw ValidationError("model has no states");
    if (modes_.size() == 0) throw ValidationError("model has no modes");
    if (actions_.size() == 0) throw ValidationError("model has no actions");
    if (outcomes_.size() == 0) throw ValidationError("model has no outcomes");
    if (prior_.size() != num_states() * num_modes()) {
      throw ValidationError("prior has " + std::to_string(prior_.size()) +
                            " entries, expected " + std::to_string(num_states() * num_modes()));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < prior_.size(); ++i) {
      const double p = prior_[i];
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw ValidationError("prior[" + states_[i / num_modes()] + ", " +
                              modes_[i % num_modes()] + "] = " + std::to_string(p) +
                              " is not a probability");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
      throw ValidationError("prior sums to " + std::to_string(total) + ", expected 1");
    }
    const std::size_t expected = num_actions() * num_modes() * num_states();
    if (table_.size() != expected) {
      throw ValidationError("outcome table has " + std::to_string(table_.size()) +
                            " entries, expected " + std::to_string(expected));
    }
    for (std::size_t i = 0; i < table_.size(); ++i) {
      if (table_[i] >= num_outcomes()) {
        const std::size_t x = i % num_states();
        const std::size_t q = (i / num_states()) % num_modes();
        const std::size_t v = i / (num_states() * num_modes());
        throw ValidationError("outcome table entry (" + actions_[v] + ", " + states_[x] + ", " +
                              modes_[q] + ") has outcome position " + std::to_string(table_[i]) +
                              " outside the outcome set");
      }
    }
  }

  IdentifierList states_;
  IdentifierList modes_;
  IdentifierList actions_;
  IdentifierList outcomes_;
  std::vector<double> prior_;
  std::vector<OutcomeCode> table_;
  std::vector<double> marginal_;
  double min_positive_prior_ = 0.0;
};

}  // namespace activediag

#endif  // ACTIVEDIAG_MODEL_HPP_
