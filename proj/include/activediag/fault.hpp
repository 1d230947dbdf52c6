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

// Persistent sensor faults. A sensor mode assigns every sensor one fault kind
// (healthy, flip, or stuck at a constant). The corrupted outcome table is the
// healthy table pushed through the per-mode corruption map, and the joint
// prior is P[x] times the product of per-sensor fault probabilities.
//
// Outcome vectors are encoded as integers with sensor 0 as the most
// significant digit, so code order is lexicographic order on vectors.

#ifndef ACTIVEDIAG_FAULT_HPP_
#define ACTIVEDIAG_FAULT_HPP_

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "activediag/error.hpp"
#include "activediag/model.hpp"
#include "activediag/state_set.hpp"
#include "json.hpp"

namespace activediag {

using OutcomeVector = std::vector<unsigned>;

struct FaultKind {
  enum class Type { kHealthy, kFlip, kStuckAt };

  Type type = Type::kHealthy;
  unsigned value = 0;  // stuck-at reading, unused otherwise

  static FaultKind Healthy() { return {Type::kHealthy, 0}; }
  static FaultKind Flip() { return {Type::kFlip, 0}; }
  static FaultKind StuckAt(unsigned c) { return {Type::kStuckAt, c}; }

  std::string label() const {
    switch (type) {
      case Type::kHealthy:
        return "H";
      case Type::kFlip:
        return "F";
      case Type::kStuckAt:
        return "S" + std::to_string(value);
    }
    return "?";
  }

  friend auto operator<=>(const FaultKind&, const FaultKind&) = default;
};

// Fault kinds a sensor may exhibit besides being healthy, with their
// conditional probabilities. probability[k] holds either a single value
// (state independent) or one value per state.
struct SensorFaultSpec {
  std::string sensor;
  std::vector<FaultKind> kinds;
  std::vector<std::vector<double>> probability;

  double kind_probability(std::size_t k, std::size_t x) const {
    const auto& p = probability[k];
    return p.size() == 1 ? p[0] : p[x];
  }
  double healthy_probability(std::size_t x) const {
    double total = 0.0;
    for (std::size_t k = 0; k < kinds.size(); ++k) total += kind_probability(k, x);
    return std::max(0.0, 1.0 - total);
  }
};

struct FaultSpec {
  unsigned alphabet = 2;
  std::vector<SensorFaultSpec> sensors;  // one entry per sensor, in order

  std::size_t sensor_count() const { return sensors.size(); }

  static FaultSpec AllHealthy(const std::vector<std::string>& sensor_names, unsigned alphabet = 2) {
    FaultSpec spec;
    spec.alphabet = alphabet;
    for (const auto& name : sensor_names) spec.sensors.push_back({name, {}, {}});
    return spec;
  }

  // Checks kinds and probabilities; state-dependent entries must have
  // `num_states` values.
  void validate(std::size_t num_states) const {
    if (alphabet < 2 || alphabet > 10) {
      throw ValidationError("sensor alphabet size must be in [2, 10], got " +
                            std::to_string(alphabet));
    }
    if (sensors.empty()) throw ValidationError("fault specification has no sensors");
    for (const auto& s : sensors) {
      const std::string who = "sensor '" + s.sensor + "'";
      if (s.kinds.size() != s.probability.size()) {
        throw ValidationError(who + ": kinds and probabilities differ in length");
      }
      std::vector<FaultKind> sorted = s.kinds;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ValidationError(who + ": duplicate fault kind");
      }
      for (std::size_t k = 0; k < s.kinds.size(); ++k) {
        const FaultKind kind = s.kinds[k];
        if (kind.type == FaultKind::Type::kHealthy) {
          throw ValidationError(who + ": healthy is implicit and may not be listed");
        }
        if (kind.type == FaultKind::Type::kStuckAt && kind.value >= alphabet) {
          throw ValidationError(who + ": stuck-at value " + std::to_string(kind.value) +
                                " outside the sensor alphabet");
        }
        const auto& p = s.probability[k];
        if (p.size() != 1 && p.size() != num_states) {
          throw ValidationError(who + ": fault probability " + kind.label() + " needs 1 or " +
                                std::to_string(num_states) + " values");
        }
        for (double v : p) {
          if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw ValidationError(who + ": fault probability " + kind.label() +
                                  " is not in [0, 1]");
          }
        }
      }
      for (std::size_t x = 0; x < num_states; ++x) {
        double total = 0.0;
        for (std::size_t k = 0; k < s.kinds.size(); ++k) total += s.kind_probability(k, x);
        if (total > 1.0 + kProbabilityTolerance) {
          throw ValidationError(who + ": fault probabilities sum to " + std::to_string(total) +
                                " > 1 for state #" + std::to_string(x));
        }
      }
    }
  }
};

struct SensorMode {
  std::vector<FaultKind> per_sensor;

  std::string label() const {
    std::string out;
    for (std::size_t i = 0; i < per_sensor.size(); ++i) {
      if (i != 0) out += '.';
      out += per_sensor[i].label();
    }
    return out;
  }
  bool all_healthy() const {
    return std::all_of(per_sensor.begin(), per_sensor.end(), [](FaultKind k) {
      return k.type == FaultKind::Type::kHealthy;
    });
  }

  friend auto operator<=>(const SensorMode&, const SensorMode&) = default;
};

inline constexpr std::size_t kMaxModes = std::size_t{1} << 20;

// |Q| = product over sensors of (1 + number of fault kinds).
inline std::size_t mode_count(const FaultSpec& spec) {
  std::size_t count = 1;
  for (const auto& s : spec.sensors) {
    count *= 1 + s.kinds.size();
    if (count > kMaxModes) {
      throw SizeError("fault specification yields more than 2^20 sensor modes");
    }
  }
  return count;
}

// All sensor modes in lexicographic order (sensor 0 most significant, kinds
// ordered healthy < flip < stuck-at 0 < stuck-at 1 < ...).
inline std::vector<SensorMode> enumerate_modes(const FaultSpec& spec) {
  const std::size_t total = mode_count(spec);
  std::vector<std::vector<FaultKind>> choices;
  for (const auto& s : spec.sensors) {
    std::vector<FaultKind> c = s.kinds;
    c.push_back(FaultKind::Healthy());
    std::sort(c.begin(), c.end());
    choices.push_back(std::move(c));
  }
  std::vector<SensorMode> modes;
  modes.reserve(total);
  std::vector<std::size_t> digit(choices.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    SensorMode mode;
    for (std::size_t i = 0; i < choices.size(); ++i) mode.per_sensor.push_back(choices[i][digit[i]]);
    modes.push_back(std::move(mode));
    for (std::size_t i = choices.size(); i-- > 0;) {
      if (++digit[i] < choices[i].size()) break;
      digit[i] = 0;
    }
  }
  return modes;
}

inline OutcomeCode encode_outcome(std::span<const unsigned> y, unsigned alphabet) {
  OutcomeCode code = 0;
  for (unsigned d : y) code = code * alphabet + d;
  return code;
}

inline OutcomeVector decode_outcome(OutcomeCode code, std::size_t length, unsigned alphabet) {
  OutcomeVector y(length, 0);
  for (std::size_t i = length; i-- > 0;) {
    y[i] = code % alphabet;
    code /= alphabet;
  }
  return y;
}

// Digit string, sensor 0 first ("101").
inline std::string outcome_label(std::span<const unsigned> y) {
  std::string s;
  for (unsigned d : y) s += static_cast<char>('0' + d);
  return s;
}

// Corrupted reading of a healthy outcome vector under `mode`. Flip maps a
// reading d to alphabet-1-d (the complement for binary sensors).
inline OutcomeVector corrupt(const SensorMode& mode, std::span<const unsigned> healthy,
                             unsigned alphabet = 2) {
  if (healthy.size() != mode.per_sensor.size()) {
    throw DomainError("outcome vector has " + std::to_string(healthy.size()) +
                      " readings, mode covers " + std::to_string(mode.per_sensor.size()) +
                      " sensors");
  }
  OutcomeVector out(healthy.begin(), healthy.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const FaultKind k = mode.per_sensor[i];
    if (k.type == FaultKind::Type::kFlip) out[i] = alphabet - 1 - out[i];
    if (k.type == FaultKind::Type::kStuckAt) out[i] = k.value;
  }
  return out;
}

// Every healthy vector that `mode` corrupts into `faulty`, in lexicographic
// order. Empty when a stuck-at sensor shows a reading other than its constant.
inline std::vector<OutcomeVector> preimage(const SensorMode& mode, std::span<const unsigned> faulty,
                                           unsigned alphabet = 2) {
  if (faulty.size() != mode.per_sensor.size()) {
    throw DomainError("outcome vector has " + std::to_string(faulty.size()) +
                      " readings, mode covers " + std::to_string(mode.per_sensor.size()) +
                      " sensors");
  }
  std::vector<std::vector<unsigned>> options(faulty.size());
  for (std::size_t i = 0; i < faulty.size(); ++i) {
    const FaultKind k = mode.per_sensor[i];
    switch (k.type) {
      case FaultKind::Type::kHealthy:
        options[i] = {faulty[i]};
        break;
      case FaultKind::Type::kFlip:
        options[i] = {alphabet - 1 - faulty[i]};
        break;
      case FaultKind::Type::kStuckAt:
        if (faulty[i] != k.value) return {};
        for (unsigned d = 0; d < alphabet; ++d) options[i].push_back(d);
        break;
    }
  }
  std::vector<OutcomeVector> out{OutcomeVector{}};
  for (const auto& opt : options) {
    std::vector<OutcomeVector> next;
    for (const auto& prefix : out) {
      for (unsigned d : opt) {
        OutcomeVector y = prefix;
        y.push_back(d);
        next.push_back(std::move(y));
      }
    }
    out = std::move(next);
  }
  return out;
}

// Union of the healthy compatible sets over the preimage of `faulty`.
// `healthy_sets` is indexed by encoded healthy outcome for one fixed action.
inline StateSet faulty_compatible_states(std::span<const StateSet> healthy_sets,
                                         const SensorMode& mode, std::span<const unsigned> faulty,
                                         unsigned alphabet = 2) {
  if (healthy_sets.empty()) throw DomainError("empty healthy partition");
  StateSet out(healthy_sets.front().width());
  for (const auto& y : preimage(mode, faulty, alphabet)) {
    out |= healthy_sets[encode_outcome(y, alphabet)];
  }
  return out;
}

// P[x, q] = P[x] * prod_i P[q_i | x], row-major over (state, mode).
inline std::vector<double> build_joint_prior(std::span<const double> state_prior,
                                             const FaultSpec& spec,
                                             const std::vector<SensorMode>& modes) {
  double total = 0.0;
  for (std::size_t x = 0; x < state_prior.size(); ++x) {
    if (!std::isfinite(state_prior[x]) || state_prior[x] < 0.0) {
      throw ValidationError("state prior entry #" + std::to_string(x) + " is negative");
    }
    total += state_prior[x];
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw ValidationError("state prior sums to " + std::to_string(total) + ", expected 1");
  }
  spec.validate(state_prior.size());
  std::vector<double> joint(state_prior.size() * modes.size(), 0.0);
  for (std::size_t x = 0; x < state_prior.size(); ++x) {
    for (std::size_t q = 0; q < modes.size(); ++q) {
      double p = state_prior[x];
      for (std::size_t i = 0; i < spec.sensors.size(); ++i) {
        const auto& s = spec.sensors[i];
        const FaultKind kind = modes[q].per_sensor[i];
        if (kind.type == FaultKind::Type::kHealthy) {
          p *= s.healthy_probability(x);
        } else {
          const auto it = std::find(s.kinds.begin(), s.kinds.end(), kind);
          p *= s.kind_probability(static_cast<std::size_t>(it - s.kinds.begin()), x);
        }
      }
      joint[x * modes.size() + q] = p;
    }
  }
  return joint;
}

// Healthy outcome function mu_bar(v, x) as encoded outcome vectors.
struct HealthyTable {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::string> sensors;
  unsigned alphabet = 2;
  std::vector<OutcomeCode> codes;   // [action][state]
  std::vector<double> state_prior;  // uniform when left empty

  OutcomeCode code(std::size_t v, std::size_t x) const { return codes[v * states.size() + x]; }
  OutcomeVector healthy_outcome(std::size_t v, std::size_t x) const {
    return decode_outcome(code(v, x), sensors.size(), alphabet);
  }
  std::size_t outcome_space() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < sensors.size(); ++i) n *= alphabet;
    return n;
  }
  // D_bar(., v): healthy compatible sets indexed by encoded outcome.
  std::vector<StateSet> healthy_partition(std::size_t v) const {
    std::vector<StateSet> sets(outcome_space(), StateSet(states.size()));
    for (std::size_t x = 0; x < states.size(); ++x) sets[code(v, x)].set(x);
    return sets;
  }
};

// Diagnosis model whose outcome table is mu(v, x, q) = corrupt(q, mu_bar(v, x))
// and whose outcome set is every sensor vector over the alphabet.
inline DiagnosisModel compile_model(const HealthyTable& healthy, const FaultSpec& spec) {
  if (healthy.states.empty() || healthy.actions.empty()) {
    throw ValidationError("healthy table has no states or no actions");
  }
  if (spec.sensor_count() != healthy.sensors.size()) {
    throw ValidationError("fault specification covers " + std::to_string(spec.sensor_count()) +
                          " sensors, healthy table has " + std::to_string(healthy.sensors.size()));
  }
  if (spec.alphabet != healthy.alphabet) {
    throw ValidationError("fault specification and healthy table disagree on the alphabet");
  }
  const std::size_t nx = healthy.states.size(), nv = healthy.actions.size();
  if (healthy.codes.size() != nv * nx) throw ValidationError("healthy table is not total");
  const std::size_t ny = healthy.outcome_space();
  for (OutcomeCode c : healthy.codes) {
    if (c >= ny) throw ValidationError("healthy outcome code outside the sensor alphabet");
  }
  std::vector<double> state_prior = healthy.state_prior;
  if (state_prior.empty()) state_prior.assign(nx, 1.0 / static_cast<double>(nx));
  if (state_prior.size() != nx) throw ValidationError("state prior size mismatch");

  const std::vector<SensorMode> modes = enumerate_modes(spec);
  std::vector<double> joint = build_joint_prior(state_prior, spec, modes);

  std::vector<OutcomeCode> table(nv * modes.size() * nx);
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t q = 0; q < modes.size(); ++q) {
      for (std::size_t x = 0; x < nx; ++x) {
        const OutcomeVector y = corrupt(modes[q], healthy.healthy_outcome(v, x), spec.alphabet);
        table[(v * modes.size() + q) * nx + x] = encode_outcome(y, spec.alphabet);
      }
    }
  }
  std::vector<std::string> mode_names, outcome_names;
  for (const auto& m : modes) mode_names.push_back(m.label());
  for (std::size_t c = 0; c < ny; ++c) {
    outcome_names.push_back(
        outcome_label(decode_outcome(static_cast<OutcomeCode>(c), healthy.sensors.size(),
                                     healthy.alphabet)));
  }
  return DiagnosisModel(healthy.states, std::move(mode_names), healthy.actions,
                        std::move(outcome_names), std::move(joint), std::move(table));
}

// Fault section of an experiment config:
//   {"alphabet": 2,
//    "sensors": [{"sensor": "S2",
//                 "kinds": [{"flip": 0.2}, {"stuck_at": {"value": 1, "p": 0.4}}]}]}
// A probability may be a number or a list with one value per state. Sensors
// not listed are always healthy; when `fault_prone` is given only those
// sensors may appear.
inline FaultSpec fault_spec_from_json(const nlohmann::json& doc,
                                      const std::vector<std::string>& sensor_names,
                                      const std::vector<std::string>* fault_prone = nullptr) {
  FaultSpec spec = FaultSpec::AllHealthy(sensor_names);
  if (!doc.is_object()) throw ValidationError("fault specification must be a JSON object");
  if (doc.contains("alphabet")) spec.alphabet = doc.at("alphabet").get<unsigned>();
  if (!doc.contains("sensors") || !doc.at("sensors").is_array()) {
    throw ValidationError("fault specification needs a 'sensors' list");
  }
  auto read_probability = [](const nlohmann::json& p, const std::string& where) {
    std::vector<double> out;
    if (p.is_number()) {
      out.push_back(p.get<double>());
    } else if (p.is_array()) {
      for (const auto& v : p) {
        if (!v.is_number()) throw ValidationError(where + ": probability must be numeric");
        out.push_back(v.get<double>());
      }
    } else {
      throw ValidationError(where + ": probability must be a number or a list");
    }
    return out;
  };
  std::vector<bool> seen(sensor_names.size(), false);
  const auto& sensors = doc.at("sensors");
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const std::string where = "sensors[" + std::to_string(i) + "]";
    const auto& entry = sensors[i];
    if (!entry.is_object() || !entry.contains("sensor") || !entry.at("sensor").is_string()) {
      throw ValidationError(where + ": missing 'sensor' name");
    }
    const std::string name = entry.at("sensor").get<std::string>();
    const auto it = std::find(sensor_names.begin(), sensor_names.end(), name);
    if (it == sensor_names.end()) throw ValidationError(where + ": unknown sensor '" + name + "'");
    if (fault_prone != nullptr &&
        std::find(fault_prone->begin(), fault_prone->end(), name) == fault_prone->end()) {
      throw ValidationError(where + ": sensor '" + name + "' is not declared fault-prone");
    }
    const std::size_t idx = static_cast<std::size_t>(it - sensor_names.begin());
    if (seen[idx]) throw ValidationError(where + ": sensor '" + name + "' listed twice");
    seen[idx] = true;
    SensorFaultSpec& s = spec.sensors[idx];
    if (!entry.contains("kinds") || !entry.at("kinds").is_array()) {
      throw ValidationError(where + ": missing 'kinds' list");
    }
    for (const auto& kind : entry.at("kinds")) {
      if (kind.contains("flip")) {
        s.kinds.push_back(FaultKind::Flip());
        s.probability.push_back(read_probability(kind.at("flip"), where));
      } else if (kind.contains("stuck_at")) {
        const auto& st = kind.at("stuck_at");
        if (!st.is_object() || !st.contains("value") || !st.contains("p")) {
          throw ValidationError(where + ": stuck_at needs 'value' and 'p'");
        }
        s.kinds.push_back(FaultKind::StuckAt(st.at("value").get<unsigned>()));
        s.probability.push_back(read_probability(st.at("p"), where));
      } else {
        throw ValidationError(where + ": unknown fault kind " + kind.dump());
      }
    }
  }
  return spec;
}

}  // namespace activediag

#endif  // ACTIVEDIAG_FAULT_HPP_
