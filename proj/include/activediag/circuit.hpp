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

// Power-distribution circuits and their healthy sensor readings.
//
// A sensor reads 1 (proper voltage) iff its node is reachable from a healthy
// generator through conducting elements. A contactor conducts iff it is
// closed and, when its health is unknown, healthy. Fixed contactors are
// permanently closed. A component conducts iff it is healthy (components of
// known health always conduct).
//
// Encodings, both most-significant-first in declaration order:
//   action v: bit i of the controllable contactors, 1 = closed.
//   state  x: bit j of the health-unknown elements (generators, then
//             components, then contactors), 1 = faulty.
// State and action identifiers are the corresponding bit strings.

#ifndef ACTIVEDIAG_CIRCUIT_HPP_
#define ACTIVEDIAG_CIRCUIT_HPP_

#include <cstddef>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "activediag/error.hpp"
#include "activediag/fault.hpp"
#include "activediag/model.hpp"
#include "activediag/model_io.hpp"
#include "json.hpp"

namespace activediag {

struct Generator {
  std::string id;
  std::string node;
  bool health_unknown = false;
};

struct Component {
  std::string id;
  std::string from;
  std::string to;
  bool health_unknown = false;
};

struct Contactor {
  std::string id;
  std::string from;
  std::string to;
  bool controllable = false;
  bool health_unknown = false;
};

struct Sensor {
  std::string id;
  std::string node;
  bool fault_prone = false;
};

inline constexpr std::size_t kMaxControllableContactors = 16;
inline constexpr std::size_t kMaxHealthUnknown = 20;

class CircuitModel {
 public:
  CircuitModel(std::vector<std::string> nodes, std::vector<Generator> generators,
               std::vector<Component> components, std::vector<Contactor> contactors,
               std::vector<Sensor> sensors)
      : nodes_(std::move(nodes)),
        generators_(std::move(generators)),
        components_(std::move(components)),
        contactors_(std::move(contactors)),
        sensors_(std::move(sensors)) {
    Validate();
    Index();
  }

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Generator>& generators() const { return generators_; }
  const std::vector<Component>& components() const { return components_; }
  const std::vector<Contactor>& contactors() const { return contactors_; }
  const std::vector<Sensor>& sensors() const { return sensors_; }

  // Ids of controllable contactors, in action-bit order.
  const std::vector<std::string>& controllable_ids() const { return controllable_ids_; }
  // Ids of health-unknown elements, in state-bit order.
  const std::vector<std::string>& health_unknown_ids() const { return unknown_ids_; }

  std::size_t num_actions() const { return std::size_t{1} << controllable_ids_.size(); }
  std::size_t num_states() const { return std::size_t{1} << unknown_ids_.size(); }
  std::size_t num_sensors() const { return sensors_.size(); }

  std::vector<bool> decode_action(std::size_t v) const {
    return DecodeBits(v, controllable_ids_.size());
  }
  // true = faulty
  std::vector<bool> decode_state(std::size_t x) const {
    return DecodeBits(x, unknown_ids_.size());
  }

  // closed[i]: controllable contactor i closed; faulty[j]: health-unknown
  // element j faulty.
  OutcomeVector evaluate_sensors(const std::vector<bool>& closed,
                                 const std::vector<bool>& faulty) const {
    if (closed.size() != controllable_ids_.size()) {
      throw DomainError("action assigns " + std::to_string(closed.size()) +
                        " contactors, circuit has " + std::to_string(controllable_ids_.size()));
    }
    if (faulty.size() != unknown_ids_.size()) {
      throw DomainError("state assigns " + std::to_string(faulty.size()) +
                        " elements, circuit has " + std::to_string(unknown_ids_.size()));
    }
    auto healthy = [&](int slot) { return slot < 0 || !faulty[static_cast<std::size_t>(slot)]; };

    std::vector<std::vector<std::size_t>> adj(nodes_.size());
    for (const Edge& e : edges_) {
      bool conducts = healthy(e.health_slot);
      if (e.control_slot >= 0) conducts = conducts && closed[static_cast<std::size_t>(e.control_slot)];
      if (conducts) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
      }
    }
    std::vector<bool> energized(nodes_.size(), false);
    std::vector<std::size_t> stack;
    for (const Source& g : sources_) {
      if (healthy(g.health_slot) && !energized[g.node]) {
        energized[g.node] = true;
        stack.push_back(g.node);
      }
    }
    while (!stack.empty()) {
      const std::size_t n = stack.back();
      stack.pop_back();
      for (std::size_t m : adj[n]) {
        if (!energized[m]) {
          energized[m] = true;
          stack.push_back(m);
        }
      }
    }
    OutcomeVector out(sensors_.size());
    for (std::size_t i = 0; i < sensors_.size(); ++i) out[i] = energized[sensor_nodes_[i]] ? 1 : 0;
    return out;
  }

  OutcomeVector evaluate_sensors(std::size_t v, std::size_t x) const {
    if (v >= num_actions() || x >= num_states()) throw DomainError("action or state out of range");
    return evaluate_sensors(decode_action(v), decode_state(x));
  }

  HealthyTable healthy_table() const {
    HealthyTable t;
    for (std::size_t x = 0; x < num_states(); ++x) t.states.push_back(BitLabel(x, unknown_ids_.size()));
    for (std::size_t v = 0; v < num_actions(); ++v) {
      t.actions.push_back(BitLabel(v, controllable_ids_.size()));
    }
    for (const auto& s : sensors_) t.sensors.push_back(s.id);
    t.alphabet = 2;
    t.codes.resize(num_actions() * num_states());
    for (std::size_t v = 0; v < num_actions(); ++v) {
      for (std::size_t x = 0; x < num_states(); ++x) {
        t.codes[v * num_states() + x] = encode_outcome(evaluate_sensors(v, x), 2);
      }
    }
    return t;
  }

  std::vector<std::string> sensor_ids() const {
    std::vector<std::string> out;
    for (const auto& s : sensors_) out.push_back(s.id);
    return out;
  }
  std::vector<std::string> fault_prone_sensor_ids() const {
    std::vector<std::string> out;
    for (const auto& s : sensors_) {
      if (s.fault_prone) out.push_back(s.id);
    }
    return out;
  }

  static std::string BitLabel(std::size_t value, std::size_t width) {
    std::string s(width, '0');
    for (std::size_t i = 0; i < width; ++i) {
      if ((value >> (width - 1 - i)) & 1u) s[i] = '1';
    }
    return s;
  }

 private:
  struct Edge {
    std::size_t a;
    std::size_t b;
    int health_slot;   // index into health-unknown elements, -1 if known healthy
    int control_slot;  // index into controllable contactors, -1 if fixed
  };
  struct Source {
    std::size_t node;
    int health_slot;
  };

  static std::vector<bool> DecodeBits(std::size_t value, std::size_t width) {
    std::vector<bool> bits(width);
    for (std::size_t i = 0; i < width; ++i) bits[i] = (value >> (width - 1 - i)) & 1u;
    return bits;
  }

  void Validate() const {
    std::unordered_set<std::string> node_set;
    for (const auto& n : nodes_) {
      if (n.empty()) throw ValidationError("node with empty name");
      if (!node_set.insert(n).second) throw ValidationError("duplicate node '" + n + "'");
    }
    if (generators_.empty()) throw ValidationError("circuit has no generators");
    if (components_.empty()) throw ValidationError("circuit has an empty component list");
    if (sensors_.empty()) throw ValidationError("circuit has no sensors");
    std::unordered_set<std::string> ids;
    auto check_id = [&](const std::string& kind, const std::string& id) {
      if (id.empty()) throw ValidationError(kind + " with empty id");
      if (!ids.insert(id).second) throw ValidationError("duplicate element id '" + id + "'");
    };
    auto check_node = [&](const std::string& kind, const std::string& id, const std::string& node) {
      if (!node_set.count(node)) {
        throw ValidationError(kind + " '" + id + "' references undeclared node '" + node + "'");
      }
    };
    for (const auto& g : generators_) {
      check_id("generator", g.id);
      check_node("generator", g.id, g.node);
    }
    for (const auto& c : components_) {
      check_id("component", c.id);
      check_node("component", c.id, c.from);
      check_node("component", c.id, c.to);
    }
    std::size_t controllable = 0, unknown = 0;
    for (const auto& c : contactors_) {
      check_id("contactor", c.id);
      check_node("contactor", c.id, c.from);
      check_node("contactor", c.id, c.to);
      controllable += c.controllable;
      unknown += c.health_unknown;
    }
    for (const auto& s : sensors_) {
      check_id("sensor", s.id);
      check_node("sensor", s.id, s.node);
    }
    for (const auto& g : generators_) unknown += g.health_unknown;
    for (const auto& c : components_) unknown += c.health_unknown;
    if (controllable > kMaxControllableContactors) {
      throw ValidationError("too many controllable contactors (" + std::to_string(controllable) + ")");
    }
    if (unknown > kMaxHealthUnknown) {
      throw ValidationError("too many health-unknown elements (" + std::to_string(unknown) + ")");
    }
  }

  void Index() {
    std::unordered_map<std::string, std::size_t> node_index;
    for (std::size_t i = 0; i < nodes_.size(); ++i) node_index[nodes_[i]] = i;
    for (const auto& g : generators_) {
      int slot = -1;
      if (g.health_unknown) {
        slot = static_cast<int>(unknown_ids_.size());
        unknown_ids_.push_back(g.id);
      }
      sources_.push_back({node_index.at(g.node), slot});
    }
    for (const auto& c : components_) {
      int slot = -1;
      if (c.health_unknown) {
        slot = static_cast<int>(unknown_ids_.size());
        unknown_ids_.push_back(c.id);
      }
      edges_.push_back({node_index.at(c.from), node_index.at(c.to), slot, -1});
    }
    for (const auto& c : contactors_) {
      int slot = -1, control = -1;
      if (c.health_unknown) {
        slot = static_cast<int>(unknown_ids_.size());
        unknown_ids_.push_back(c.id);
      }
      if (c.controllable) {
        control = static_cast<int>(controllable_ids_.size());
        controllable_ids_.push_back(c.id);
      }
      edges_.push_back({node_index.at(c.from), node_index.at(c.to), slot, control});
    }
    for (const auto& s : sensors_) sensor_nodes_.push_back(node_index.at(s.node));

    // Connectivity as declared: every node must hang off some generator when
    // every element conducts.
    std::vector<std::vector<std::size_t>> adj(nodes_.size());
    for (const Edge& e : edges_) {
      adj[e.a].push_back(e.b);
      adj[e.b].push_back(e.a);
    }
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<std::size_t> stack;
    for (const Source& g : sources_) {
      if (!seen[g.node]) {
        seen[g.node] = true;
        stack.push_back(g.node);
      }
    }
    while (!stack.empty()) {
      const std::size_t n = stack.back();
      stack.pop_back();
      for (std::size_t m : adj[n]) {
        if (!seen[m]) {
          seen[m] = true;
          stack.push_back(m);
        }
      }
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!seen[i]) throw ValidationError("node '" + nodes_[i] + "' is not connected to any generator");
    }
  }

  std::vector<std::string> nodes_;
  std::vector<Generator> generators_;
  std::vector<Component> components_;
  std::vector<Contactor> contactors_;
  std::vector<Sensor> sensors_;

  std::vector<Edge> edges_;
  std::vector<Source> sources_;
  std::vector<std::size_t> sensor_nodes_;
  std::vector<std::string> controllable_ids_;
  std::vector<std::string> unknown_ids_;
};

namespace detail {

inline const nlohmann::json& RequireList(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_array()) {
    throw ValidationError(std::string("circuit needs a '") + key + "' list");
  }
  return doc.at(key);
}

inline std::string RequireString(const nlohmann::json& e, const char* key, const std::string& where) {
  if (!e.is_object() || !e.contains(key) || !e.at(key).is_string()) {
    throw ValidationError(where + ": missing string field '" + key + "'");
  }
  return e.at(key).get<std::string>();
}

inline bool OptionalBool(const nlohmann::json& e, const char* key, const std::string& where) {
  if (!e.contains(key)) return false;
  if (!e.at(key).is_boolean()) throw ValidationError(where + ": field '" + key + "' must be boolean");
  return e.at(key).get<bool>();
}

}  // namespace detail

inline CircuitModel circuit_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("circuit document must be a JSON object");
  std::vector<std::string> nodes;
  const auto& node_doc = detail::RequireList(doc, "nodes");
  for (std::size_t i = 0; i < node_doc.size(); ++i) {
    if (!node_doc[i].is_string()) {
      throw ValidationError("nodes[" + std::to_string(i) + "] must be a string");
    }
    nodes.push_back(node_doc[i].get<std::string>());
  }
  std::vector<Generator> generators;
  const auto& gen_doc = detail::RequireList(doc, "generators");
  for (std::size_t i = 0; i < gen_doc.size(); ++i) {
    const std::string where = "generators[" + std::to_string(i) + "]";
    generators.push_back({detail::RequireString(gen_doc[i], "id", where),
                          detail::RequireString(gen_doc[i], "node", where),
                          detail::OptionalBool(gen_doc[i], "health_unknown", where)});
  }
  std::vector<Component> components;
  const auto& comp_doc = detail::RequireList(doc, "components");
  for (std::size_t i = 0; i < comp_doc.size(); ++i) {
    const std::string where = "components[" + std::to_string(i) + "]";
    components.push_back({detail::RequireString(comp_doc[i], "id", where),
                          detail::RequireString(comp_doc[i], "from", where),
                          detail::RequireString(comp_doc[i], "to", where),
                          detail::OptionalBool(comp_doc[i], "health_unknown", where)});
  }
  std::vector<Contactor> contactors;
  if (doc.contains("contactors")) {
    const auto& con_doc = detail::RequireList(doc, "contactors");
    for (std::size_t i = 0; i < con_doc.size(); ++i) {
      const std::string where = "contactors[" + std::to_string(i) + "]";
      contactors.push_back({detail::RequireString(con_doc[i], "id", where),
                            detail::RequireString(con_doc[i], "from", where),
                            detail::RequireString(con_doc[i], "to", where),
                            detail::OptionalBool(con_doc[i], "controllable", where),
                            detail::OptionalBool(con_doc[i], "health_unknown", where)});
    }
  }
  std::vector<Sensor> sensors;
  const auto& sen_doc = detail::RequireList(doc, "sensors");
  for (std::size_t i = 0; i < sen_doc.size(); ++i) {
    const std::string where = "sensors[" + std::to_string(i) + "]";
    sensors.push_back({detail::RequireString(sen_doc[i], "id", where),
                       detail::RequireString(sen_doc[i], "node", where),
                       detail::OptionalBool(sen_doc[i], "fault_prone", where)});
  }
  return CircuitModel(std::move(nodes), std::move(generators), std::move(components),
                      std::move(contactors), std::move(sensors));
}

inline CircuitModel load_circuit(const std::string& path) {
  const nlohmann::json doc = parse_json_file(path);
  try {
    return circuit_from_json(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

// Circuit plus fault section compiled into a diagnosis model. A null fault
// document means every sensor is healthy.
inline DiagnosisModel compile_circuit(const CircuitModel& circuit,
                                      const nlohmann::json& faults = nullptr) {
  const HealthyTable healthy = circuit.healthy_table();
  const std::vector<std::string> prone = circuit.fault_prone_sensor_ids();
  FaultSpec spec = faults.is_null() ? FaultSpec::AllHealthy(circuit.sensor_ids())
                                    : fault_spec_from_json(faults, circuit.sensor_ids(), &prone);
  return compile_model(healthy, spec);
}

}  // namespace activediag

#endif  // ACTIVEDIAG_CIRCUIT_HPP_
