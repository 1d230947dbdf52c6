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

#include <gtest/gtest.h>

#include "activediag/circuit.hpp"
#include "oracles.hpp"

#ifndef ACTIVEDIAG_DATA_DIR
#error "ACTIVEDIAG_DATA_DIR must point at the shipped data directory"
#endif

namespace activediag {
namespace {

const std::string kData = ACTIVEDIAG_DATA_DIR;

nlohmann::json CircuitDoc() { return parse_json_file(kData + "/small_circuit.json"); }

TEST(CircuitTest, ShippedCircuitShape) {
  const CircuitModel c = load_circuit(kData + "/small_circuit.json");
  EXPECT_EQ(c.num_actions(), 16u);
  EXPECT_EQ(c.num_states(), 64u);
  EXPECT_EQ(c.generators().size() + c.components().size() + c.contactors().size() +
                c.sensors().size(),
            13u);
  EXPECT_EQ(c.fault_prone_sensor_ids().size(), 3u);
  EXPECT_EQ(c.controllable_ids(), (std::vector<std::string>{"C1", "C3", "C4", "C6"}));
  EXPECT_EQ(c.health_unknown_ids(),
            (std::vector<std::string>{"G1", "G2", "C2", "R1", "C5", "R2"}));
}

TEST(CircuitTest, OpenContactorsLeaveEverythingDark) {
  const CircuitModel c = load_circuit(kData + "/small_circuit.json");
  for (std::size_t x = 0; x < c.num_states(); ++x) {
    EXPECT_EQ(c.evaluate_sensors(0, x), (OutcomeVector{0, 0, 0}));
  }
}

TEST(CircuitTest, SingleFeedHealthy) {
  const CircuitModel c = load_circuit(kData + "/small_circuit.json");
  // Only C1 closed (action bit string 1000), all healthy.
  EXPECT_EQ(c.evaluate_sensors(0b1000, 0), (OutcomeVector{1, 1, 0}));
  // Also close C4: dc2 fed through the tie.
  EXPECT_EQ(c.evaluate_sensors(0b1010, 0), (OutcomeVector{1, 1, 1}));
  // G1 faulty (state bit string 100000).
  EXPECT_EQ(c.evaluate_sensors(0b1010, 0b100000), (OutcomeVector{0, 0, 0}));
}

TEST(CircuitTest, BitLabels) {
  EXPECT_EQ(CircuitModel::BitLabel(0b1010, 4), "1010");
  const CircuitModel c = load_circuit(kData + "/small_circuit.json");
  const HealthyTable t = c.healthy_table();
  EXPECT_EQ(t.actions[0b1000], "1000");
  EXPECT_EQ(t.states[1], "000001");
}

// Every (action, state) against label propagation on edges built straight
// from the JSON document.
TEST(CircuitTest, MatchesPropagationOracle) {
  const auto doc = CircuitDoc();
  const CircuitModel c = circuit_from_json(doc);
  std::vector<std::string> unknown, controllable;
  for (const char* key : {"generators", "components", "contactors"}) {
    for (const auto& e : doc.at(key)) {
      if (e.value("health_unknown", false)) unknown.push_back(e.at("id"));
    }
  }
  for (const auto& e : doc.at("contactors")) {
    if (e.value("controllable", false)) controllable.push_back(e.at("id"));
  }
  std::vector<std::string> sensor_nodes;
  for (const auto& s : doc.at("sensors")) sensor_nodes.push_back(s.at("node"));
  auto bit = [](const std::vector<std::string>& order, const std::string& id, std::size_t value) {
    const auto it = std::find(order.begin(), order.end(), id);
    if (it == order.end()) return false;
    const std::size_t i = static_cast<std::size_t>(it - order.begin());
    return ((value >> (order.size() - 1 - i)) & 1u) != 0;
  };
  for (std::size_t v = 0; v < c.num_actions(); ++v) {
    for (std::size_t x = 0; x < c.num_states(); ++x) {
      std::vector<std::string> sources;
      for (const auto& g : doc.at("generators")) {
        if (!bit(unknown, g.at("id"), x)) sources.push_back(g.at("node"));
      }
      std::vector<oracle::Edge> edges;
      for (const auto& e : doc.at("components")) {
        edges.push_back({e.at("from"), e.at("to"), !bit(unknown, e.at("id"), x)});
      }
      for (const auto& e : doc.at("contactors")) {
        const bool closed =
            !e.value("controllable", false) || bit(controllable, e.at("id"), v);
        edges.push_back({e.at("from"), e.at("to"), closed && !bit(unknown, e.at("id"), x)});
      }
      ASSERT_EQ(c.evaluate_sensors(v, x), oracle::Energized(sources, edges, sensor_nodes))
          << "action " << v << " state " << x;
    }
  }
}

TEST(CircuitTest, UndeclaredNodeNamesTheElement) {
  auto doc = CircuitDoc();
  doc["components"][1]["to"] = "nowhere";
  try {
    circuit_from_json(doc);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("R1"), std::string::npos) << what;
    EXPECT_NE(what.find("nowhere"), std::string::npos) << what;
  }
}

TEST(CircuitTest, StructuralErrors) {
  auto doc = CircuitDoc();
  doc["components"] = nlohmann::json::array();
  EXPECT_THROW(circuit_from_json(doc), ValidationError);

  doc = CircuitDoc();
  doc["generators"] = nlohmann::json::array();
  EXPECT_THROW(circuit_from_json(doc), ValidationError);

  doc = CircuitDoc();
  doc["sensors"][0]["id"] = "C1";  // clashes with a contactor
  EXPECT_THROW(circuit_from_json(doc), ValidationError);

  doc = CircuitDoc();
  doc["nodes"].push_back("island");
  EXPECT_THROW(circuit_from_json(doc), ValidationError);

  doc = CircuitDoc();
  doc.erase("sensors");
  EXPECT_THROW(circuit_from_json(doc), ValidationError);
}

TEST(CircuitTest, CompileWithShippedFaults) {
  const CircuitModel c = load_circuit(kData + "/small_circuit.json");
  const DiagnosisModel m = compile_circuit(c, parse_json_file(kData + "/small_circuit_faults.json"));
  EXPECT_EQ(m.num_actions(), 16u);
  EXPECT_EQ(m.num_states(), 64u);
  EXPECT_EQ(m.num_modes(), 27u);
  EXPECT_EQ(m.num_outcomes(), 8u);
  EXPECT_NEAR(m.prior(0, 0), 0.001, 1e-12);

  const DiagnosisModel healthy = compile_circuit(c);
  EXPECT_EQ(healthy.num_modes(), 1u);
}

TEST(CircuitTest, FaultsOnSensorNotFaultProneRejected) {
  auto doc = CircuitDoc();
  doc["sensors"][2]["fault_prone"] = false;
  const CircuitModel c = circuit_from_json(doc);
  EXPECT_THROW(compile_circuit(c, parse_json_file(kData + "/small_circuit_faults.json")), ValidationError);
}

}  // namespace
}  // namespace activediag
