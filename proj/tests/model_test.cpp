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

#include "activediag/model.hpp"
#include "activediag/model_io.hpp"

namespace activediag {
namespace {

nlohmann::json TinyDoc() {
  return nlohmann::json::parse(R"({
    "states": ["a", "b"], "modes": ["ok"], "actions": ["v"], "outcomes": ["0", "1"],
    "prior": [["a", "ok", 0.5], ["b", "ok", 0.5]],
    "outcome_table": [["v", "a", "ok", "0"], ["v", "b", "ok", "1"]]
  })");
}

TEST(IdentifierListTest, RejectsDuplicatesAndEmpty) {
  EXPECT_THROW(IdentifierList("state", {"a", "a"}), ValidationError);
  EXPECT_THROW(IdentifierList("state", {""}), ValidationError);
  const IdentifierList ids("state", {"a", "b"});
  EXPECT_EQ(ids.index("b"), 1u);
  EXPECT_THROW(ids.index("c"), IdentifierError);
  EXPECT_THROW(ids.check(2), IdentifierError);
}

TEST(ModelTest, LoadsAndReportsSizes) {
  const DiagnosisModel m = model_from_json(TinyDoc());
  EXPECT_EQ(m.num_states(), 2u);
  EXPECT_EQ(m.num_modes(), 1u);
  EXPECT_EQ(m.outcome(0, 1, 0), 1u);
  EXPECT_DOUBLE_EQ(m.state_prior(0), 0.5);
  EXPECT_DOUBLE_EQ(m.min_positive_prior(), 0.5);
}

TEST(ModelTest, PriorMustSumToOne) {
  auto doc = TinyDoc();
  doc["prior"][1][2] = 0.4;
  EXPECT_THROW(model_from_json(doc), ValidationError);
}

TEST(ModelTest, NegativePriorRejected) {
  auto doc = TinyDoc();
  doc["prior"][0][2] = -0.5;
  doc["prior"][1][2] = 1.5;
  EXPECT_THROW(model_from_json(doc), ValidationError);
}

TEST(ModelTest, OmittedPriorIsZero) {
  auto doc = TinyDoc();
  doc["prior"] = nlohmann::json::array({nlohmann::json::array({"a", "ok", 1.0})});
  const DiagnosisModel m = model_from_json(doc);
  EXPECT_EQ(m.prior(1, 0), 0.0);
}

TEST(ModelTest, ErrorsNameTheEntry) {
  auto doc = TinyDoc();
  doc["outcome_table"][1][3] = "7";
  try {
    model_from_json(doc);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("outcome_table[1]"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("'7'"), std::string::npos) << e.what();
  }
}

TEST(ModelTest, OutcomeTableMustBeTotal) {
  auto doc = TinyDoc();
  doc["outcome_table"].erase(1);
  EXPECT_THROW(model_from_json(doc), ValidationError);
}

TEST(ModelTest, DuplicateEntriesRejected) {
  auto doc = TinyDoc();
  doc["outcome_table"].push_back({"v", "a", "ok", "1"});
  EXPECT_THROW(model_from_json(doc), ValidationError);
  doc = TinyDoc();
  doc["prior"].push_back({"a", "ok", 0.0});
  EXPECT_THROW(model_from_json(doc), ValidationError);
}

TEST(ModelTest, DirectConstructionValidatesOutcomeRange) {
  EXPECT_THROW(DiagnosisModel({"a"}, {"q"}, {"v"}, {"0"}, {1.0}, {1}), ValidationError);
  EXPECT_THROW(DiagnosisModel({"a"}, {"q"}, {"v"}, {"0"}, {1.0}, {}), ValidationError);
}

TEST(ModelTest, JsonRoundTrip) {
  const DiagnosisModel m = model_from_json(TinyDoc());
  const DiagnosisModel back = model_from_json(model_to_json(m));
  EXPECT_EQ(back.states().names(), m.states().names());
  for (std::size_t x = 0; x < 2; ++x) {
    EXPECT_EQ(back.prior(x, 0), m.prior(x, 0));
    EXPECT_EQ(back.outcome(0, x, 0), m.outcome(0, x, 0));
  }
}

TEST(ModelTest, MalformedFileIsParseError) {
  const std::string path = ::testing::TempDir() + "/broken.json";
  {
    std::ofstream out(path);
    out << "{\"states\": [";
  }
  EXPECT_THROW(load_model(path), ParseError);
  EXPECT_THROW(load_model(path + ".missing"), ValidationError);
}

}  // namespace
}  // namespace activediag
