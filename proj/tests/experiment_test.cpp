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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "activediag/experiment.hpp"
#include "activediag/model_io.hpp"

namespace activediag {
namespace {

const std::string kData = ACTIVEDIAG_DATA_DIR;

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// runs.csv without its trailing timing column.
std::string StripTiming(const std::string& csv) {
  std::stringstream in(csv), out;
  std::string line;
  while (std::getline(in, line)) out << line.substr(0, line.rfind(',')) << '\n';
  return out.str();
}

ExperimentConfig GreedyVsBrute(std::size_t k) {
  ExperimentConfig c;
  c.budget = k;
  c.policies = {GreedyPartition{}, BruteForceAll{}};
  return c;
}

TEST(ExperimentTest, SweepsEverySupportedPair) {
  const DiagnosisModel m = load_model(kData + "/tiny.json");
  const ExperimentResult r = run_experiment(m, GreedyVsBrute(1));
  EXPECT_EQ(r.pairs.size(), 6u);
  EXPECT_EQ(r.summary.parity.size(), 6u);
  EXPECT_FALSE(r.summary.interrupted);
  ASSERT_EQ(r.summary.policies.size(), 2u);
  EXPECT_EQ(r.summary.policies[0].policy, "greedy");
  EXPECT_NEAR(r.summary.policies[0].swept_mass, 1.0, 1e-12);
  EXPECT_NEAR(r.summary.policies[0].f_avg, f_avg(m, GreedyPartition{}, 1), 1e-12);
}

TEST(ExperimentTest, CdfIsNondecreasingAndEndsAtOne) {
  const DiagnosisModel m = load_model(kData + "/tiny.json");
  const ExperimentResult r = run_experiment(m, GreedyVsBrute(2));
  for (const auto& p : r.summary.policies) {
    ASSERT_FALSE(p.indistinguishable_cdf.empty());
    for (std::size_t i = 1; i < p.indistinguishable_cdf.size(); ++i) {
      EXPECT_GE(p.indistinguishable_cdf[i], p.indistinguishable_cdf[i - 1]);
    }
    EXPECT_DOUBLE_EQ(p.indistinguishable_cdf.back(), 1.0);
    std::size_t binned = 0;
    for (const auto& b : p.latency_histogram) binned += b.count;
    EXPECT_EQ(binned, p.runs);
  }
}

TEST(ExperimentTest, SinglePairSingleModeGivesStepCdf) {
  const DiagnosisModel m({"a", "b", "c"}, {"q"}, {"v"}, {"0", "1"}, {0.5, 0.25, 0.25},
                         {0, 1, 1});
  ExperimentConfig c = GreedyVsBrute(1);
  c.pairs = std::vector<TruePair>{{1, 0}};
  const ExperimentResult r = run_experiment(m, c);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.summary.policies[0].indistinguishable_cdf, (std::vector<double>{0.0, 1.0, 1.0}));
}

TEST(ExperimentTest, OutputsAreDeterministicAcrossRunsAndThreads) {
  const DiagnosisModel m = load_model(kData + "/tiny.json");
  const auto base = std::filesystem::path(::testing::TempDir()) / "activediag_exp";
  std::filesystem::remove_all(base);
  ExperimentConfig c = GreedyVsBrute(2);
  write_experiment_outputs(m, run_experiment(m, c), base / "a");
  c.jobs = 4;
  write_experiment_outputs(m, run_experiment(m, c), base / "b");
  EXPECT_EQ(StripTiming(ReadFile(base / "a" / "runs.csv")),
            StripTiming(ReadFile(base / "b" / "runs.csv")));
  EXPECT_EQ(ReadFile(base / "a" / "parity.csv"), ReadFile(base / "b" / "parity.csv"));
  for (const char* f : {"summary.json", "latency_histogram_greedy.csv",
                        "indistinguishable_cdf_brute-force.csv", "latency_histogram.gp",
                        "indistinguishable_cdf.gp"}) {
    EXPECT_TRUE(std::filesystem::exists(base / "a" / f)) << f;
  }
  const std::string header = ReadFile(base / "a" / "runs.csv");
  EXPECT_EQ(header.rfind("state,mode,policy,step,action,outcome,reward_after,select_seconds", 0),
            0u);
}

TEST(ExperimentTest, StopFlagLeavesPartialSummary) {
  const DiagnosisModel m = load_model(kData + "/tiny.json");
  std::atomic<bool> stop{true};
  const ExperimentResult r = run_experiment(m, GreedyVsBrute(1), &stop);
  EXPECT_TRUE(r.summary.interrupted);
  EXPECT_EQ(r.summary.pairs_completed, 0u);
}

TEST(ExperimentTest, ConfigValidation) {
  const DiagnosisModel m({"a", "b"}, {"q"}, {"v"}, {"0", "1"}, {1.0, 0.0}, {0, 1});
  ExperimentConfig c = GreedyVsBrute(0);
  EXPECT_THROW(run_experiment(m, c), ValidationError);
  c = GreedyVsBrute(1);
  c.policies.clear();
  EXPECT_THROW(run_experiment(m, c), ValidationError);
  c = GreedyVsBrute(1);
  c.pairs = std::vector<TruePair>{{1, 0}};
  EXPECT_THROW(run_experiment(m, c), ValidationError);
}

TEST(ExperimentTest, GreedyEqualsOptimalOnIndicatorParity) {
  // Parity is exact equality; a greedy run that stops early is not at parity.
  const DiagnosisModel m({"a", "b", "c"}, {"q"}, {"v0", "v1", "v2"}, {"0", "1"},
                         {1.0 / 3, 1.0 / 3, 1.0 / 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  const ExperimentResult r = run_experiment(m, GreedyVsBrute(2));
  EXPECT_DOUBLE_EQ(r.summary.parity_rate(), 1.0);
  const ExperimentResult short_run = run_experiment(m, GreedyVsBrute(1));
  EXPECT_LT(short_run.summary.parity_rate(), 1.0);
}

TEST(LeastSquaresTest, ExactLine) {
  const LinearFit fit = least_squares({1, 3, 9, 27}, {2.5, 6.5, 18.5, 54.5});
  EXPECT_NEAR(fit.slope, 2.0, 1e-12);
  EXPECT_NEAR(fit.intercept, 0.5, 1e-12);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
  EXPECT_THROW(least_squares({1}, {1}), DomainError);
}

TEST(TimingScanTest, PointsPerModeCount) {
  const CircuitModel c = load_circuit(kData + "/small_circuit.json");
  const auto faults = parse_json_file(kData + "/small_circuit_faults.json");
  TimingConfig cfg;
  cfg.sample_pairs = 4;
  cfg.repeats = 1;
  const TimingScan one = timing_scan(c, faults, {1}, cfg);
  ASSERT_EQ(one.points.size(), 1u);
  EXPECT_EQ(one.points[0].modes, 3u);
  EXPECT_FALSE(one.fit.has_value());
  const TimingScan all = timing_scan(c, faults, {0, 1, 2, 3}, cfg);
  ASSERT_EQ(all.points.size(), 4u);
  EXPECT_EQ(all.points[3].modes, 27u);
  for (const auto& p : all.points) EXPECT_GT(p.mean_latency, 0.0);
  EXPECT_TRUE(all.fit.has_value());
  EXPECT_THROW(restrict_faults(faults, 4), ValidationError);
}

TEST(FormatTest, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  const double x = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

}  // namespace
}  // namespace activediag
