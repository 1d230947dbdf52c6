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

// activediag: experiments, factor reports and invariant checks.
//
// Exit codes: 0 success, 1 validation or runtime failure, 2 invariant
// violation, 64 usage error.

#include <atomic>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "activediag/circuit.hpp"
#include "activediag/error.hpp"
#include "activediag/experiment.hpp"
#include "activediag/guarantees.hpp"
#include "activediag/model_io.hpp"
#include "activediag/policy.hpp"
#include "activediag/random_models.hpp"
#include "activediag/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitViolation = 2;
constexpr int kExitUsage = 64;

std::atomic<bool> g_stop{false};

void HandleInterrupt(int) { g_stop.store(true); }

struct ModelSource {
  std::string circuit;
  std::string model;
  std::string faults;

  void add_to(CLI::App* cmd) {
    auto* c = cmd->add_option("--circuit", circuit, "circuit JSON file")->check(CLI::ExistingFile);
    auto* m = cmd->add_option("--model", model, "explicit model JSON file")->check(CLI::ExistingFile);
    cmd->add_option("--faults", faults, "fault specification JSON (with --circuit)")
        ->check(CLI::ExistingFile)
        ->needs(c);
    c->excludes(m);
  }

  activediag::DiagnosisModel load() const {
    if (!model.empty()) return activediag::load_model(model);
    if (circuit.empty()) throw activediag::ValidationError("one of --circuit or --model is required");
    const auto net = activediag::load_circuit(circuit);
    if (faults.empty()) return activediag::compile_circuit(net);
    try {
      return activediag::compile_circuit(net, activediag::parse_json_file(faults));
    } catch (const activediag::ValidationError& e) {
      throw activediag::ValidationError(faults + ": " + e.what());
    }
  }
};

void WriteJson(const std::filesystem::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw activediag::ValidationError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

void PrintSuites(const std::vector<activediag::SuiteResult>& suites) {
  for (const auto& s : suites) {
    std::cout << (s.passed() ? "PASS " : "FAIL ") << s.name << ": " << s.violations << " of "
              << s.checked << " checks violated\n";
  }
}

bool AllPassed(const std::vector<activediag::SuiteResult>& suites) {
  for (const auto& s : suites) {
    if (!s.passed()) return false;
  }
  return true;
}

void PrintChain(const activediag::FactorReport& r) {
  std::cout << "1 <= zeta_star_emp (" << activediag::format_number(r.zeta_star.value)
            << ") <= zeta_alg (" << activediag::format_number(r.zeta_alg.value)
            << ") <= zeta_bar (" << activediag::format_number(r.zeta_bar.value)
            << ") <= |Q|/min P (" << activediag::format_number(r.upper_bound) << ")\n";
  const auto bad = r.chain_violations();
  for (const std::string link : {"1 <= zeta_star", "zeta_star <= zeta", "zeta <= zeta_bar",
                                 "zeta_bar <= |Q|/min P"}) {
    const bool failed = std::find(bad.begin(), bad.end(), link) != bad.end();
    std::cout << (failed ? "FAIL " : "PASS ") << link << '\n';
  }
  std::cout << "hard violations (Delta 0 -> positive): " << r.zeta_star.hard_violations << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group-based active diagnosis with persistent sensor faults"};
  app.require_subcommand(1);

  // validate
  ModelSource validate_src;
  auto* validate = app.add_subcommand("validate", "load and check model files");
  validate_src.add_to(validate);

  // run
  ModelSource run_src;
  std::size_t run_k = 6;
  std::vector<std::string> run_policies;
  std::string run_out;
  std::size_t run_jobs = 1;
  std::uint64_t run_seed = 0;
  std::uint64_t run_cap = activediag::kDefaultSearchCap;
  std::size_t run_repeats = 1;
  auto* run = app.add_subcommand("run", "run policies against every supported true pair");
  run_src.add_to(run);
  run->add_option("-k,--budget", run_k, "action budget")->check(CLI::PositiveNumber);
  run->add_option("--policy", run_policies,
                  "greedy, greedy-direct, brute-force, random or optimal (repeatable)");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--jobs", run_jobs, "worker threads")->check(CLI::PositiveNumber);
  run->add_option("--seed", run_seed, "seed for the random policy");
  run->add_option("--cap", run_cap, "search tree cap for the optimal policy");
  run->add_option("--repeats", run_repeats, "timing repeats per selection (median kept)")
      ->check(CLI::PositiveNumber);

  // zeta
  ModelSource zeta_src;
  std::size_t zeta_k = 2;
  std::optional<std::size_t> zeta_depth;
  std::uint64_t zeta_cap = activediag::kDefaultFactorCap;
  std::string zeta_out;
  auto* zeta = app.add_subcommand("zeta", "adaptive submodularity factor report");
  zeta_src.add_to(zeta);
  zeta->add_option("-k,--budget", zeta_k, "sweep length")->check(CLI::PositiveNumber);
  zeta->add_option("--depth", zeta_depth, "realization depth for the empirical factor (default k)");
  zeta->add_option("--cap", zeta_cap, "sweep size cap");
  zeta->add_option("--out", zeta_out, "write factors.json into this directory");

  // verify
  ModelSource verify_src;
  std::uint64_t verify_seed = 7;
  std::size_t verify_instances = 50;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "invariant suites on generated or given models");
  verify_src.add_to(verify);
  verify->add_option("--seed", verify_seed, "generator seed");
  verify->add_option("--instances", verify_instances, "number of generated models");
  verify->add_option("--out", verify_out, "write verify.json into this directory");

  // timing
  std::string timing_circuit, timing_faults, timing_out;
  std::size_t timing_k = 6, timing_samples = 64;
  std::uint64_t timing_seed = 0;
  auto* timing = app.add_subcommand("timing", "greedy latency against the number of modes");
  timing->add_option("--circuit", timing_circuit, "circuit JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  timing->add_option("--faults", timing_faults, "fault specification JSON")
      ->required()
      ->check(CLI::ExistingFile);
  timing->add_option("-k,--budget", timing_k, "action budget")->check(CLI::PositiveNumber);
  timing->add_option("--samples", timing_samples, "true pairs timed per mode count")
      ->check(CLI::PositiveNumber);
  timing->add_option("--seed", timing_seed, "pair sampling seed");
  timing->add_option("--out", timing_out, "output directory");

  // session
  ModelSource session_src;
  std::size_t session_k = 6;
  auto* session = app.add_subcommand("session", "operator-driven greedy session on stdin/stdout");
  session_src.add_to(session);
  session->add_option("-k,--budget", session_k, "action budget")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) {
      const auto model = validate_src.load();
      std::cout << "ok: " << model.num_states() << " states, " << model.num_modes() << " modes, "
                << model.num_actions() << " actions, " << model.num_outcomes() << " outcomes\n";
      return kExitOk;
    }

    if (*run) {
      const auto model = run_src.load();
      if (run_policies.empty()) run_policies = {"greedy", "brute-force"};
      activediag::ExperimentConfig config;
      config.budget = run_k;
      for (const auto& name : run_policies) {
        config.policies.push_back(activediag::parse_policy(name, run_seed, run_cap));
      }
      config.jobs = run_jobs;
      config.out_dir = run_out;
      config.seed = run_seed;
      config.timing_repeats = run_repeats;
      std::signal(SIGINT, HandleInterrupt);
      const auto result = activediag::run_experiment(model, config, &g_stop);
      if (!run_out.empty()) activediag::write_experiment_outputs(model, result, run_out);
      std::cout << activediag::summary_to_json(result.summary).dump(2) << '\n';
      return result.summary.interrupted ? kExitInvalid : kExitOk;
    }

    if (*zeta) {
      const auto model = zeta_src.load();
      activediag::FactorOptions options;
      options.budget = zeta_k;
      options.depth = zeta_depth.value_or(zeta_k);
      options.sweep_cap = zeta_cap;
      const auto report = activediag::factor_report(model, options);
      const auto j = activediag::factor_report_to_json(model, report);
      if (!zeta_out.empty()) WriteJson(std::filesystem::path(zeta_out) / "factors.json", j);
      std::cout << j.dump(2) << '\n';
      PrintChain(report);
      return report.chain_violations().empty() ? kExitOk : kExitViolation;
    }

    if (*verify) {
      std::vector<activediag::DiagnosisModel> models;
      if (!verify_src.model.empty() || !verify_src.circuit.empty()) {
        models.push_back(verify_src.load());
      } else {
        models = activediag::generate_models(verify_seed, verify_instances);
      }
      const auto suites = activediag::verify_models(models);
      PrintSuites(suites);
      nlohmann::json j = nlohmann::json::array();
      for (const auto& s : suites) j.push_back(s.to_json());
      if (!verify_out.empty()) WriteJson(std::filesystem::path(verify_out) / "verify.json", j);
      if (!AllPassed(suites)) {
        for (const auto& s : suites) {
          if (!s.passed()) std::cerr << s.name << " witness: " << s.witnesses.front().dump() << '\n';
        }
        return kExitViolation;
      }
      std::cout << "all suites passed on " << models.size() << " models\n";
      return kExitOk;
    }

    if (*timing) {
      const auto net = activediag::load_circuit(timing_circuit);
      const auto faults = activediag::parse_json_file(timing_faults);
      const std::size_t listed = faults.contains("sensors") ? faults.at("sensors").size() : 0;
      std::vector<std::size_t> counts;
      for (std::size_t n = 0; n <= listed; ++n) counts.push_back(n);
      activediag::TimingConfig config;
      config.budget = timing_k;
      config.sample_pairs = timing_samples;
      config.seed = timing_seed;
      const auto scan = activediag::timing_scan(net, faults, counts, config);
      const std::filesystem::path dir = timing_out.empty() ? "." : timing_out;
      activediag::write_timing_csv(scan, dir / "timing.csv");
      for (const auto& p : scan.points) {
        std::cout << "|Q|=" << p.modes << " mean latency "
                  << activediag::format_number(p.mean_latency) << " s over " << p.samples
                  << " selections\n";
      }
      if (scan.fit) {
        std::cout << "linear fit: slope " << activediag::format_number(scan.fit->slope)
                  << " s/mode, intercept " << activediag::format_number(scan.fit->intercept)
                  << " s, R^2 " << activediag::format_number(scan.fit->r2) << '\n';
      }
      return kExitOk;
    }

    if (*session) {
      const auto model = session_src.load();
      activediag::interactive_session(model, session_k, std::cin, std::cout);
      return kExitOk;
    }
  } catch (const activediag::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitUsage;
}
