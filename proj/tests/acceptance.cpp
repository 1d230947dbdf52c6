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

// Acceptance checks. `acceptance` runs every criterion; `acceptance N` runs
// one. Each prints a single PASS/FAIL line; the exit status is nonzero when
// any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "activediag/circuit.hpp"
#include "activediag/experiment.hpp"
#include "activediag/fault.hpp"
#include "activediag/guarantees.hpp"
#include "activediag/random_models.hpp"
#include "activediag/verify.hpp"
#include "oracles.hpp"

namespace {

using namespace activediag;

constexpr double kTol = 1e-9;
constexpr std::uint64_t kSuiteSeed = 2026;
constexpr std::size_t kSuiteSize = 60;
const std::string kData = ACTIVEDIAG_DATA_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const std::vector<DiagnosisModel>& Suite() {
  static const std::vector<DiagnosisModel> models = generate_models(kSuiteSeed, kSuiteSize);
  return models;
}

std::string Num(double v) { return format_number(v); }

// 1. Version spaces, posteriors and Delta against definitional oracles.
Outcome OracleEquivalence() {
  const auto start = std::chrono::steady_clock::now();
  std::size_t beliefs = 0, mismatches = 0;
  for (const auto& m : Suite()) {
    const RealizationTree tree(m, m.num_actions(), kDefaultTreeCap);
    for (const auto& [key, b] : tree.nodes()) {
      ++beliefs;
      std::vector<oracle::Obs> obs;
      for (const auto& o : b.realization().steps()) obs.push_back({o.action, o.outcome});
      const auto alive = oracle::JointFilter(m, obs);
      const auto want = oracle::Posterior(m, obs);
      const PosteriorTable post = posterior(m, b);
      bool ok = std::abs(b.realization_probability() - oracle::Probability(m, obs)) <= kTol;
      for (std::size_t x = 0; x < m.num_states(); ++x) {
        for (std::size_t q = 0; q < m.num_modes(); ++q) {
          ok = ok && b.version_space(q).test(x) == static_cast<bool>(alive[x][q]);
          ok = ok && std::abs(post.at(x, q) - want[x][q]) <= kTol;
        }
      }
      for (std::size_t v = 0; v < m.num_actions(); ++v) {
        const double d = oracle::Delta(m, obs, v);
        ok = ok && std::abs(marginal_benefit(m, b, v) - d) <= kTol;
        ok = ok && std::abs(marginal_benefit_direct(m, b, v) - d) <= kTol;
      }
      if (!ok) ++mismatches;
    }
  }
  const double secs = Seconds(start);
  std::ostringstream s;
  s << Suite().size() << " models, " << beliefs << " beliefs, " << mismatches << " mismatches, "
    << Num(secs) << " s (limit 10 s)";
  return {mismatches == 0 && Suite().size() >= 50 && secs < 10.0, s.str()};
}

// 2. Delta >= 0 at every reachable belief to depth 3.
Outcome Monotonicity() {
  SuiteResult total("monotonicity");
  for (const auto& m : Suite()) total.merge(check_monotonicity(m, 3));
  return {total.passed(), std::to_string(total.violations) + " violations in " +
                              std::to_string(total.checked) + " checks"};
}

// 3. Factor chain with k = 2, and zeta_bar = |Q| for uniform per-state priors.
Outcome FactorChain() {
  std::size_t broken = 0;
  std::map<std::string, std::size_t> by_link;
  for (const auto& m : Suite()) {
    FactorOptions opt;
    opt.budget = 2;
    opt.depth = m.num_actions();
    const auto bad = factor_report(m, opt).chain_violations(kTol);
    if (!bad.empty()) ++broken;
    for (const auto& link : bad) ++by_link[link];
  }
  RandomModelOptions uniform;
  uniform.uniform_per_state = true;
  std::size_t uniform_bad = 0;
  const auto uniform_models = generate_models(kSuiteSeed + 1, 30, uniform);
  for (const auto& m : uniform_models) {
    if (std::abs(compute_zeta_bar(m, 2).value - static_cast<double>(m.num_modes())) > kTol) {
      ++uniform_bad;
    }
  }
  std::ostringstream s;
  s << broken << " of " << Suite().size() << " models break the chain";
  for (const auto& [link, n] : by_link) s << " [" << link << ": " << n << "]";
  s << "; zeta_bar != |Q| on " << uniform_bad << " of " << uniform_models.size()
    << " uniform-prior models";
  return {broken == 0 && uniform_bad == 0, s.str()};
}

// 4. Guarantee bound against the exact optimum for k <= 3.
Outcome GuaranteeBound() {
  const auto start = std::chrono::steady_clock::now();
  SuiteResult alg("bound-zeta-alg"), star("bound-zeta-star");
  std::size_t feasible = 0;
  for (const auto& m : Suite()) {
    const std::size_t k = std::min<std::size_t>(3, m.num_actions());
    FactorOptions opt;
    opt.budget = k;
    opt.depth = m.num_actions();
    const BoundResult r = check_guarantee(m, k, factor_report(m, opt));
    if (r.feasible) ++feasible;
    alg.merge(r.with_zeta_alg);
    star.merge(r.with_zeta_star);
  }
  const double secs = Seconds(start);
  std::ostringstream s;
  s << feasible << " feasible models; zeta_alg: " << alg.violations << " of " << alg.checked
    << " (ell, model) checks violated; zeta_star_emp at ell=k: " << star.violations << " of "
    << star.checked << "; " << Num(secs) << " s (limit 60 s)";
  return {alg.passed() && star.passed() && secs < 60.0, s.str()};
}

// 5. Single mode: adaptive submodular and the 1 - 1/e guarantee.
Outcome HealthyCase() {
  RandomModelOptions opt;
  opt.single_mode = true;
  const auto models = generate_models(kSuiteSeed + 2, kSuiteSize, opt);
  double worst_zeta = 1.0;
  std::size_t below = 0, checked = 0;
  const double fraction = 1.0 - std::exp(-1.0);
  for (const auto& m : models) {
    worst_zeta = std::max(worst_zeta, empirical_zeta_star(m, m.num_actions()).value);
    const std::size_t k = std::min<std::size_t>(3, m.num_actions());
    const double opt_value = exact_optimal_value(m, k);
    if (opt_value <= kDeltaFloor) continue;
    ++checked;
    if (!(f_avg(m, GreedyPartition{}, k) > fraction * opt_value)) ++below;
  }
  std::ostringstream s;
  s << "max zeta_star_emp " << Num(worst_zeta) << " over " << models.size() << " models; greedy "
    << "below (1-1/e) of optimal on " << below << " of " << checked;
  return {worst_zeta <= 1.0 + kTol && below == 0, s.str()};
}

// 6. Direct and partition greedy agree on every reachable belief.
Outcome FormEquivalence() {
  SuiteResult total("form-equivalence");
  for (const auto& m : Suite()) total.merge(check_form_equivalence(m, m.num_actions()));
  return {total.passed(), std::to_string(total.violations) + " disagreements in " +
                              std::to_string(total.checked) + " beliefs"};
}

// 7. Closed-form recombination, b monotonicity, zeta_y >= 1.
Outcome DecompositionOracles() {
  DecompositionResult total;
  for (const auto& m : Suite()) {
    DecompositionResult r = check_decomposition(m, m.num_actions());
    total.recombination.merge(r.recombination);
    total.alive_mass_form.merge(r.alive_mass_form);
    total.zeta_lower.merge(r.zeta_lower);
  }
  std::mt19937_64 rng(kSuiteSeed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t b_bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    std::vector<double> s(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = u(rng);
      t[i] = s[i] + u(rng);
    }
    if (b_function(t) < b_function(s) - kTol) ++b_bad;
  }
  std::ostringstream s;
  s << "closed-form recombination != Delta at " << total.recombination.violations << " of "
    << total.recombination.checked << " (belief, action) pairs; alive-mass form off at "
    << total.alive_mass_form.violations << "; b not monotone on " << b_bad
    << " of 1000 pairs; zeta_y < 1 at " << total.zeta_lower.violations << " of "
    << total.zeta_lower.checked;
  return {total.recombination.passed() && b_bad == 0 && total.zeta_lower.passed(), s.str()};
}

// 8. The three preimage examples for a three-sensor vector with s2 faulty.
Outcome FaultExamples() {
  const OutcomeVector y{1, 0, 1};
  const FaultKind h = FaultKind::Healthy();
  const auto flip = preimage(SensorMode{{h, FaultKind::Flip(), h}}, y);
  const auto stuck = preimage(SensorMode{{h, FaultKind::StuckAt(0), h}}, y);
  const auto empty = preimage(SensorMode{{h, FaultKind::StuckAt(0), h}}, OutcomeVector{1, 1, 1});
  const bool a = flip == std::vector<OutcomeVector>{{1, 1, 1}};
  const bool b = stuck == std::vector<OutcomeVector>{{1, 0, 1}, {1, 1, 1}};
  const bool c = empty.empty();
  std::ostringstream s;
  s << "flip -> {111}: " << (a ? "ok" : "wrong") << "; stuck at the observed 0 -> {101, 111}: "
    << (b ? "ok" : "wrong") << "; stuck at 0 with reading 1 -> {}: " << (c ? "ok" : "wrong");
  return {a && b && c, s.str()};
}

// 9. Greedy (k = 6) against brute force on the shipped circuit.
Outcome CircuitParity() {
  const auto start = std::chrono::steady_clock::now();
  const CircuitModel circuit = load_circuit(kData + "/small_circuit.json");
  const DiagnosisModel m = compile_circuit(circuit, parse_json_file(kData + "/small_circuit_faults.json"));
  ExperimentConfig config;
  config.budget = 6;
  config.policies = {GreedyPartition{}, BruteForceAll{}};
  config.jobs = std::max(1u, std::thread::hardware_concurrency());
  const ExperimentResult r = run_experiment(m, config);
  write_experiment_outputs(m, r, "acceptance_parity");
  const double rate = r.summary.parity_rate();
  const double secs = Seconds(start);
  std::ostringstream s;
  s << "|V|=" << m.num_actions() << " |X|=" << m.num_states() << " |Q|=" << m.num_modes()
    << "; parity on " << Num(rate * 100.0) << "% of " << r.summary.parity.size()
    << " pairs (target 95%); table in acceptance_parity/parity.csv; " << Num(secs)
    << " s (limit 300 s)";
  return {m.num_actions() == 16 && m.num_states() == 64 && m.num_modes() == 27 &&
              r.summary.parity.size() == 1728 && rate >= 0.95 && secs < 300.0,
          s.str()};
}

// 10. Greedy latency grows linearly in |Q|.
Outcome TimingScaling() {
  const CircuitModel circuit = load_circuit(kData + "/small_circuit.json");
  TimingConfig cfg;
  cfg.budget = 6;
  cfg.sample_pairs = 64;
  cfg.repeats = 3;
  const TimingScan scan =
      timing_scan(circuit, parse_json_file(kData + "/small_circuit_faults.json"), {0, 1, 2, 3}, cfg);
  write_timing_csv(scan, "acceptance_timing/timing.csv");
  std::ostringstream s;
  for (const auto& p : scan.points) s << "|Q|=" << p.modes << ": " << Num(p.mean_latency) << " s; ";
  s << "R^2 " << Num(scan.fit->r2) << " (need >= 0.95)";
  return {scan.fit && scan.fit->r2 >= 0.95, s.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", OracleEquivalence},
      {"adaptive monotonicity", Monotonicity},
      {"factor chain", FactorChain},
      {"guarantee bound", GuaranteeBound},
      {"healthy special case", HealthyCase},
      {"greedy form equivalence", FormEquivalence},
      {"decomposition oracles", DecompositionOracles},
      {"fault preimage examples", FaultExamples},
      {"circuit parity", CircuitParity},
      {"timing scaling", TimingScaling},
  };
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::cerr << "usage: acceptance [criterion 1-" << criteria.size() << "]...\n";
      return 64;
    }
    selected.insert(static_cast<std::size_t>(n));
  }
  if (selected.empty()) {
    for (std::size_t i = 1; i <= criteria.size(); ++i) selected.insert(i);
  }
  bool all = true;
  for (std::size_t n : selected) {
    Outcome o;
    try {
      o = criteria[n - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << " (" << criteria[n - 1].first
              << "): " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
