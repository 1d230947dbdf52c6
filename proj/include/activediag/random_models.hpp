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

// Small random diagnosis models for property checks.
//
// Two families: free tables (arbitrary mu(v, x, q) over binary sensor
// vectors) and fault-compiled tables (a random healthy table corrupted by
// flip / stuck-at faults on binary sensors). All draws come from one
// mt19937_64 so a seed reproduces the whole suite.

#ifndef ACTIVEDIAG_RANDOM_MODELS_HPP_
#define ACTIVEDIAG_RANDOM_MODELS_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "activediag/fault.hpp"
#include "activediag/model.hpp"

namespace activediag {

struct RandomModelOptions {
  std::size_t max_states = 6;
  std::size_t max_modes = 3;
  std::size_t max_actions = 4;
  std::size_t max_sensors = 2;  // outcomes are binary vectors of this length
  bool single_mode = false;     // |Q| = 1
  bool uniform_per_state = false;  // P[x, q] = P[x] / |Q|
  double zero_prior_rate = 0.1;    // chance a (x, q) entry is unsupported
};

namespace detail {

inline std::size_t Draw(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline std::vector<std::string> Names(const char* prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline std::vector<double> RandomSimplex(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) total += (x = u(rng));
  for (double& x : w) x /= total;
  return w;
}

}  // namespace detail

// Free-table family.
inline DiagnosisModel random_table_model(std::mt19937_64& rng,
                                         const RandomModelOptions& opt = {}) {
  const std::size_t nx = detail::Draw(rng, 2, opt.max_states);
  const std::size_t nq = opt.single_mode ? 1 : detail::Draw(rng, 1, opt.max_modes);
  const std::size_t nv = detail::Draw(rng, 1, opt.max_actions);
  const std::size_t sensors = detail::Draw(rng, 1, opt.max_sensors);
  const std::size_t ny = std::size_t{1} << sensors;

  std::vector<double> prior(nx * nq, 0.0);
  if (opt.uniform_per_state) {
    const std::vector<double> px = detail::RandomSimplex(rng, nx);
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t q = 0; q < nq; ++q) prior[x * nq + q] = px[x] / static_cast<double>(nq);
    }
  } else {
    std::bernoulli_distribution drop(opt.zero_prior_rate);
    std::vector<double> w = detail::RandomSimplex(rng, nx * nq);
    for (std::size_t i = 1; i < w.size(); ++i) {
      if (drop(rng)) w[i] = 0.0;  // entry 0 always stays supported
    }
    double total = 0.0;
    for (double p : w) total += p;
    for (std::size_t i = 0; i < w.size(); ++i) prior[i] = w[i] / total;
  }

  std::vector<OutcomeCode> table(nv * nq * nx);
  for (auto& y : table) y = static_cast<OutcomeCode>(detail::Draw(rng, 0, ny - 1));

  std::vector<std::string> outcomes;
  for (std::size_t c = 0; c < ny; ++c) {
    outcomes.push_back(outcome_label(decode_outcome(static_cast<OutcomeCode>(c), sensors, 2)));
  }
  return DiagnosisModel(detail::Names("x", nx), detail::Names("q", nq), detail::Names("v", nv),
                        std::move(outcomes), std::move(prior), std::move(table));
}

// Fault-compiled family: at most one fault-prone sensor so |Q| <= 3.
inline DiagnosisModel random_fault_model(std::mt19937_64& rng,
                                         const RandomModelOptions& opt = {}) {
  HealthyTable healthy;
  const std::size_t nx = detail::Draw(rng, 2, opt.max_states);
  const std::size_t nv = detail::Draw(rng, 1, opt.max_actions);
  const std::size_t m = detail::Draw(rng, 1, opt.max_sensors);
  healthy.states = detail::Names("x", nx);
  healthy.actions = detail::Names("v", nv);
  healthy.sensors = detail::Names("s", m);
  healthy.alphabet = 2;
  healthy.codes.resize(nv * nx);
  for (auto& c : healthy.codes) c = static_cast<OutcomeCode>(detail::Draw(rng, 0, (1u << m) - 1));
  healthy.state_prior = detail::RandomSimplex(rng, nx);

  FaultSpec spec = FaultSpec::AllHealthy(healthy.sensors);
  if (!opt.single_mode && opt.max_modes >= 2) {
    SensorFaultSpec& s = spec.sensors[detail::Draw(rng, 0, m - 1)];
    const bool both = opt.max_modes >= 3 && detail::Draw(rng, 0, 1) == 1;
    std::uniform_real_distribution<double> p(0.05, 0.45);
    if (both || detail::Draw(rng, 0, 1) == 0) {
      s.kinds.push_back(FaultKind::Flip());
      if (opt.uniform_per_state) {
        s.probability.push_back({p(rng)});
      } else {
        std::vector<double> per_state(nx);
        for (double& v : per_state) v = p(rng);
        s.probability.push_back(per_state);
      }
    }
    if (both || s.kinds.empty()) {
      s.kinds.push_back(FaultKind::StuckAt(static_cast<unsigned>(detail::Draw(rng, 0, 1))));
      s.probability.push_back({p(rng)});
    }
  }
  if (opt.uniform_per_state) {
    // Equal mode weights for every state.
    for (auto& s : spec.sensors) {
      const double share = 1.0 / static_cast<double>(s.kinds.size() + 1);
      for (auto& p : s.probability) p = {share};
    }
  }
  return compile_model(healthy, spec);
}

// Deterministic mixed suite: even indices use free tables, odd indices
// fault-compiled tables.
inline std::vector<DiagnosisModel> generate_models(std::uint64_t seed, std::size_t count,
                                                   const RandomModelOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  std::vector<DiagnosisModel> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(i % 2 == 0 ? random_table_model(rng, opt) : random_fault_model(rng, opt));
  }
  return out;
}

}  // namespace activediag

#endif  // ACTIVEDIAG_RANDOM_MODELS_HPP_
