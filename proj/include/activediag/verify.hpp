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

// Invariant suites over reachable beliefs of small models. Each suite counts
// the checks it made and keeps the first few violations as JSON witnesses.

#ifndef ACTIVEDIAG_VERIFY_HPP_
#define ACTIVEDIAG_VERIFY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "activediag/belief.hpp"
#include "activediag/guarantees.hpp"
#include "activediag/model.hpp"
#include "activediag/model_io.hpp"
#include "activediag/policy.hpp"
#include "json.hpp"

namespace activediag {

inline constexpr double kCheckTolerance = 1e-9;

struct SuiteResult {
  SuiteResult() = default;
  explicit SuiteResult(std::string suite) : name(std::move(suite)) {}

  std::string name;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::vector<nlohmann::json> witnesses;
  static constexpr std::size_t kMaxWitnesses = 5;

  bool passed() const { return violations == 0; }

  void fail(nlohmann::json witness) {
    ++violations;
    if (witnesses.size() < kMaxWitnesses) witnesses.push_back(std::move(witness));
  }
  void merge(const SuiteResult& other) {
    checked += other.checked;
    violations += other.violations;
    for (const auto& w : other.witnesses) {
      if (witnesses.size() < kMaxWitnesses) witnesses.push_back(w);
    }
  }
  nlohmann::json to_json() const {
    return {{"suite", name},
            {"checked", checked},
            {"violations", violations},
            {"passed", passed()},
            {"witnesses", witnesses}};
  }
};

inline nlohmann::json realization_to_json(const DiagnosisModel& model,
                                          const std::vector<Observation>& steps) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& o : steps) arr.push_back({model.actions()[o.action], model.outcomes()[o.outcome]});
  return arr;
}

// Calls fn on every positive-probability belief reached with distinct
// actions in at most `depth` steps (the initial belief included).
inline void for_each_reachable_belief(const DiagnosisModel& model, std::size_t depth,
                                      const std::function<void(const BeliefState&)>& fn) {
  const RealizationTree tree(model, depth, kDefaultTreeCap);
  for (const auto& [key, belief] : tree.nodes()) fn(belief);
}

// Delta(v | psi) >= 0 for every action at every reachable belief.
inline SuiteResult check_monotonicity(const DiagnosisModel& model, std::size_t depth = 3) {
  SuiteResult r{"monotonicity"};
  for_each_reachable_belief(model, depth, [&](const BeliefState& belief) {
    for (std::size_t v = 0; v < model.num_actions(); ++v) {
      ++r.checked;
      const double d = marginal_benefit(model, belief, v);
      if (d < -kCheckTolerance) {
        r.fail({{"realization", realization_to_json(model, belief.realization().steps())},
                {"action", model.actions()[v]},
                {"delta", d}});
      }
    }
  });
  return r;
}

// Direct and partition greedy forms pick the same argmax set.
inline SuiteResult check_form_equivalence(const DiagnosisModel& model, std::size_t depth = 3) {
  SuiteResult r{"form-equivalence"};
  for_each_reachable_belief(model, depth, [&](const BeliefState& belief) {
    if (untaken_actions(model, belief).empty()) return;
    ++r.checked;
    const auto direct = evaluate_greedy(model, belief, GreedyForm::kDirect);
    const auto partition = evaluate_greedy(model, belief, GreedyForm::kPartition);
    if (direct.best != partition.best) {
      auto names = [&](const std::vector<std::size_t>& vs) {
        std::vector<std::string> out;
        for (std::size_t v : vs) out.push_back(model.actions()[v]);
        return out;
      };
      r.fail({{"realization", realization_to_json(model, belief.realization().steps())},
              {"direct_best", names(direct.best)},
              {"partition_best", names(partition.best)}});
    }
  });
  return r;
}

// Decomposition identities at every reachable (belief, untaken action): the
// closed-form recombination, the alive-mass form, and zeta_y >= 1.
struct DecompositionResult {
  SuiteResult recombination{"decomposition-recombination"};
  SuiteResult alive_mass_form{"decomposition-alive-mass"};
  SuiteResult zeta_lower{"decomposition-zeta-at-least-one"};
};

inline DecompositionResult check_decomposition(const DiagnosisModel& model,
                                               std::size_t depth = 3) {
  DecompositionResult r;
  for_each_reachable_belief(model, depth, [&](const BeliefState& belief) {
    for (std::size_t v : untaken_actions(model, belief)) {
      const double delta = marginal_benefit(model, belief, v);
      const DeltaDecomposition dec = delta_decomposition(model, belief, v);
      const auto where = [&] {
        return nlohmann::json{
            {"realization", realization_to_json(model, belief.realization().steps())},
            {"action", model.actions()[v]},
            {"delta", delta}};
      };
      ++r.recombination.checked;
      if (std::abs(dec.recombine() - delta) > kCheckTolerance) {
        auto w = where();
        w["recombined"] = dec.recombine();
        w["overlap"] = dec.overlap();
        r.recombination.fail(std::move(w));
      }
      ++r.alive_mass_form.checked;
      if (std::abs(dec.recombine_with_alive_mass() - delta) > kCheckTolerance) {
        auto w = where();
        w["recombined"] = dec.recombine_with_alive_mass();
        r.alive_mass_form.fail(std::move(w));
      }
      for (std::size_t i = 0; i < dec.zeta.size(); ++i) {
        ++r.zeta_lower.checked;
        if (dec.zeta[i] < 1.0 - kCheckTolerance) {
          auto w = where();
          w["outcome"] = model.outcomes()[dec.outcomes[i]];
          w["zeta"] = dec.zeta[i];
          r.zeta_lower.fail(std::move(w));
        }
      }
    }
  });
  return r;
}

// 1 <= zeta_star <= zeta <= zeta_bar <= |Q| / min P.
inline SuiteResult check_factor_chain(const DiagnosisModel& model, const FactorReport& report) {
  SuiteResult r{"factor-chain"};
  ++r.checked;
  const auto bad = report.chain_violations(kCheckTolerance);
  if (!bad.empty()) {
    auto w = factor_report_to_json(model, report);
    w["failed_links"] = bad;
    r.fail(std::move(w));
  }
  return r;
}

struct BoundResult {
  SuiteResult with_zeta_alg{"bound-zeta-alg"};
  SuiteResult with_zeta_star{"bound-zeta-star"};
  bool feasible = false;
  double optimum = 0.0;
};

// f_avg(greedy, ell) > (1 - exp(-ell / (zeta k))) f_avg(optimal, k) for
// ell = 1..k with the sweep factor, and at ell = k with the empirical
// factor. A zero optimum makes the strict inequality vacuous.
inline BoundResult check_guarantee(const DiagnosisModel& model, std::size_t k,
                                   const FactorReport& report,
                                   std::uint64_t cap = kDefaultSearchCap) {
  BoundResult r;
  if (search_tree_bound(model, k) > cap) return r;
  r.feasible = true;
  r.optimum = exact_optimal_value(model, k, cap);
  if (r.optimum <= kDeltaFloor) return r;
  const Policy greedy = GreedyPartition{};
  for (std::size_t ell = 1; ell <= k; ++ell) {
    const double achieved = f_avg(model, greedy, ell);
    auto record = [&](SuiteResult& suite, double zeta, const char* which) {
      ++suite.checked;
      const double bound = guarantee_bound(zeta, k, ell) * r.optimum;
      if (!(achieved > bound)) {
        suite.fail({{"ell", ell},
                    {"k", k},
                    {"zeta", zeta},
                    {"factor", which},
                    {"greedy", achieved},
                    {"optimal", r.optimum},
                    {"bound", bound},
                    {"model", model_to_json(model)}});
      }
    };
    record(r.with_zeta_alg, report.zeta_alg.value, "zeta_alg");
    if (ell == k) record(r.with_zeta_star, report.zeta_star.value, "zeta_star_empirical");
  }
  return r;
}

struct VerifyOptions {
  std::size_t belief_depth = 3;
  std::size_t factor_budget = 2;
  std::size_t bound_budget = 3;
  std::uint64_t search_cap = kDefaultSearchCap;
};

// Every suite over one model.
inline std::vector<SuiteResult> verify_model(const DiagnosisModel& model,
                                             const VerifyOptions& opt = {}) {
  std::vector<SuiteResult> out;
  out.push_back(check_monotonicity(model, opt.belief_depth));
  out.push_back(check_form_equivalence(model, opt.belief_depth));
  DecompositionResult dec = check_decomposition(model, opt.belief_depth);
  out.push_back(std::move(dec.recombination));
  out.push_back(std::move(dec.alive_mass_form));
  out.push_back(std::move(dec.zeta_lower));

  FactorOptions fo;
  fo.budget = opt.factor_budget;
  fo.depth = model.num_actions();
  const FactorReport factors = factor_report(model, fo);
  out.push_back(check_factor_chain(model, factors));

  const std::size_t k = std::min(opt.bound_budget, model.num_actions());
  FactorReport bound_factors = factors;
  if (k != fo.budget) {
    fo.budget = k;
    bound_factors = factor_report(model, fo);
  }
  BoundResult bound = check_guarantee(model, k, bound_factors, opt.search_cap);
  out.push_back(std::move(bound.with_zeta_alg));
  out.push_back(std::move(bound.with_zeta_star));
  return out;
}

// Runs verify_model over a batch and merges results suite by suite.
inline std::vector<SuiteResult> verify_models(const std::vector<DiagnosisModel>& models,
                                              const VerifyOptions& opt = {}) {
  std::vector<SuiteResult> total;
  for (const auto& model : models) {
    std::vector<SuiteResult> one = verify_model(model, opt);
    if (total.empty()) {
      for (auto& s : one) total.emplace_back(s.name);
    }
    for (std::size_t i = 0; i < one.size(); ++i) total[i].merge(one[i]);
  }
  return total;
}

}  // namespace activediag

#endif  // ACTIVEDIAG_VERIFY_HPP_
