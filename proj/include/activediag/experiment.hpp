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

// Batch runs over true (state, mode) pairs and the artifacts they produce.
//
// Output files (all numbers in shortest round-trip decimal):
//   runs.csv     state,mode,policy,step,action,outcome,reward_after,select_seconds
//   parity.csv   state,mode,greedy_policy,greedy_reward,brute_force_reward,equal
//   summary.json per-policy latency statistics, f_avg, parity rate
//   latency_histogram_<policy>.csv  bin_low,bin_high,count
//   indistinguishable_cdf_<policy>.csv  size,fraction
//   latency_histogram.gp, indistinguishable_cdf.gp  gnuplot scripts
//   timing.csv   kind,modes,mean_latency_seconds,samples,slope,intercept,r2

#ifndef ACTIVEDIAG_EXPERIMENT_HPP_
#define ACTIVEDIAG_EXPERIMENT_HPP_

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "activediag/circuit.hpp"
#include "activediag/error.hpp"
#include "activediag/model.hpp"
#include "activediag/policy.hpp"
#include "json.hpp"

namespace activediag {

// Shortest decimal that parses back to the same double.
inline std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

using TruePair = std::pair<std::size_t, std::size_t>;

inline std::vector<TruePair> supported_pairs(const DiagnosisModel& model) {
  std::vector<TruePair> out;
  for (std::size_t x = 0; x < model.num_states(); ++x) {
    for (std::size_t q = 0; q < model.num_modes(); ++q) {
      if (model.prior(x, q) > 0.0) out.emplace_back(x, q);
    }
  }
  return out;
}

struct ExperimentConfig {
  std::size_t budget = 6;
  std::vector<Policy> policies;
  std::size_t jobs = 1;
  std::string out_dir;           // empty: nothing written
  std::uint64_t seed = 0;
  std::optional<std::vector<TruePair>> pairs;  // all supported pairs when unset
  std::size_t timing_repeats = 1;

  void validate(const DiagnosisModel& model) const {
    if (budget == 0) throw ValidationError("budget must be at least 1");
    if (policies.empty()) throw ValidationError("at least one policy is required");
    if (jobs == 0) throw ValidationError("jobs must be at least 1");
    if (pairs) {
      for (const auto& [x, q] : *pairs) {
        model.states().check(x);
        model.modes().check(q);
        if (!(model.prior(x, q) > 0.0)) {
          throw ValidationError("pair (" + model.states()[x] + ", " + model.modes()[q] +
                                ") has zero prior probability");
        }
      }
    }
  }
};

struct HistogramBin {
  double low = 0.0;
  double high = 0.0;
  std::size_t count = 0;
};

struct PolicySummary {
  std::string policy;
  std::size_t runs = 0;
  double mean_latency = 0.0;    // over every selection step
  double median_latency = 0.0;
  double max_latency = 0.0;
  std::vector<HistogramBin> latency_histogram;  // of per-run mean latency
  // cdf[s - 1] = fraction of swept states whose largest final
  // indistinguishable set (over their swept modes) has at most s states.
  std::vector<double> indistinguishable_cdf;
  double f_avg = 0.0;         // sum of prior * final reward over swept pairs
  double swept_mass = 0.0;    // prior mass of the swept pairs
};

struct ParityRow {
  TruePair pair;
  double greedy_reward = 0.0;
  double brute_force_reward = 0.0;
  bool equal = false;
};

struct ExperimentSummary {
  std::size_t budget = 0;
  std::size_t pairs_requested = 0;
  std::size_t pairs_completed = 0;
  bool interrupted = false;
  std::vector<PolicySummary> policies;
  std::string parity_policy;  // empty when no parity table was built
  std::vector<ParityRow> parity;

  double parity_rate() const {
    if (parity.empty()) return 0.0;
    const auto hits = std::count_if(parity.begin(), parity.end(), [](const auto& r) { return r.equal; });
    return static_cast<double>(hits) / static_cast<double>(parity.size());
  }
};

struct ExperimentResult {
  ExperimentSummary summary;
  // records[i][p]: pair i, policy p, in sweep order.
  std::vector<TruePair> pairs;
  std::vector<std::vector<RunRecord>> records;
};

inline constexpr std::size_t kHistogramBins = 20;
inline constexpr double kParityTolerance = 1e-9;

namespace detail {

inline double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  return v[mid];
}

inline std::vector<HistogramBin> Histogram(const std::vector<double>& values, std::size_t bins) {
  std::vector<HistogramBin> out;
  if (values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
  const std::size_t n = hi > lo ? bins : 1;
  for (std::size_t b = 0; b < n; ++b) {
    out.push_back({lo + width * static_cast<double>(b), lo + width * static_cast<double>(b + 1), 0});
  }
  for (double v : values) {
    std::size_t b = hi > lo ? static_cast<std::size_t>((v - lo) / width) : 0;
    ++out[std::min(b, n - 1)].count;
  }
  return out;
}

inline PolicySummary Summarize(const DiagnosisModel& model, const std::vector<TruePair>& pairs,
                               const std::vector<std::vector<RunRecord>>& records, std::size_t p) {
  PolicySummary s;
  std::vector<double> steps, run_means;
  std::vector<std::size_t> worst(model.num_states(), 0);
  std::vector<bool> seen(model.num_states(), false);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const RunRecord& r = records[i][p];
    s.policy = r.policy;
    ++s.runs;
    for (const auto& st : r.trace) steps.push_back(st.select_seconds);
    run_means.push_back(r.mean_select_seconds());
    const auto [x, q] = pairs[i];
    seen[x] = true;
    worst[x] = std::max(worst[x], r.final_indistinguishable.count());
    s.f_avg += model.prior(x, q) * r.final_reward;
    s.swept_mass += model.prior(x, q);
  }
  if (!steps.empty()) {
    s.mean_latency = std::accumulate(steps.begin(), steps.end(), 0.0) / static_cast<double>(steps.size());
    s.median_latency = Median(steps);
    s.max_latency = *std::max_element(steps.begin(), steps.end());
  }
  s.latency_histogram = Histogram(run_means, kHistogramBins);
  const std::size_t states_seen = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
  s.indistinguishable_cdf.assign(model.num_states(), 0.0);
  if (states_seen > 0) {
    std::vector<std::size_t> at_size(model.num_states() + 1, 0);
    for (std::size_t x = 0; x < model.num_states(); ++x) {
      if (seen[x]) ++at_size[worst[x]];
    }
    std::size_t running = at_size[0];
    for (std::size_t size = 1; size <= model.num_states(); ++size) {
      running += at_size[size];
      s.indistinguishable_cdf[size - 1] =
          static_cast<double>(running) / static_cast<double>(states_seen);
    }
  }
  return s;
}

}  // namespace detail

// Runs every policy against every selected pair on `config.jobs` workers.
// Results keep sweep order regardless of scheduling. When `stop` becomes
// true, workers finish their current pair and only completed pairs are
// summarized.
inline ExperimentResult run_experiment(const DiagnosisModel& model, const ExperimentConfig& config,
                                       const std::atomic<bool>* stop = nullptr) {
  config.validate(model);
  const std::vector<TruePair> pairs = config.pairs ? *config.pairs : supported_pairs(model);
  std::vector<std::vector<RunRecord>> slots(pairs.size());
  std::vector<char> done(pairs.size(), 0);
  std::atomic<std::size_t> next{0};
  RunOptions options;
  options.timing_repeats = config.timing_repeats;

  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    try {
      for (;;) {
        if (stop != nullptr && stop->load()) return;
        const std::size_t i = next.fetch_add(1);
        if (i >= pairs.size()) return;
        std::vector<RunRecord> runs;
        for (const Policy& policy : config.policies) {
          runs.push_back(run_policy(model, policy, pairs[i].first, pairs[i].second, config.budget, options));
        }
        slots[i] = std::move(runs);
        done[i] = 1;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(pairs.size());
    }
  };
  const std::size_t workers = std::min(config.jobs, std::max<std::size_t>(pairs.size(), 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  ExperimentResult result;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!done[i]) continue;
    result.pairs.push_back(pairs[i]);
    result.records.push_back(std::move(slots[i]));
  }
  ExperimentSummary& s = result.summary;
  s.budget = config.budget;
  s.pairs_requested = pairs.size();
  s.pairs_completed = result.pairs.size();
  s.interrupted = s.pairs_completed < s.pairs_requested;
  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    s.policies.push_back(detail::Summarize(model, result.pairs, result.records, p));
  }

  std::optional<std::size_t> greedy, brute;
  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    const Policy& policy = config.policies[p];
    if (!greedy && (std::holds_alternative<GreedyPartition>(policy) ||
                    std::holds_alternative<GreedyDirect>(policy))) {
      greedy = p;
    }
    if (!brute && std::holds_alternative<BruteForceAll>(policy)) brute = p;
  }
  if (greedy && brute) {
    s.parity_policy = policy_name(config.policies[*greedy]);
    for (std::size_t i = 0; i < result.pairs.size(); ++i) {
      ParityRow row;
      row.pair = result.pairs[i];
      row.greedy_reward = result.records[i][*greedy].final_reward;
      row.brute_force_reward = result.records[i][*brute].final_reward;
      row.equal = std::abs(row.greedy_reward - row.brute_force_reward) <= kParityTolerance;
      s.parity.push_back(row);
    }
  }
  return result;
}

inline nlohmann::json summary_to_json(const ExperimentSummary& s) {
  nlohmann::json j;
  j["budget"] = s.budget;
  j["pairs_requested"] = s.pairs_requested;
  j["pairs_completed"] = s.pairs_completed;
  j["interrupted"] = s.interrupted;
  nlohmann::json policies = nlohmann::json::array();
  for (const auto& p : s.policies) {
    policies.push_back({{"policy", p.policy},
                        {"runs", p.runs},
                        {"mean_latency_seconds", p.mean_latency},
                        {"median_latency_seconds", p.median_latency},
                        {"max_latency_seconds", p.max_latency},
                        {"f_avg", p.f_avg},
                        {"swept_prior_mass", p.swept_mass},
                        {"indistinguishable_cdf", p.indistinguishable_cdf}});
  }
  j["policies"] = std::move(policies);
  if (!s.parity_policy.empty()) {
    const auto hits = std::count_if(s.parity.begin(), s.parity.end(), [](const auto& r) { return r.equal; });
    j["parity"] = {{"greedy_policy", s.parity_policy},
                   {"pairs", s.parity.size()},
                   {"equal", hits},
                   {"rate", s.parity_rate()}};
  }
  return j;
}

namespace detail {

inline std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  return out;
}

inline void WriteGnuplot(const std::filesystem::path& dir, const ExperimentSummary& s) {
  {
    auto out = OpenOut(dir / "latency_histogram.gp");
    out << "set datafile separator ','\nset xlabel 'mean selection latency per run [s]'\n"
           "set ylabel 'runs'\nset style fill solid 0.5\nplot";
    for (std::size_t i = 0; i < s.policies.size(); ++i) {
      out << (i ? "," : "") << " 'latency_histogram_" << s.policies[i].policy
          << ".csv' every ::1 using (($1+$2)/2):3:($2-$1) with boxes title '"
          << s.policies[i].policy << "'";
    }
    out << "\n";
  }
  auto out = OpenOut(dir / "indistinguishable_cdf.gp");
  out << "set datafile separator ','\nset xlabel 'largest indistinguishable set'\n"
         "set ylabel 'fraction of states'\nset yrange [0:1.05]\nplot";
  for (std::size_t i = 0; i < s.policies.size(); ++i) {
    out << (i ? "," : "") << " 'indistinguishable_cdf_" << s.policies[i].policy
        << ".csv' every ::1 using 1:2 with steps title '" << s.policies[i].policy << "'";
  }
  out << "\n";
}

}  // namespace detail

inline void write_experiment_outputs(const DiagnosisModel& model, const ExperimentResult& result,
                                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = detail::OpenOut(dir / "runs.csv");
    out << "state,mode,policy,step,action,outcome,reward_after,select_seconds\n";
    for (std::size_t i = 0; i < result.pairs.size(); ++i) {
      const auto [x, q] = result.pairs[i];
      for (const RunRecord& r : result.records[i]) {
        for (std::size_t t = 0; t < r.trace.size(); ++t) {
          const StepRecord& st = r.trace[t];
          out << model.states()[x] << ',' << model.modes()[q] << ',' << r.policy << ',' << t + 1
              << ',' << model.actions()[st.action] << ',' << model.outcomes()[st.outcome] << ','
              << format_number(st.reward_after) << ',' << format_number(st.select_seconds) << '\n';
        }
      }
    }
  }
  const ExperimentSummary& s = result.summary;
  if (!s.parity_policy.empty()) {
    auto out = detail::OpenOut(dir / "parity.csv");
    out << "state,mode,greedy_policy,greedy_reward,brute_force_reward,equal\n";
    for (const auto& row : s.parity) {
      out << model.states()[row.pair.first] << ',' << model.modes()[row.pair.second] << ','
          << s.parity_policy << ',' << format_number(row.greedy_reward) << ','
          << format_number(row.brute_force_reward) << ',' << (row.equal ? 1 : 0) << '\n';
    }
  }
  for (const auto& p : s.policies) {
    auto hist = detail::OpenOut(dir / ("latency_histogram_" + p.policy + ".csv"));
    hist << "bin_low,bin_high,count\n";
    for (const auto& b : p.latency_histogram) {
      hist << format_number(b.low) << ',' << format_number(b.high) << ',' << b.count << '\n';
    }
    auto cdf = detail::OpenOut(dir / ("indistinguishable_cdf_" + p.policy + ".csv"));
    cdf << "size,fraction\n";
    for (std::size_t i = 0; i < p.indistinguishable_cdf.size(); ++i) {
      cdf << i + 1 << ',' << format_number(p.indistinguishable_cdf[i]) << '\n';
    }
  }
  detail::WriteGnuplot(dir, s);
  auto out = detail::OpenOut(dir / "summary.json");
  out << summary_to_json(s).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Latency against the number of modes.

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LinearFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw DomainError("need at least two points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

struct TimingPoint {
  std::size_t modes = 0;
  double mean_latency = 0.0;
  std::size_t samples = 0;  // timed selections
};

struct TimingScan {
  std::vector<TimingPoint> points;
  std::optional<LinearFit> fit;  // omitted for a single point
};

struct TimingConfig {
  std::size_t budget = 6;
  std::size_t sample_pairs = 64;
  std::size_t repeats = 3;
  std::uint64_t seed = 0;
};

// Keeps the first n entries of the fault section's sensor list.
inline nlohmann::json restrict_faults(const nlohmann::json& faults, std::size_t n) {
  nlohmann::json out = faults;
  if (faults.is_null()) return out;
  if (!faults.contains("sensors") || !faults.at("sensors").is_array()) {
    throw ValidationError("fault specification needs a 'sensors' list");
  }
  const auto& sensors = faults.at("sensors");
  if (n > sensors.size()) {
    throw ValidationError("fault specification lists only " + std::to_string(sensors.size()) +
                          " sensors, " + std::to_string(n) + " requested");
  }
  out["sensors"] = nlohmann::json(std::vector<nlohmann::json>(sensors.begin(), sensors.begin() + n));
  return out;
}

// Mean greedy selection latency (selection only, single thread, median of
// `repeats` per step) for models with the first n fault-prone sensors
// enabled, for each n in `fault_sensor_counts`.
inline TimingScan timing_scan(const CircuitModel& circuit, const nlohmann::json& faults,
                              const std::vector<std::size_t>& fault_sensor_counts,
                              const TimingConfig& config = {}) {
  if (fault_sensor_counts.empty()) throw ValidationError("no mode counts requested");
  TimingScan scan;
  RunOptions options;
  options.timing_repeats = config.repeats;
  for (std::size_t n : fault_sensor_counts) {
    const DiagnosisModel model =
        n == 0 ? compile_circuit(circuit) : compile_circuit(circuit, restrict_faults(faults, n));
    std::vector<TruePair> pairs = supported_pairs(model);
    std::mt19937_64 rng(config.seed);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    if (pairs.size() > config.sample_pairs) pairs.resize(config.sample_pairs);
    TimingPoint point;
    point.modes = model.num_modes();
    double total = 0.0;
    for (const auto& [x, q] : pairs) {
      const RunRecord r = run_policy(model, GreedyPartition{}, x, q, config.budget, options);
      for (const auto& st : r.trace) {
        total += st.select_seconds;
        ++point.samples;
      }
    }
    point.mean_latency = point.samples ? total / static_cast<double>(point.samples) : 0.0;
    scan.points.push_back(point);
  }
  if (scan.points.size() >= 2) {
    std::vector<double> xs, ys;
    for (const auto& p : scan.points) {
      xs.push_back(static_cast<double>(p.modes));
      ys.push_back(p.mean_latency);
    }
    scan.fit = least_squares(xs, ys);
  }
  return scan;
}

inline void write_timing_csv(const TimingScan& scan, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto out = detail::OpenOut(path);
  out << "kind,modes,mean_latency_seconds,samples,slope,intercept,r2\n";
  for (const auto& p : scan.points) {
    out << "point," << p.modes << ',' << format_number(p.mean_latency) << ',' << p.samples << ",,,\n";
  }
  if (scan.fit) {
    out << "fit,,,," << format_number(scan.fit->slope) << ',' << format_number(scan.fit->intercept)
        << ',' << format_number(scan.fit->r2) << '\n';
  }
}

}  // namespace activediag

#endif  // ACTIVEDIAG_EXPERIMENT_HPP_
