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

// JSON model files:
//
//   {
//     "states":   ["a", "b"],
//     "modes":    ["ok"],
//     "actions":  ["v"],
//     "outcomes": ["0", "1"],
//     "prior":    [["a", "ok", 0.5], ["b", "ok", 0.5]],
//     "outcome_table": [["v", "a", "ok", "0"], ["v", "b", "ok", "1"]]
//   }
//
// Prior triples that are omitted are zero. The outcome table must list every
// (action, state, mode) triple exactly once.

#ifndef ACTIVEDIAG_MODEL_IO_HPP_
#define ACTIVEDIAG_MODEL_IO_HPP_

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "activediag/error.hpp"
#include "activediag/model.hpp"
#include "json.hpp"

namespace activediag {

namespace detail {

inline std::vector<std::string> ReadIdList(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) throw ValidationError(std::string("missing key '") + key + "'");
  const auto& arr = doc.at(key);
  if (!arr.is_array()) throw ValidationError(std::string("'") + key + "' must be a list");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) {
      throw ValidationError(std::string(key) + "[" + std::to_string(i) + "] must be a string");
    }
    out.push_back(arr[i].get<std::string>());
  }
  return out;
}

inline std::string EntryName(const char* key, std::size_t i) {
  return std::string(key) + "[" + std::to_string(i) + "]";
}

inline std::size_t Lookup(const IdentifierList& ids, const nlohmann::json& value,
                          const std::string& where) {
  if (!value.is_string()) throw ValidationError(where + ": identifier must be a string");
  try {
    return ids.index(value.get<std::string>());
  } catch (const IdentifierError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

}  // namespace detail

inline nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline DiagnosisModel model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("model document must be a JSON object");
  const IdentifierList states("state", detail::ReadIdList(doc, "states"));
  const IdentifierList modes("mode", detail::ReadIdList(doc, "modes"));
  const IdentifierList actions("action", detail::ReadIdList(doc, "actions"));
  const IdentifierList outcomes("outcome", detail::ReadIdList(doc, "outcomes"));
  const std::size_t nx = states.size(), nq = modes.size(), nv = actions.size();

  std::vector<double> prior(nx * nq, 0.0);
  std::vector<bool> prior_seen(nx * nq, false);
  if (!doc.contains("prior") || !doc.at("prior").is_array()) {
    throw ValidationError("missing list 'prior'");
  }
  const auto& prior_doc = doc.at("prior");
  for (std::size_t i = 0; i < prior_doc.size(); ++i) {
    const std::string where = detail::EntryName("prior", i);
    const auto& e = prior_doc[i];
    if (!e.is_array() || e.size() != 3 || !e[2].is_number()) {
      throw ValidationError(where + ": expected [state, mode, probability]");
    }
    const std::size_t x = detail::Lookup(states, e[0], where);
    const std::size_t q = detail::Lookup(modes, e[1], where);
    if (prior_seen[x * nq + q]) throw ValidationError(where + ": duplicate prior entry");
    prior_seen[x * nq + q] = true;
    prior[x * nq + q] = e[2].get<double>();
  }

  constexpr OutcomeCode kUnset = ~OutcomeCode{0};
  std::vector<OutcomeCode> table(nv * nq * nx, kUnset);
  if (!doc.contains("outcome_table") || !doc.at("outcome_table").is_array()) {
    throw ValidationError("missing list 'outcome_table'");
  }
  const auto& table_doc = doc.at("outcome_table");
  for (std::size_t i = 0; i < table_doc.size(); ++i) {
    const std::string where = detail::EntryName("outcome_table", i);
    const auto& e = table_doc[i];
    if (!e.is_array() || e.size() != 4) {
      throw ValidationError(where + ": expected [action, state, mode, outcome]");
    }
    const std::size_t v = detail::Lookup(actions, e[0], where);
    const std::size_t x = detail::Lookup(states, e[1], where);
    const std::size_t q = detail::Lookup(modes, e[2], where);
    const std::size_t y = detail::Lookup(outcomes, e[3], where);
    OutcomeCode& slot = table[(v * nq + q) * nx + x];
    if (slot != kUnset) throw ValidationError(where + ": duplicate outcome entry");
    slot = static_cast<OutcomeCode>(y);
  }
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t q = 0; q < nq; ++q) {
      for (std::size_t x = 0; x < nx; ++x) {
        if (table[(v * nq + q) * nx + x] == kUnset) {
          throw ValidationError("outcome_table is not total: missing (" + actions[v] + ", " +
                                states[x] + ", " + modes[q] + ")");
        }
      }
    }
  }
  return DiagnosisModel(states.names(), modes.names(), actions.names(), outcomes.names(),
                        std::move(prior), std::move(table));
}

inline DiagnosisModel load_model(const std::string& path) {
  const nlohmann::json doc = parse_json_file(path);
  try {
    return model_from_json(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline nlohmann::json model_to_json(const DiagnosisModel& model) {
  nlohmann::json doc;
  doc["states"] = model.states().names();
  doc["modes"] = model.modes().names();
  doc["actions"] = model.actions().names();
  doc["outcomes"] = model.outcomes().names();
  nlohmann::json prior = nlohmann::json::array();
  for (std::size_t x = 0; x < model.num_states(); ++x) {
    for (std::size_t q = 0; q < model.num_modes(); ++q) {
      if (model.prior(x, q) > 0.0) {
        prior.push_back({model.states()[x], model.modes()[q], model.prior(x, q)});
      }
    }
  }
  doc["prior"] = std::move(prior);
  nlohmann::json table = nlohmann::json::array();
  for (std::size_t v = 0; v < model.num_actions(); ++v) {
    for (std::size_t x = 0; x < model.num_states(); ++x) {
      for (std::size_t q = 0; q < model.num_modes(); ++q) {
        table.push_back({model.actions()[v], model.states()[x], model.modes()[q],
                         model.outcomes()[model.outcome(v, x, q)]});
      }
    }
  }
  doc["outcome_table"] = std::move(table);
  return doc;
}

}  // namespace activediag

#endif  // ACTIVEDIAG_MODEL_IO_HPP_
