// Copyright 2026 The hlearn Authors
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


#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "hlearn/abm.hpp"
#include "hlearn/dynamics.hpp"
#include "hlearn/equilibrium.hpp"
#include "hlearn/model.hpp"
#include "hlearn/multicost.hpp"

namespace hlearn::cli {

/// Bad configuration; `field()` is the dotted key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct ProbeConfig {
  double eps = 1e-2;
  int directions = 20;
  int iterations = 1000;
};

struct RunConfig {
  ModelParams params{0.5, {0.8, 0.6, 2, 0.5}, {0.2, 0.3, 2, 1.0}};
  std::optional<StepRule> rule;  // dynamics step rule; general when unset
  std::optional<StateVector> initial;
  SolverOptions solver;
  int T = 10'000;
  SweepGrid sweep{{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}, {1, 2, 4, 8}};
  int population = 1000;
  int generations = 30;
  abm::VRealization v = abm::VRealization::One;
  std::uint64_t seed = 1;
  std::string out = "-";
  multicost::CostValueModel multicost;
  bool colorblind = true;  // friend_dist derived from the cost distributions
  ProbeConfig probes;

  RunConfig();
};

/// Parses a JSON document. Unknown keys and invalid values raise ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

/// Checks model, solver and run invariants; the multicost block is checked
/// only when `with_multicost` is set.
void validate_config(const RunConfig& config, bool with_multicost);

/// Multicost model with friend_dist filled in when `colorblind` is set.
multicost::CostValueModel resolved_multicost(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);

}  // namespace hlearn::cli
