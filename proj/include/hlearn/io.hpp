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

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "hlearn/abm.hpp"
#include "hlearn/dynamics.hpp"
#include "hlearn/equilibrium.hpp"
#include "hlearn/multicost.hpp"

namespace hlearn::cli {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double x);

/// Writes `content` to `path` through a temporary file and a rename, or to
/// standard output when `path` is "-".
void write_output(const std::string& path, const std::string& content);

std::string trajectory_csv(const Trajectory& traj);
std::string sweep_csv(const SweepTable& table);
std::string incidental_csv(const multicost::CostValueModel& model);
std::string abm_csv(const abm::AbmResult& result);

nlohmann::json params_json(const ModelParams& params);
nlohmann::json state_json(const StateVector& s);
nlohmann::json report_json(const SteadyStateReport& report);
nlohmann::json verdict_json(const multicost::CompleteLearningVerdict& verdict, const multicost::CostValueModel& model);
nlohmann::json abm_summary_json(const abm::AbmResult& result);

/// Two-space indented dump with a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace hlearn::cli
