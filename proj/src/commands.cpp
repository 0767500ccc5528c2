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


#include "hlearn/commands.hpp"

#include <ostream>

#include "hlearn/io.hpp"

namespace hlearn::cli {
namespace {

using nlohmann::json;

int run_dynamics(const RunConfig& cfg) {
  validate_config(cfg, false);
  const StateVector init = cfg.initial.value_or(default_state(cfg.params));
  const auto traj = iterate(init, cfg.params, cfg.T, cfg.rule.value_or(StepRule::General));
  write_output(cfg.out, trajectory_csv(traj));
  return kExitOk;
}

json full_homophily_json(const GroupParams& g, double p) {
  json arr = json::array();
  for (const auto& s : full_homophily_steady_states(g, p))
    arr.push_back({{"g0", s.g0}, {"g1", s.g1}, {"stability", to_string(s.stability)}});
  return arr;
}

int run_steady(const RunConfig& cfg) {
  validate_config(cfg, false);
  const auto reports = find_steady_states(cfg.params, cfg.solver);
  const auto& chosen = select_stable(reports);
  json j;
  j["params"] = params_json(cfg.params);
  j["regime"] = to_string(classify_regime(cfg.params).tag);
  j["steady_states"] = json::array();
  bool all_converged = true;
  for (const auto& r : reports) {
    j["steady_states"].push_back(report_json(r));
    all_converged = all_converged && r.converged;
  }
  j["selected"] = static_cast<int>(&chosen - reports.data());
  const auto sens = homophily_sensitivity(chosen, cfg.params, cfg.solver);
  j["hg_sensitivity"] = {{"sign", to_string(sens.sign)},   {"ift", sens.ift},
                         {"finite_difference", sens.finite_difference}, {"fd_sign", to_string(sens.fd_sign)},
                         {"agree", sens.agree},            {"flagged", sens.flagged}};
  json fh = json::object();
  if (cfg.params.green.homophily == 1.0) fh["green"] = full_homophily_json(cfg.params.green, cfg.params.p);
  if (cfg.params.blue.homophily == 1.0) fh["blue"] = full_homophily_json(cfg.params.blue, cfg.params.p);
  if (!fh.empty()) j["full_homophily"] = fh;
  write_output(cfg.out, dump(j));
  return all_converged ? kExitOk : kExitNotConverged;
}

int run_sweep(const RunConfig& cfg, std::ostream& err) {
  validate_config(cfg, false);
  const auto table = sweep(cfg.sweep, cfg.params, cfg.solver);
  write_output(cfg.out, sweep_csv(table));
  int failed = 0;
  for (const auto& row : table.rows) {
    if (row.ok) continue;
    ++failed;
    err << "sweep: h_g=" << format_double(row.hg) << " d_g=" << row.dg << ": "
        << (row.error.empty() ? "not converged" : row.error) << '\n';
  }
  return failed ? kExitNotConverged : kExitOk;
}

int run_incidental(const RunConfig& cfg) {
  validate_config(cfg, true);
  write_output(cfg.out, incidental_csv(resolved_multicost(cfg)));
  return kExitOk;
}

int run_multicost_verify(const RunConfig& cfg) {
  validate_config(cfg, true);
  const auto model = resolved_multicost(cfg);
  multicost::ProbeOptions opts;
  opts.eps = cfg.probes.eps;
  opts.directions = cfg.probes.directions;
  opts.iterations = cfg.probes.iterations;
  opts.seed = cfg.seed;
  const auto verdict = multicost::verify_complete_learning(model, opts);
  write_output(cfg.out, dump(verdict_json(verdict, model)));
  return kExitOk;
}

int run_abm(const RunConfig& cfg, std::ostream& err) {
  validate_config(cfg, false);
  abm::SimConfig sim;
  sim.params = cfg.params;
  sim.population = cfg.population;
  sim.generations = cfg.generations;
  sim.seed = cfg.seed;
  sim.v = cfg.v;
  sim.initial = cfg.initial;
  const auto result = abm::run_abm(sim);
  write_output(cfg.out, abm_csv(result));
  const std::string summary = dump(abm_summary_json(result));
  if (cfg.out == "-") err << summary;
  else write_output(cfg.out + ".summary.json", summary);
  return kExitOk;
}

}  // namespace

int dispatch(const std::string& command, const RunConfig& config, std::ostream& err) {
  try {
    if (command == "dynamics") return run_dynamics(config);
    if (command == "steady") return run_steady(config);
    if (command == "sweep") return run_sweep(config, err);
    if (command == "incidental") return run_incidental(config);
    if (command == "multicost-verify") return run_multicost_verify(config);
    if (command == "abm") return run_abm(config, err);
    err << "unknown command '" << command << "'\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    // precondition failures such as a step rule outside its regime
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace hlearn::cli
