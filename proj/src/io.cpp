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


#include "hlearn/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <unistd.h>

namespace hlearn::cli {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content << std::flush;
    if (!std::cout) throw IoError("failed writing to standard output");
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path + "'");
  }
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << "t,g0,g1,b0,b1\n";
  for (std::size_t t = 0; t < traj.states.size(); ++t) {
    const auto& s = traj.states[t];
    os << t << ',' << format_double(s.g0) << ',' << format_double(s.g1) << ',' << format_double(s.b0) << ','
       << format_double(s.b1) << '\n';
  }
  return os.str();
}

namespace {

int sign_int(Sign s) { return s == Sign::Negative ? -1 : (s == Sign::Positive ? 1 : 0); }

}  // namespace

std::string sweep_csv(const SweepTable& table) {
  std::ostringstream os;
  os << "h_g,d_g,g1_star,b1_star,b0_star,stable,hg_sensitivity_sign,converged\n";
  const double nan = std::nan("");
  for (const auto& row : table.rows) {
    const bool have = row.error.empty() || row.report.iterations > 0;
    const auto& s = row.report.state;
    os << format_double(row.hg) << ',' << row.dg << ',' << format_double(have ? s.g1 : nan) << ','
       << format_double(have ? s.b1 : nan) << ',' << format_double(have ? s.b0 : nan) << ','
       << (have && row.report.stability == Stability::Stable ? 1 : 0) << ','
       << (have ? sign_int(row.report.hg_sensitivity_sign) : 0) << ',' << (row.ok ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string incidental_csv(const multicost::CostValueModel& model) {
  const auto table = multicost::homophily_by_cost(model);
  std::ostringstream os;
  os << "c,r,h_gc,h_bc,lambda_g,lambda_b,cbar_flag\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    os << format_double(r.cost) << ',' << format_double(r.ratio) << ',' << format_double(r.h_green) << ','
       << format_double(r.h_blue) << ',' << format_double(model.lambda_g) << ',' << format_double(model.lambda_b)
       << ',' << (i == table.cbar_index ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string abm_csv(const abm::AbmResult& result) {
  std::ostringstream os;
  os << "t,v,g_high,b_high,g_zero,b_zero,n_g_high,n_b_high,n_g_zero,n_b_zero,se_g_high,se_b_high,mf_g,mf_b,gap\n";
  for (std::size_t k = 0; k < result.generations.size(); ++k) {
    const auto& gen = result.generations[k];
    const auto& mf = result.mean_field.states[static_cast<std::size_t>(gen.t)];
    os << gen.t << ',' << gen.v << ',' << format_double(gen.high[0].fraction) << ','
       << format_double(gen.high[1].fraction) << ',' << format_double(gen.zero[0].fraction) << ','
       << format_double(gen.zero[1].fraction) << ',' << gen.high[0].members << ',' << gen.high[1].members << ','
       << gen.zero[0].members << ',' << gen.zero[1].members << ',' << format_double(gen.high[0].standard_error)
       << ',' << format_double(gen.high[1].standard_error) << ',' << format_double(mf.taking(Group::Green, gen.v))
       << ',' << format_double(mf.taking(Group::Blue, gen.v)) << ',' << format_double(result.gap[k]) << '\n';
  }
  return os.str();
}

json params_json(const ModelParams& P) {
  return {{"p", P.p},           {"cg", P.green.cost},     {"cb", P.blue.cost},
          {"pig", P.green.pi},  {"pib", P.blue.pi},       {"dg", P.green.degree},
          {"db", P.blue.degree}, {"hg", P.green.homophily}, {"hb", P.blue.homophily}};
}

json state_json(const StateVector& s) { return {{"g0", s.g0}, {"g1", s.g1}, {"b0", s.b0}, {"b1", s.b1}}; }

namespace {

json matrix_json(const Eigen::Matrix2d& m) { return {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}; }

}  // namespace

json report_json(const SteadyStateReport& r) {
  json j;
  j["state"] = state_json(r.state);
  j["residual"] = r.residual;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["refined_by_bisection"] = r.refined_by_bisection;
  j["jacobian_v1"] = matrix_json(r.jacobian);
  j["jacobian_v0"] = matrix_json(r.jacobian_v0);
  j["spectral_radius"] = r.spectral_radius;
  j["indicator_margin"] = r.indicator_margin;
  j["regular"] = r.regular;
  j["stability"] = to_string(r.stability);
  j["probes_returned"] = r.probes_returned;
  j["probe_directions"] = kProbeDirections;
  j["hg_sensitivity_sign"] = to_string(r.hg_sensitivity_sign);
  j["regime"] = to_string(r.regime.tag);
  if (r.regime.tag == Regime::Split) j["high_cost_group"] = to_string(r.regime.high_cost_group);
  j["simplified_applicable"] = r.simplified_applicable;
  j["degenerate_pi"] = r.degenerate_pi;
  return j;
}

json verdict_json(const multicost::CompleteLearningVerdict& v, const multicost::CostValueModel& model) {
  json j;
  j["verdict"] = v.summary;
  j["complete_learning_stable_unique"] = v.complete_learning_stable_unique;
  j["perfect_cost_homophily"] = v.perfect_cost_homophily;
  j["fixed_point_residual"] = v.fixed_point_residual;
  j["is_fixed_point"] = v.is_fixed_point;
  j["probes_run"] = v.probes_run;
  j["probes_returned"] = v.probes_returned;
  if (v.witness) {
    const auto& w = *v.witness;
    auto type_json = [&](std::size_t t) {
      return json{{"group", to_string(model.type_group(t))}, {"cost", model.type_cost(t)}};
    };
    j["witness"] = {{"observer", type_json(w.observer)},
                    {"observed", type_json(w.observed)},
                    {"value", w.value},
                    {"posterior_mean", v.witness_posterior_mean},
                    {"breaking_value", v.breaking_value},
                    {"breaking_gap", v.breaking_gap},
                    {"breaks_complete_learning", v.witness_breaks},
                    {"departs", v.departs}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

json abm_summary_json(const abm::AbmResult& r) {
  return {{"v", r.v},
          {"generations", static_cast<int>(r.generations.size()) - 1},
          {"max_gap", r.max_gap},
          {"terminal_gap", r.terminal_gap},
          {"terminal_mean_field", state_json(r.mean_field.states.back())}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace hlearn::cli
