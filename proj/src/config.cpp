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


#include "hlearn/config.hpp"

#include <cmath>
#include <limits>
#include <fstream>
#include <sstream>

namespace hlearn::cli {
namespace {

using nlohmann::json;

double get_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  const auto x = j.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(path, "integer out of range");
  return static_cast<int>(x);
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_doubles(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_double(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> get_ints(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_int(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

StepRule parse_rule(const std::string& s, const std::string& path) {
  if (s == "general") return StepRule::General;
  if (s == "simplified") return StepRule::SimplifiedSplit;
  if (s == "full_homophily") return StepRule::FullHomophily;
  throw ConfigError(path, "expected one of general, simplified, full_homophily");
}

abm::VRealization parse_v(const json& j, const std::string& path) {
  if (j.is_string() && j.get<std::string>() == "sample") return abm::VRealization::Sample;
  if (j.is_number_integer()) {
    const auto x = j.get<long long>();
    if (x == 0) return abm::VRealization::Zero;
    if (x == 1) return abm::VRealization::One;
  }
  throw ConfigError(path, "expected 0, 1 or \"sample\"");
}

void parse_multicost(const json& j, RunConfig& cfg) {
  if (!j.is_object()) throw ConfigError("multicost", "expected an object");
  auto& m = cfg.multicost;
  for (const auto& [key, val] : j.items()) {
    const std::string path = "multicost." + key;
    if (key == "values") m.values = get_doubles(val, path);
    else if (key == "prior") m.prior = get_doubles(val, path);
    else if (key == "costs") m.costs = get_doubles(val, path);
    else if (key == "lambda_g") m.lambda_g = get_double(val, path);
    else if (key == "lambda_b") m.lambda_b = get_double(val, path);
    else if (key == "cost_dist_g") m.cost_dist[0] = get_doubles(val, path);
    else if (key == "cost_dist_b") m.cost_dist[1] = get_doubles(val, path);
    else if (key == "degrees_g") m.degrees[0] = get_ints(val, path);
    else if (key == "degrees_b") m.degrees[1] = get_ints(val, path);
    else if (key == "friend_dist") {
      if (val.is_string()) {
        if (val.get<std::string>() != "colorblind") throw ConfigError(path, "expected \"colorblind\" or a matrix");
        cfg.colorblind = true;
      } else {
        if (!val.is_array()) throw ConfigError(path, "expected \"colorblind\" or a matrix");
        m.friend_dist.clear();
        for (std::size_t i = 0; i < val.size(); ++i)
          m.friend_dist.push_back(get_doubles(val[i], path + "[" + std::to_string(i) + "]"));
        cfg.colorblind = false;
      }
    } else {
      throw ConfigError(path, "unknown key '" + key + "'");
    }
  }
}

void parse_probes(const json& j, ProbeConfig& p) {
  if (!j.is_object()) throw ConfigError("probes", "expected an object");
  for (const auto& [key, val] : j.items()) {
    const std::string path = "probes." + key;
    if (key == "eps") p.eps = get_double(val, path);
    else if (key == "directions") p.directions = get_int(val, path);
    else if (key == "iterations") p.iterations = get_int(val, path);
    else throw ConfigError(path, "unknown key '" + key + "'");
  }
}

}  // namespace

RunConfig::RunConfig() {
  multicost.values = {0.0, 1.0};
  multicost.prior = {0.5, 0.5};
  multicost.costs = {0.3, 0.7};
  multicost.lambda_g = 0.5;
  multicost.lambda_b = 0.5;
  multicost.cost_dist = {std::vector<double>{0.2, 0.8}, std::vector<double>{0.8, 0.2}};
  multicost.degrees = {std::vector<int>{2, 2}, std::vector<int>{2, 2}};
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
  RunConfig cfg;
  auto& P = cfg.params;
  for (const auto& [key, val] : doc.items()) {
    if (key == "p") P.p = get_double(val, key);
    else if (key == "cg") P.green.cost = get_double(val, key);
    else if (key == "cb") P.blue.cost = get_double(val, key);
    else if (key == "pig") P.green.pi = get_double(val, key);
    else if (key == "pib") P.blue.pi = get_double(val, key);
    else if (key == "dg") P.green.degree = get_int(val, key);
    else if (key == "db") P.blue.degree = get_int(val, key);
    else if (key == "hg") P.green.homophily = get_double(val, key);
    else if (key == "hb") P.blue.homophily = get_double(val, key);
    else if (key == "regime") cfg.rule = parse_rule(get_string(val, key), key);
    else if (key == "initial") {
      const auto x = get_doubles(val, key);
      if (x.size() != 4) throw ConfigError(key, "expected [g0, g1, b0, b1]");
      cfg.initial = StateVector{x[0], x[1], x[2], x[3]};
    } else if (key == "tol") cfg.solver.tol = get_double(val, key);
    else if (key == "max_iter") {
      if (!val.is_number_integer()) throw ConfigError(key, "expected an integer");
      cfg.solver.max_iter = val.get<long>();
    } else if (key == "damping") cfg.solver.damping = get_double(val, key);
    else if (key == "T") cfg.T = get_int(val, key);
    else if (key == "sweep_hg") cfg.sweep.hg = get_doubles(val, key);
    else if (key == "sweep_dg") cfg.sweep.dg = get_ints(val, key);
    else if (key == "population") cfg.population = get_int(val, key);
    else if (key == "generations") cfg.generations = get_int(val, key);
    else if (key == "v") cfg.v = parse_v(val, key);
    else if (key == "seed") {
      if (!val.is_number_integer() || (val.is_number_integer() && !val.is_number_unsigned() && val.get<long long>() < 0))
        throw ConfigError(key, "expected a nonnegative integer");
      cfg.seed = val.get<std::uint64_t>();
    } else if (key == "out") cfg.out = get_string(val, key);
    else if (key == "multicost") parse_multicost(val, cfg);
    else if (key == "probes") parse_probes(val, cfg.probes);
    else throw ConfigError(key, "unknown key '" + key + "'");
  }
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate_config(const RunConfig& cfg, bool with_multicost) {
  try {
    validate_params(cfg.params);
  } catch (const ParameterError& e) {
    static const std::pair<const char*, const char*> names[] = {
        {"green.cost", "cg"}, {"blue.cost", "cb"},     {"green.pi", "pig"}, {"blue.pi", "pib"},
        {"green.degree", "dg"}, {"blue.degree", "db"}, {"green.homophily", "hg"}, {"blue.homophily", "hb"}};
    std::string key = e.field();
    for (const auto& [field, flat] : names)
      if (key == field) key = flat;
    throw ConfigError(key, e.what());
  }
  if (cfg.initial && !in_unit_cube(*cfg.initial)) throw ConfigError("initial", "entries must lie in [0,1]");
  if (!(cfg.solver.tol > 0.0)) throw ConfigError("tol", "must be positive");
  if (cfg.solver.max_iter < 1) throw ConfigError("max_iter", "must be at least 1");
  if (!(cfg.solver.damping > 0.0 && cfg.solver.damping <= 1.0)) throw ConfigError("damping", "must lie in (0,1]");
  if (cfg.T < 0) throw ConfigError("T", "must be nonnegative");
  for (double h : cfg.sweep.hg)
    if (!(h >= 0.0 && h <= 1.0)) throw ConfigError("sweep_hg", "entries must lie in [0,1]");
  for (int d : cfg.sweep.dg)
    if (d < 1) throw ConfigError("sweep_dg", "entries must be at least 1");
  if (cfg.population < 1) throw ConfigError("population", "must be at least 1");
  if (cfg.generations < 1) throw ConfigError("generations", "must be at least 1");
  if (cfg.out.empty()) throw ConfigError("out", "must not be empty");
  if (!(cfg.probes.eps > 0.0)) throw ConfigError("probes.eps", "must be positive");
  if (cfg.probes.directions < 0) throw ConfigError("probes.directions", "must be nonnegative");
  if (cfg.probes.iterations < 1) throw ConfigError("probes.iterations", "must be at least 1");
  if (with_multicost) {
    try {
      multicost::validate_model(resolved_multicost(cfg));
    } catch (const ParameterError& e) {
      throw ConfigError("multicost." + e.field(), e.what());
    }
  }
}

multicost::CostValueModel resolved_multicost(const RunConfig& cfg) {
  multicost::CostValueModel m = cfg.multicost;
  if (cfg.colorblind) {
    if (m.cost_dist[0].size() != m.n_costs() || m.cost_dist[1].size() != m.n_costs())
      throw ParameterError("cost_dist", "cost distributions do not match the cost list");
    m.friend_dist = multicost::colorblind_pch_friend_dist(m);
  }
  return m;
}

nlohmann::json to_json(const RunConfig& cfg) {
  const auto& P = cfg.params;
  json j;
  j["p"] = P.p;
  j["cg"] = P.green.cost;
  j["cb"] = P.blue.cost;
  j["pig"] = P.green.pi;
  j["pib"] = P.blue.pi;
  j["dg"] = P.green.degree;
  j["db"] = P.blue.degree;
  j["hg"] = P.green.homophily;
  j["hb"] = P.blue.homophily;
  if (cfg.rule) j["regime"] = to_string(*cfg.rule);
  if (cfg.initial) j["initial"] = {cfg.initial->g0, cfg.initial->g1, cfg.initial->b0, cfg.initial->b1};
  j["tol"] = cfg.solver.tol;
  j["max_iter"] = cfg.solver.max_iter;
  j["damping"] = cfg.solver.damping;
  j["T"] = cfg.T;
  j["sweep_hg"] = cfg.sweep.hg;
  j["sweep_dg"] = cfg.sweep.dg;
  j["population"] = cfg.population;
  j["generations"] = cfg.generations;
  switch (cfg.v) {
    case abm::VRealization::Zero: j["v"] = 0; break;
    case abm::VRealization::One: j["v"] = 1; break;
    case abm::VRealization::Sample: j["v"] = "sample"; break;
  }
  j["seed"] = cfg.seed;
  j["out"] = cfg.out;
  const auto& m = cfg.multicost;
  json mc;
  mc["values"] = m.values;
  mc["prior"] = m.prior;
  mc["costs"] = m.costs;
  mc["lambda_g"] = m.lambda_g;
  mc["lambda_b"] = m.lambda_b;
  mc["cost_dist_g"] = m.cost_dist[0];
  mc["cost_dist_b"] = m.cost_dist[1];
  mc["degrees_g"] = m.degrees[0];
  mc["degrees_b"] = m.degrees[1];
  if (cfg.colorblind) mc["friend_dist"] = "colorblind";
  else mc["friend_dist"] = m.friend_dist;
  j["multicost"] = mc;
  j["probes"] = {{"eps", cfg.probes.eps}, {"directions", cfg.probes.directions}, {"iterations", cfg.probes.iterations}};
  return j;
}

}  // namespace hlearn::cli
