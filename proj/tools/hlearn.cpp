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


// Command-line driver: hlearn <command> [--config FILE] [overrides...]

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hlearn/commands.hpp"
#include "hlearn/config.hpp"

namespace {

struct Overrides {
  std::optional<std::string> config, out, regime;
  std::optional<std::uint64_t> seed;
  std::optional<double> p, cg, cb, pig, pib, hg, hb;
  std::optional<int> dg, db, T, population, generations;
};

void apply(const Overrides& o, hlearn::cli::RunConfig& cfg) {
  auto& P = cfg.params;
  if (o.out) cfg.out = *o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.p) P.p = *o.p;
  if (o.cg) P.green.cost = *o.cg;
  if (o.cb) P.blue.cost = *o.cb;
  if (o.pig) P.green.pi = *o.pig;
  if (o.pib) P.blue.pi = *o.pib;
  if (o.dg) P.green.degree = *o.dg;
  if (o.db) P.blue.degree = *o.db;
  if (o.hg) P.green.homophily = *o.hg;
  if (o.hb) P.blue.homophily = *o.hb;
  if (o.T) cfg.T = *o.T;
  if (o.population) cfg.population = *o.population;
  if (o.generations) cfg.generations = *o.generations;
  if (o.regime) {
    // reuse the file parser so flag and file spellings agree
    cfg.rule = hlearn::cli::parse_config(nlohmann::json{{"regime", *o.regime}}).rule;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Social learning with homophily: dynamics, steady states, sweeps and simulation"};
  app.set_version_flag("--version", "hlearn 0.1.0");

  std::string command;
  Overrides o;
  app.add_option("command", command, "dynamics | steady | sweep | incidental | multicost-verify | abm")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(hlearn::cli::kCommands),
                                                     std::end(hlearn::cli::kCommands))));
  app.add_option("--config", o.config, "JSON configuration file");
  app.add_option("--out", o.out, "output path, '-' for standard output");
  app.add_option("--seed", o.seed, "root random seed");
  app.add_option("--p", o.p, "prior probability that v = 1");
  app.add_option("--cg", o.cg, "green high cost");
  app.add_option("--cb", o.cb, "blue high cost");
  app.add_option("--pig", o.pig, "share of green members with the high cost");
  app.add_option("--pib", o.pib, "share of blue members with the high cost");
  app.add_option("--dg", o.dg, "green degree");
  app.add_option("--db", o.db, "blue degree");
  app.add_option("--hg", o.hg, "green homophily");
  app.add_option("--hb", o.hb, "blue homophily");
  app.add_option("--T", o.T, "iterations for dynamics");
  app.add_option("--regime", o.regime, "dynamics step rule: general | simplified | full_homophily");
  app.add_option("--population", o.population, "agents per group (abm)");
  app.add_option("--generations", o.generations, "generations (abm)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hlearn::cli::kExitConfig;
  }

  hlearn::cli::RunConfig cfg;
  try {
    if (o.config) cfg = hlearn::cli::load_config_file(*o.config);
    apply(o, cfg);
  } catch (const hlearn::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hlearn::cli::kExitConfig;
  }
  return hlearn::cli::dispatch(command, cfg, std::cerr);
}
