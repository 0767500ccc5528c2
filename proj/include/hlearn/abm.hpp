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

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "hlearn/dynamics.hpp"
#include "hlearn/model.hpp"
#include "hlearn/rng.hpp"
#include "hlearn/signal_bayes.hpp"

namespace hlearn::abm {

enum class VRealization { Zero, One, Sample };

struct SimConfig {
  ModelParams params;
  int population = 1000;  // per group
  int generations = 30;
  std::uint64_t seed = 1;
  VRealization v = VRealization::One;
  /// Generation-0 taking fractions of high-cost members; default profile
  /// when empty.
  std::optional<StateVector> initial;
  /// Worker threads; 0 picks hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
};

void validate_config(const SimConfig& config);

/// Realised actions of one generation, per group.
struct Population {
  struct Members {
    std::vector<std::uint8_t> high_cost;
    std::vector<std::uint8_t> risky;
  };
  std::array<Members, 2> groups;  // indexed by group_index()

  static constexpr std::size_t group_index(Group g) { return g == Group::Green ? 0 : 1; }
  const Members& of(Group g) const { return groups[group_index(g)]; }
  Members& of(Group g) { return groups[group_index(g)]; }
};

struct ClassOutcome {
  long members = 0;
  long taking = 0;
  /// taking / members; the class default action when the class is empty.
  double fraction = 0.0;
  double standard_error = 0.0;
};

struct GenerationOutcome {
  int t = 0;
  int v = 1;
  std::array<ClassOutcome, 2> high;  // [green, blue]
  std::array<ClassOutcome, 2> zero;
};

/// d_observer draws from `previous`: group by Bernoulli(h), then a uniform
/// member of that group. Each observation carries the friend's outcome sign,
/// cost class and group.
std::vector<SignalObservation> sample_friends(Group observer, const ModelParams& params, const Population& previous,
                                              int v, SplitMix64& rng);

/// Draws generation t from generation t - 1. High-cost members update on
/// `belief_state`, the mean-field profile of period t - 1.
Population simulate_generation(const Population& previous, const SimConfig& config, int t, int v,
                               const StateVector& belief_state);

GenerationOutcome summarize(const Population& pop, const ModelParams& params, int t, int v);

/// Generation 0: high-cost members take the risky action with the initial
/// fraction for value v.
Population initial_population(const SimConfig& config, int v);

int realize_v(VRealization mode, double p, std::uint64_t seed);

struct AbmResult {
  int v = 1;
  std::vector<GenerationOutcome> generations;  // t = 0..T
  Trajectory mean_field;
  std::vector<double> gap;  // sup over groups of |high fraction - mean field|
  double max_gap = 0.0;
  double terminal_gap = 0.0;
};

AbmResult run_abm(const SimConfig& config);

}  // namespace hlearn::abm
