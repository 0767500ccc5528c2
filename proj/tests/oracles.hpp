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


// Independent reference computations for the tests. Nothing here calls the
// tally, posterior or step code under test.

#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "hlearn/model.hpp"

namespace hlearn::oracle {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Random parameters with c_g > p >= c_b and degrees in [1, max_degree].
inline ModelParams random_split_params(std::mt19937_64& rng, int max_degree = 4) {
  ModelParams P;
  P.p = uniform(rng, 0.1, 0.9);
  P.green = {uniform(rng, P.p + 0.01, 0.99), uniform(rng, 0.0, 1.0), uniform_int(rng, 1, max_degree),
             uniform(rng, 0.0, 1.0)};
  P.blue = {uniform(rng, 0.01, P.p), uniform(rng, 0.0, 1.0), uniform_int(rng, 1, max_degree), uniform(rng, 0.0, 1.0)};
  return P;
}

/// Random parameters in any regime.
inline ModelParams random_params(std::mt19937_64& rng, int max_degree = 4) {
  ModelParams P;
  P.p = uniform(rng, 0.05, 0.95);
  for (auto* g : {&P.green, &P.blue})
    *g = {uniform(rng, 0.02, 0.98), uniform(rng, 0.0, 1.0), uniform_int(rng, 1, max_degree), uniform(rng, 0.0, 1.0)};
  return P;
}

inline StateVector random_state(std::mt19937_64& rng) {
  return {uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1)};
}

/// Next-period taking fractions (v = 0, v = 1) of one group's high-cost
/// members, by enumerating every ordered sequence of d friend draws.
///
/// Each draw lands in one of six cells: {own, other} group x {zero cost,
/// high-cost risky, high-cost safe}. A sequence containing a high-cost risky
/// friend reveals v. Otherwise the posterior is Bayes' rule on the full
/// sequence likelihoods.
inline std::array<double, 2> brute_force_step(const StateVector& s, const ModelParams& P, Group observer) {
  const bool green = observer == Group::Green;
  const auto& own = green ? P.green : P.blue;
  const auto& oth = green ? P.blue : P.green;
  const double a_own[2] = {green ? s.g0 : s.b0, green ? s.g1 : s.b1};
  const double a_oth[2] = {green ? s.b0 : s.g0, green ? s.b1 : s.g1};
  const double h = own.homophily;

  auto cell = [&](int k, int v) {
    switch (k) {
      case 0: return h * (1 - own.pi);
      case 1: return h * own.pi * a_own[v];
      case 2: return h * own.pi * (1 - a_own[v]);
      case 3: return (1 - h) * (1 - oth.pi);
      case 4: return (1 - h) * oth.pi * a_oth[v];
      default: return (1 - h) * oth.pi * (1 - a_oth[v]);
    }
  };

  const int d = own.degree;
  int total = 1;
  for (int i = 0; i < d; ++i) total *= 6;
  std::array<double, 2> next{0.0, 0.0};
  std::vector<int> seq(static_cast<std::size_t>(d));
  for (int code = 0; code < total; ++code) {
    int c = code;
    bool reveal = false;
    for (int i = 0; i < d; ++i) {
      seq[static_cast<std::size_t>(i)] = c % 6;
      c /= 6;
      reveal = reveal || seq[static_cast<std::size_t>(i)] == 1 || seq[static_cast<std::size_t>(i)] == 4;
    }
    double prob[2] = {1.0, 1.0};
    for (int v = 0; v < 2; ++v)
      for (int k : seq) prob[v] *= cell(k, v);

    for (int v = 0; v < 2; ++v) {
      if (prob[v] == 0.0) continue;
      bool risky;
      if (reveal) {
        risky = v == 1 ? 1.0 >= own.cost : 0.0 >= own.cost;
      } else {
        const double num = P.p * prob[1];
        const double den = num + (1 - P.p) * prob[0];
        const double belief = den > 0 ? num / den : P.p;
        risky = belief >= own.cost;
      }
      if (risky) next[static_cast<std::size_t>(v)] += prob[v];
    }
  }
  return next;
}

inline StateVector brute_force_step(const StateVector& s, const ModelParams& P) {
  const auto g = brute_force_step(s, P, Group::Green);
  const auto b = brute_force_step(s, P, Group::Blue);
  return {g[0], g[1], b[0], b[1]};
}

}  // namespace hlearn::oracle
