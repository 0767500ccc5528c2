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


#include "hlearn/abm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace hlearn::abm {
namespace {

constexpr std::uint64_t kRealizationStream = ~std::uint64_t{0};

CostLabel label_of(Group g) { return g == Group::Green ? CostLabel::CostG : CostLabel::CostB; }

// Runs body(group, index) for every agent; each index is owned by one thread.
template <typename Body>
void for_each_agent(int population, unsigned threads, Body body) {
  const long total = 2L * population;
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<long>(workers, total));
  auto run = [&](long begin, long end) {
    for (long k = begin; k < end; ++k)
      body(k < population ? Group::Green : Group::Blue, static_cast<int>(k % population));
  };
  if (workers <= 1) {
    run(0, total);
    return;
  }
  std::vector<std::jthread> pool;
  const long chunk = (total + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const long begin = w * chunk;
    const long end = std::min(total, begin + chunk);
    if (begin < end) pool.emplace_back(run, begin, end);
  }
}

Population empty_population(int n) {
  Population pop;
  for (auto& m : pop.groups) {
    m.high_cost.assign(static_cast<std::size_t>(n), 0);
    m.risky.assign(static_cast<std::size_t>(n), 0);
  }
  return pop;
}

ClassOutcome make_class(long members, long taking, double empty_fraction) {
  ClassOutcome c{members, taking, empty_fraction, 0.0};
  if (members > 0) {
    c.fraction = static_cast<double>(taking) / static_cast<double>(members);
    c.standard_error = std::sqrt(c.fraction * (1.0 - c.fraction) / static_cast<double>(members));
  }
  return c;
}

}  // namespace

void validate_config(const SimConfig& config) {
  validate_params(config.params);
  if (config.population < 1) throw ParameterError("population", "population must be at least 1");
  if (config.generations < 1) throw ParameterError("generations", "generations must be at least 1");
  if (config.initial && !in_unit_cube(*config.initial)) throw ParameterError("initial", "entries must lie in [0,1]");
}

std::vector<SignalObservation> sample_friends(Group observer, const ModelParams& params, const Population& previous,
                                              int v, SplitMix64& rng) {
  const auto& own = params.group(observer);
  std::vector<SignalObservation> obs;
  obs.reserve(static_cast<std::size_t>(own.degree));
  for (int k = 0; k < own.degree; ++k) {
    const Group g = rng.bernoulli(own.homophily) ? observer : other(observer);
    const auto& members = previous.of(g);
    if (members.risky.empty()) throw std::invalid_argument("sample_friends: previous generation is empty");
    const auto idx = static_cast<std::size_t>(rng.below(members.risky.size()));
    if (!members.high_cost[idx]) {
      obs.push_back({Outcome::Plus, CostLabel::Zero, g});
    } else if (members.risky[idx]) {
      obs.push_back({v ? Outcome::Plus : Outcome::Minus, label_of(g), g});
    } else {
      obs.push_back({Outcome::None, label_of(g), g});
    }
  }
  return obs;
}

Population initial_population(const SimConfig& config, int v) {
  const StateVector init = config.initial.value_or(default_state(config.params));
  Population pop = empty_population(config.population);
  for_each_agent(config.population, config.threads, [&](Group g, int i) {
    SplitMix64 rng(stream_seed(config.seed, 0, Population::group_index(g), static_cast<std::uint64_t>(i)));
    auto& m = pop.of(g);
    const bool high = rng.bernoulli(config.params.group(g).pi);
    m.high_cost[static_cast<std::size_t>(i)] = high;
    m.risky[static_cast<std::size_t>(i)] = high ? rng.bernoulli(init.taking(g, v)) : 1;
  });
  return pop;
}

Population simulate_generation(const Population& previous, const SimConfig& config, int t, int v,
                               const StateVector& belief_state) {
  Population pop = empty_population(config.population);
  const auto& params = config.params;
  for_each_agent(config.population, config.threads, [&](Group g, int i) {
    SplitMix64 rng(stream_seed(config.seed, static_cast<std::uint64_t>(t), Population::group_index(g),
                               static_cast<std::uint64_t>(i)));
    auto& m = pop.of(g);
    const bool high = rng.bernoulli(params.group(g).pi);
    const auto obs = sample_friends(g, params, previous, v, rng);
    m.high_cost[static_cast<std::size_t>(i)] = high;
    if (!high) {
      m.risky[static_cast<std::size_t>(i)] = 1;
      return;
    }
    const SignalTally tally = tally_observations(obs);
    m.risky[static_cast<std::size_t>(i)] = decide_tally(tally, params, belief_state, g) == Action::Risky;
  });
  return pop;
}

GenerationOutcome summarize(const Population& pop, const ModelParams& params, int t, int v) {
  GenerationOutcome out;
  out.t = t;
  out.v = v;
  for (Group g : {Group::Green, Group::Blue}) {
    const auto& m = pop.of(g);
    long high = 0, high_taking = 0, zero = 0, zero_taking = 0;
    for (std::size_t i = 0; i < m.risky.size(); ++i) {
      if (m.high_cost[i]) {
        ++high;
        high_taking += m.risky[i];
      } else {
        ++zero;
        zero_taking += m.risky[i];
      }
    }
    const std::size_t gi = Population::group_index(g);
    const double dflt = params.p >= params.group(g).cost ? 1.0 : 0.0;
    out.high[gi] = make_class(high, high_taking, dflt);
    out.zero[gi] = make_class(zero, zero_taking, 1.0);
  }
  return out;
}

int realize_v(VRealization mode, double p, std::uint64_t seed) {
  switch (mode) {
    case VRealization::Zero: return 0;
    case VRealization::One: return 1;
    case VRealization::Sample: {
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("realize_v: p out of [0,1]");
      SplitMix64 rng(stream_seed(seed, kRealizationStream));
      return rng.bernoulli(p) ? 1 : 0;
    }
  }
  throw std::logic_error("realize_v: unknown mode");
}

AbmResult run_abm(const SimConfig& config) {
  validate_config(config);
  AbmResult res;
  res.v = realize_v(config.v, config.params.p, config.seed);
  const StateVector init = config.initial.value_or(default_state(config.params));
  res.mean_field = iterate(init, config.params, config.generations, StepRule::General);

  Population pop = initial_population(config, res.v);
  res.generations.push_back(summarize(pop, config.params, 0, res.v));
  for (int t = 1; t <= config.generations; ++t) {
    pop = simulate_generation(pop, config, t, res.v, res.mean_field.states[static_cast<std::size_t>(t - 1)]);
    res.generations.push_back(summarize(pop, config.params, t, res.v));
  }

  for (const auto& gen : res.generations) {
    const StateVector& mf = res.mean_field.states[static_cast<std::size_t>(gen.t)];
    double gap = 0.0;
    for (Group g : {Group::Green, Group::Blue}) {
      const auto& c = gen.high[Population::group_index(g)];
      if (c.members > 0) gap = std::max(gap, std::abs(c.fraction - mf.taking(g, res.v)));
    }
    res.gap.push_back(gap);
    res.max_gap = std::max(res.max_gap, gap);
  }
  res.terminal_gap = res.gap.back();
  return res;
}

}  // namespace hlearn::abm
