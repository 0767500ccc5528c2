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


#include <gtest/gtest.h>

#include <random>

#include "hlearn/signal_bayes.hpp"
#include "oracles.hpp"

using namespace hlearn;

namespace {

ModelParams base_params() { return {0.5, {0.8, 0.6, 2, 0.5}, {0.2, 0.3, 2, 0.5}}; }

}  // namespace

TEST(CategoryProbabilities, FullHomophilyCorner) {
  ModelParams P = base_params();
  P.green.homophily = 1.0;
  P.green.pi = 0.5;
  const auto c = category_probabilities(P, StateVector{0, 1, 0, 1}, Group::Green, 1);
  EXPECT_DOUBLE_EQ(c.own_taker, 0.5);
  EXPECT_DOUBLE_EQ(c.own_safe, 0.0);
  EXPECT_DOUBLE_EQ(c.zero, 0.5);
  EXPECT_DOUBLE_EQ(c.cross_taker, 0.0);
  EXPECT_DOUBLE_EQ(c.cross_safe, 0.0);
}

TEST(CategoryProbabilities, BaselineParamsCells) {
  const auto c = category_probabilities(base_params(), StateVector{0, 0.5, 1, 1}, Group::Green, 1);
  EXPECT_NEAR(c.own_taker, 0.15, 1e-15);
  EXPECT_NEAR(c.own_safe, 0.15, 1e-15);
  EXPECT_NEAR(c.cross_taker, 0.15, 1e-15);
  EXPECT_NEAR(c.cross_safe, 0.0, 1e-15);
  EXPECT_NEAR(c.zero, 0.55, 1e-15);
  EXPECT_NEAR(c.sum(), 1.0, 1e-12);
}

TEST(CategoryProbabilities, NoInformativeAgents) {
  ModelParams P = base_params();
  P.green.pi = P.blue.pi = 0.0;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto s = oracle::random_state(rng);
    EXPECT_DOUBLE_EQ(category_probabilities(P, s, Group::Blue, i % 2).zero, 1.0);
  }
}

TEST(CategoryProbabilities, SumToOne) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto P = oracle::random_params(rng);
    const auto s = oracle::random_state(rng);
    for (Group g : {Group::Green, Group::Blue})
      for (int v = 0; v < 2; ++v) EXPECT_NEAR(category_probabilities(P, s, g, v).sum(), 1.0, 1e-12);
  }
}

TEST(ProfileProbability, SingleDraw) {
  ModelParams P = base_params();
  P.green.degree = 1;
  const StateVector s{0.2, 0.7, 0.4, 0.9};
  const SignalTally t{0, 1, 0, Revealed::None};
  EXPECT_DOUBLE_EQ(profile_probability(t, P, s, Group::Green, 1), 0.5 * 0.6 * (1 - 0.7));
  EXPECT_DOUBLE_EQ(profile_probability(t, P, s, Group::Green, 0), 0.5 * 0.6 * (1 - 0.2));
}

TEST(ProfileProbability, AllZeroCostFriends) {
  const SignalTally t{0, 0, 2, Revealed::None};
  EXPECT_NEAR(profile_probability(t, base_params(), StateVector{1, 1, 1, 1}, Group::Green, 1), 0.3025, 1e-15);
}

TEST(ProfileProbability, RejectsWrongDegree) {
  const SignalTally t{1, 1, 1, Revealed::None};
  EXPECT_THROW(profile_probability(t, base_params(), StateVector{}, Group::Green, 1), std::invalid_argument);
  const SignalTally r{0, 0, 1, Revealed::Plus};
  EXPECT_THROW(profile_probability(r, base_params(), StateVector{}, Group::Green, 1), std::invalid_argument);
}

TEST(ProfileProbability, NormalizesWithRevealMass) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const auto P = oracle::random_params(rng, 6);
    const auto s = oracle::random_state(rng);
    for (Group g : {Group::Green, Group::Blue}) {
      for (int v = 0; v < 2; ++v) {
        double total = 0.0;
        for (const auto& t : enumerate_tallies(P.group(g).degree)) total += profile_probability(t, P, s, g, v);
        const auto c = category_probabilities(P, s, g, v);
        const double reveal = 1.0 - std::pow(1.0 - c.own_taker - c.cross_taker, P.group(g).degree);
        EXPECT_NEAR(total + reveal, 1.0, 1e-10);
      }
    }
  }
}

TEST(ProfileProbability, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(9);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const auto P = oracle::random_params(rng, 4);
    const StateVector s{oracle::uniform(rng, 0.05, 0.95), oracle::uniform(rng, 0.05, 0.95),
                        oracle::uniform(rng, 0.05, 0.95), oracle::uniform(rng, 0.05, 0.95)};
    const Group obs = i % 2 ? Group::Green : Group::Blue;
    const int v = (i / 2) % 2;
    for (const auto& t : enumerate_tallies(P.group(obs).degree)) {
      for (Group target : {Group::Green, Group::Blue}) {
        StateVector up = s, dn = s;
        up.taking(target, v) += h;
        dn.taking(target, v) -= h;
        const double fd =
            (profile_probability(t, P, up, obs, v) - profile_probability(t, P, dn, obs, v)) / (2 * h);
        const Wrt w = target == Group::Green ? Wrt::GreenTaking : Wrt::BlueTaking;
        EXPECT_NEAR(profile_probability_derivative(t, P, s, obs, v, w), fd, 1e-7);
      }
      ModelParams Pu = P, Pd = P;
      const double hh = std::min({h, P.group(obs).homophily, 1 - P.group(obs).homophily});
      if (hh < 1e-9) continue;
      Pu.group(obs).homophily += hh;
      Pd.group(obs).homophily -= hh;
      const double fd = (profile_probability(t, Pu, s, obs, v) - profile_probability(t, Pd, s, obs, v)) / (2 * hh);
      EXPECT_NEAR(profile_probability_derivative(t, P, s, obs, v, Wrt::ObserverHomophily), fd, 1e-6);
    }
  }
}

TEST(Posterior, EmptyInformationReturnsPrior) {
  ModelParams P = base_params();
  P.p = 0.37;
  const auto b = posterior(SignalTally{0, 0, 2, Revealed::None}, P, StateVector{0.1, 0.8, 0.3, 0.9}, Group::Blue);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->value, 0.37);
}

TEST(Posterior, RevealsAreDecisive) {
  const StateVector s{0.1, 0.8, 0.3, 0.9};
  EXPECT_EQ(posterior(SignalTally{0, 0, 1, Revealed::Plus}, base_params(), s, Group::Green)->value, 1.0);
  EXPECT_EQ(posterior(SignalTally{1, 0, 0, Revealed::Minus}, base_params(), s, Group::Green)->value, 0.0);
}

TEST(Posterior, HandComputedIndirectInference) {
  ModelParams P = base_params();
  P.p = 0.4;
  const auto b = posterior(SignalTally{0, 1, 1, Revealed::None}, P, StateVector{0, 0.5, 1, 1}, Group::Green);
  ASSERT_TRUE(b);
  EXPECT_NEAR(b->value, 0.4 * 0.5 / (0.4 * 0.5 + 0.6 * 1.0), 1e-15);
  EXPECT_NEAR(b->value, 0.25, 1e-15);
}

TEST(Posterior, OffPathTally) {
  // Every green high-cost member takes the risky action in both states, so a
  // safe green is impossible.
  const auto b = posterior(SignalTally{0, 1, 1, Revealed::None}, base_params(), StateVector{1, 1, 1, 1},
                           Group::Green);
  EXPECT_FALSE(b.has_value());
  EXPECT_EQ(decide_tally(SignalTally{0, 1, 1, Revealed::None}, base_params(), StateVector{1, 1, 1, 1},
                         Group::Green),
            Action::Safe);
}

TEST(Posterior, BoundsDampingAndRelabeling) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    const auto P = oracle::random_params(rng, 5);
    auto s = oracle::random_state(rng);
    // impose g(1) >= g(0), b(1) >= b(0)
    if (s.g1 < s.g0) std::swap(s.g0, s.g1);
    if (s.b1 < s.b0) std::swap(s.b0, s.b1);
    for (Group g : {Group::Green, Group::Blue}) {
      for (const auto& t : enumerate_tallies(P.group(g).degree)) {
        const auto b = posterior(t, P, s, g);
        if (!b) continue;
        EXPECT_GE(b->value, 0.0);
        EXPECT_LE(b->value, 1.0);
        EXPECT_LE(b->value, P.p * (1 + 1e-15));
        const SignalTally swapped{t.n_green, t.n_blue, t.n_zero, t.revealed};
        const auto bs = posterior(swapped, swap_groups(P), swap_groups(s), other(g));
        ASSERT_TRUE(bs);
        EXPECT_DOUBLE_EQ(b->value, bs->value);
      }
    }
  }
}

TEST(Decide, TiesGoRisky) {
  EXPECT_EQ(decide(PosteriorBelief{0.25}, 0.2), Action::Risky);
  EXPECT_EQ(decide(PosteriorBelief{0.5}, 0.5), Action::Risky);
  EXPECT_EQ(decide(PosteriorBelief{0.0}, 0.2), Action::Safe);
}

TEST(EnumerateTallies, Counts) {
  EXPECT_EQ(enumerate_tallies(1).size(), 3u);
  EXPECT_EQ(enumerate_tallies(2).size(), 6u);
  EXPECT_EQ(enumerate_tallies(4).size(), 15u);
  for (int d = 1; d <= 8; ++d) {
    const auto ts = enumerate_tallies(d);
    EXPECT_EQ(ts.size(), static_cast<std::size_t>((d + 1) * (d + 2) / 2));
    for (const auto& t : ts) EXPECT_EQ(t.informative(), d);
  }
  EXPECT_THROW(enumerate_tallies(0), std::invalid_argument);
}

TEST(TallyObservations, BuildsCounts) {
  const std::vector<SignalObservation> obs = {{Outcome::Plus, CostLabel::Zero, Group::Green},
                                              {Outcome::None, CostLabel::CostG, Group::Green},
                                              {Outcome::None, CostLabel::CostB, Group::Blue},
                                              {Outcome::None, CostLabel::CostB, Group::Blue}};
  EXPECT_EQ(tally_observations(obs), (SignalTally{2, 1, 1, Revealed::None}));
  auto with_reveal = obs;
  with_reveal.push_back({Outcome::Minus, CostLabel::CostG, Group::Green});
  EXPECT_EQ(tally_observations(with_reveal).revealed, Revealed::Minus);
  with_reveal.push_back({Outcome::Plus, CostLabel::CostB, Group::Blue});
  EXPECT_THROW(tally_observations(with_reveal), std::invalid_argument);
}

TEST(SignalObservation, ZeroCostConsistency) {
  EXPECT_TRUE(is_consistent({Outcome::Plus, CostLabel::Zero, Group::Blue}));
  EXPECT_FALSE(is_consistent({Outcome::None, CostLabel::Zero, Group::Blue}));
  EXPECT_FALSE(is_consistent({Outcome::Minus, CostLabel::Zero, Group::Green}));
  EXPECT_TRUE(is_consistent({Outcome::Minus, CostLabel::CostG, Group::Green}));
}
