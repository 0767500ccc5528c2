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

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hlearn/model.hpp"

namespace hlearn {

/// x^n for n >= 0, with 0^0 == 1.
template <typename Scalar>
Scalar ipow(Scalar x, int n) {
  Scalar result(1);
  while (n > 0) {
    if (n & 1) result *= x;
    x *= x;
    n >>= 1;
  }
  return result;
}

/// d! / (a! b! (d-a-b)!)
template <typename Scalar>
Scalar multinomial3(int d, int a, int b) {
  Scalar r(1);
  for (int i = 1; i <= a; ++i) r = r * Scalar(d - a + i) / Scalar(i);
  const int rest = d - a;
  for (int i = 1; i <= b; ++i) r = r * Scalar(rest - b + i) / Scalar(i);
  return r;
}

// ---------------------------------------------------------------------------
// Observations

enum class Outcome { Plus, Minus, None };
enum class CostLabel { Zero, CostB, CostG };

struct SignalObservation {
  Outcome outcome{Outcome::Plus};
  CostLabel cost{CostLabel::Zero};
  Group group{Group::Blue};
};

/// Zero-cost members never see a negative payoff and never play safe.
inline bool is_consistent(const SignalObservation& o) {
  return o.cost != CostLabel::Zero || o.outcome == Outcome::Plus;
}

enum class Revealed { None, Plus, Minus };

/// Counts of the categories an observer saw. `n_blue`/`n_green` count
/// high-cost friends who played safe, `n_zero` counts zero-cost friends.
struct SignalTally {
  int n_blue{0};
  int n_green{0};
  int n_zero{0};
  Revealed revealed{Revealed::None};

  int safe_count(Group g) const { return g == Group::Green ? n_green : n_blue; }
  int informative() const { return n_blue + n_green + n_zero; }

  friend bool operator==(const SignalTally&, const SignalTally&) = default;
};

/// All (n_blue, n_green, n_zero) compositions of `degree`, with no reveal.
inline std::vector<SignalTally> enumerate_tallies(int degree) {
  if (degree < 1) throw std::invalid_argument("enumerate_tallies: degree must be at least 1");
  std::vector<SignalTally> out;
  out.reserve(static_cast<std::size_t>((degree + 1) * (degree + 2) / 2));
  for (int nb = 0; nb <= degree; ++nb)
    for (int ng = 0; ng <= degree - nb; ++ng) out.push_back({nb, ng, degree - nb - ng, Revealed::None});
  return out;
}

/// Builds the tally an observer forms from a list of observations.
inline SignalTally tally_observations(const std::vector<SignalObservation>& obs) {
  SignalTally t;
  for (const auto& o : obs) {
    if (o.cost == CostLabel::Zero) {
      ++t.n_zero;
    } else if (o.outcome == Outcome::None) {
      (o.group == Group::Green ? t.n_green : t.n_blue) += 1;
    } else if (o.outcome == Outcome::Plus) {
      if (t.revealed == Revealed::Minus) throw std::invalid_argument("tally: both outcomes revealed");
      t.revealed = Revealed::Plus;
    } else {
      if (t.revealed == Revealed::Plus) throw std::invalid_argument("tally: both outcomes revealed");
      t.revealed = Revealed::Minus;
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Per-draw category probabilities

/// Probability that a single friend draw falls in each category, from the
/// point of view of an observer in `observer`, when the value is `v`.
template <typename Scalar>
struct CategoryProbabilities {
  Scalar own_taker{}, own_safe{}, cross_taker{}, cross_safe{}, zero{};

  Scalar sum() const { return own_taker + own_safe + cross_taker + cross_safe + zero; }
  Scalar safe(Group observer, Group friend_group) const {
    return observer == friend_group ? own_safe : cross_safe;
  }
};

template <typename Scalar>
CategoryProbabilities<Scalar> category_probabilities(const BasicModelParams<Scalar>& params,
                                                     const BasicState<Scalar>& state, Group observer, int v) {
  const auto& own = params.group(observer);
  const auto& oth = params.group(other(observer));
  const Scalar h = own.homophily;
  const Scalar a_own = state.taking(observer, v);
  const Scalar a_oth = state.taking(other(observer), v);
  CategoryProbabilities<Scalar> c;
  c.own_taker = h * own.pi * a_own;
  c.own_safe = h * own.pi * (Scalar(1) - a_own);
  c.cross_taker = (Scalar(1) - h) * oth.pi * a_oth;
  c.cross_safe = (Scalar(1) - h) * oth.pi * (Scalar(1) - a_oth);
  c.zero = h * (Scalar(1) - own.pi) + (Scalar(1) - h) * (Scalar(1) - oth.pi);
  return c;
}

/// Probability (under value `v`) of observing exactly `tally`: the full
/// degree split into safe high-cost friends and zero-cost friends.
template <typename Scalar>
Scalar profile_probability(const SignalTally& tally, const BasicModelParams<Scalar>& params,
                           const BasicState<Scalar>& state, Group observer, int v) {
  const int d = params.group(observer).degree;
  if (tally.revealed != Revealed::None || tally.n_blue < 0 || tally.n_green < 0 || tally.n_zero < 0 ||
      tally.informative() != d)
    throw std::invalid_argument("profile_probability: tally inconsistent with degree");
  const auto c = category_probabilities(params, state, observer, v);
  const int n_own = tally.safe_count(observer);
  const int n_oth = tally.safe_count(other(observer));
  return multinomial3<Scalar>(d, n_own, n_oth) * ipow(c.own_safe, n_own) * ipow(c.cross_safe, n_oth) *
         ipow(c.zero, tally.n_zero);
}

/// Which quantity a derivative of `profile_probability` is taken against.
enum class Wrt { GreenTaking, BlueTaking, ObserverHomophily };

/// Partial derivative of profile_probability. The taking-fraction partials
/// refer to the fraction in the same state `v`.
template <typename Scalar>
Scalar profile_probability_derivative(const SignalTally& tally, const BasicModelParams<Scalar>& params,
                                      const BasicState<Scalar>& state, Group observer, int v, Wrt wrt) {
  const int d = params.group(observer).degree;
  if (tally.revealed != Revealed::None || tally.informative() != d)
    throw std::invalid_argument("profile_probability_derivative: tally inconsistent with degree");
  const auto& own = params.group(observer);
  const auto& oth = params.group(other(observer));
  const Scalar h = own.homophily;
  const auto c = category_probabilities(params, state, observer, v);
  const int n[3] = {tally.safe_count(observer), tally.safe_count(other(observer)), tally.n_zero};
  const Scalar cell[3] = {c.own_safe, c.cross_safe, c.zero};
  Scalar dcell[3] = {Scalar(0), Scalar(0), Scalar(0)};
  const Group own_g = observer;
  switch (wrt) {
    case Wrt::GreenTaking:
    case Wrt::BlueTaking: {
      const Group target = wrt == Wrt::GreenTaking ? Group::Green : Group::Blue;
      if (target == own_g)
        dcell[0] = -h * own.pi;
      else
        dcell[1] = -(Scalar(1) - h) * oth.pi;
      break;
    }
    case Wrt::ObserverHomophily:
      dcell[0] = own.pi * (Scalar(1) - state.taking(observer, v));
      dcell[1] = -oth.pi * (Scalar(1) - state.taking(other(observer), v));
      dcell[2] = oth.pi - own.pi;
      break;
  }
  Scalar total(0);
  for (int k = 0; k < 3; ++k) {
    if (n[k] == 0 || dcell[k] == Scalar(0)) continue;
    Scalar term = Scalar(n[k]) * ipow(cell[k], n[k] - 1) * dcell[k];
    for (int j = 0; j < 3; ++j)
      if (j != k) term *= ipow(cell[j], n[j]);
    total += term;
  }
  return multinomial3<Scalar>(d, n[0], n[1]) * total;
}

// ---------------------------------------------------------------------------
// Posterior and decision

template <typename Scalar>
struct BasicPosterior {
  Scalar value{};
};
using PosteriorBelief = BasicPosterior<double>;

/// Posterior probability that v = 1 after observing `tally`. Returns
/// std::nullopt when the tally has probability zero in both states.
template <typename Scalar>
std::optional<BasicPosterior<Scalar>> posterior(const SignalTally& tally, const BasicModelParams<Scalar>& params,
                                                const BasicState<Scalar>& state, Group observer) {
  if (tally.revealed == Revealed::Plus) return BasicPosterior<Scalar>{Scalar(1)};
  if (tally.revealed == Revealed::Minus) return BasicPosterior<Scalar>{Scalar(0)};

  const int n_own = tally.safe_count(observer);
  const int n_oth = tally.safe_count(other(observer));

  // Cell factors decide whether the tally can occur at all; the multinomial
  // coefficient and the h*pi factors cancel in the ratio below.
  bool possible[2];
  Scalar like[2];
  for (int v = 0; v < 2; ++v) {
    const auto c = category_probabilities(params, state, observer, v);
    possible[v] = ipow(c.own_safe, n_own) * ipow(c.cross_safe, n_oth) * ipow(c.zero, tally.n_zero) > Scalar(0);
    like[v] = ipow(Scalar(1) - state.taking(observer, v), n_own) *
              ipow(Scalar(1) - state.taking(other(observer), v), n_oth);
  }
  if (!possible[0] && !possible[1]) return std::nullopt;
  if (!possible[1]) return BasicPosterior<Scalar>{Scalar(0)};
  if (!possible[0]) return BasicPosterior<Scalar>{Scalar(1)};
  if (like[1] == like[0]) return BasicPosterior<Scalar>{params.p};

  const Scalar p = params.p;
  const Scalar num = p * like[1];
  const Scalar den = num + (Scalar(1) - p) * like[0];
  if (den == Scalar(0)) return std::nullopt;
  if (den < Scalar(1e-300)) {
    // underflow guard: recompute from log-likelihoods
    using std::exp;
    using std::log;
    const Scalar l1 = log(p) + Scalar(n_own) * log(Scalar(1) - state.taking(observer, 1)) +
                      Scalar(n_oth) * log(Scalar(1) - state.taking(other(observer), 1));
    const Scalar l0 = log(Scalar(1) - p) + Scalar(n_own) * log(Scalar(1) - state.taking(observer, 0)) +
                      Scalar(n_oth) * log(Scalar(1) - state.taking(other(observer), 0));
    return BasicPosterior<Scalar>{Scalar(1) / (Scalar(1) + exp(l0 - l1))};
  }
  return BasicPosterior<Scalar>{num / den};
}

enum class Action { Safe, Risky };

/// Ties go to the risky action.
template <typename Scalar>
Action decide(BasicPosterior<Scalar> belief, Scalar cost) {
  return belief.value >= cost ? Action::Risky : Action::Safe;
}

/// Decision of a high-cost member of `observer` for a tally; an off-path
/// tally falls back to the default action.
template <typename Scalar>
Action decide_tally(const SignalTally& tally, const BasicModelParams<Scalar>& params,
                    const BasicState<Scalar>& state, Group observer) {
  const Scalar cost = params.group(observer).cost;
  if (auto b = posterior(tally, params, state, observer)) return decide(*b, cost);
  return params.p >= cost ? Action::Risky : Action::Safe;
}

}  // namespace hlearn
