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

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hlearn/model.hpp"
#include "hlearn/signal_bayes.hpp"

namespace hlearn {

class RegimeMismatch : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class StepRule { General, SimplifiedSplit, FullHomophily };

inline const char* to_string(StepRule r) {
  switch (r) {
    case StepRule::General: return "general";
    case StepRule::SimplifiedSplit: return "simplified";
    case StepRule::FullHomophily: return "full_homophily";
  }
  return "?";
}

/// Next-period taking fractions (v = 0, v = 1) of high-cost members of one
/// group.
///
/// Each term of the sum conditions on how many of the d friends are own-group
/// high-cost, other-group high-cost and zero-cost. Given those counts the
/// member plays risky at v = 1 unless every high-cost friend played safe and
/// the resulting posterior is below cost; at v = 0 only if every high-cost
/// friend played safe and the posterior clears the cost. Accumulating both
/// states term by term keeps next(1) >= next(0) exact in floating point.
template <typename Scalar>
std::pair<Scalar, Scalar> step_group(const BasicState<Scalar>& state, const BasicModelParams<Scalar>& params,
                                     Group observer) {
  const auto& own = params.group(observer);
  const auto& oth = params.group(other(observer));
  const int d = own.degree;
  const Scalar h = own.homophily;
  const Scalar own_high = h * own.pi;
  const Scalar oth_high = (Scalar(1) - h) * oth.pi;
  const Scalar zero = h * (Scalar(1) - own.pi) + (Scalar(1) - h) * (Scalar(1) - oth.pi);
  const Scalar keep_own[2] = {Scalar(1) - state.taking(observer, 0), Scalar(1) - state.taking(observer, 1)};
  const Scalar keep_oth[2] = {Scalar(1) - state.taking(other(observer), 0),
                              Scalar(1) - state.taking(other(observer), 1)};

  Scalar next0(0), next1(0);
  for (int n_own = 0; n_own <= d; ++n_own) {
    for (int n_oth = 0; n_oth <= d - n_own; ++n_oth) {
      const int n_zero = d - n_own - n_oth;
      const Scalar weight = multinomial3<Scalar>(d, n_own, n_oth) * ipow(own_high, n_own) *
                            ipow(oth_high, n_oth) * ipow(zero, n_zero);
      if (weight == Scalar(0)) continue;
      SignalTally t;
      (observer == Group::Green ? t.n_green : t.n_blue) = n_own;
      (observer == Group::Green ? t.n_blue : t.n_green) = n_oth;
      t.n_zero = n_zero;
      const bool risky = decide_tally(t, params, state, observer) == Action::Risky;
      const Scalar silent0 = ipow(keep_own[0], n_own) * ipow(keep_oth[0], n_oth);
      const Scalar silent1 = ipow(keep_own[1], n_own) * ipow(keep_oth[1], n_oth);
      if (risky) {
        next1 += weight;
        next0 += weight * silent0;
      } else {
        next1 += weight * (Scalar(1) - silent1);
      }
    }
  }
  auto clamp01 = [](Scalar x) { return std::clamp(x, Scalar(0), Scalar(1)); };
  return {clamp01(next0), clamp01(next1)};
}

/// One step of the mean-field map for both groups. Valid in every regime;
/// in the Split regime it reduces to the closed-form green update.
template <typename Scalar>
BasicState<Scalar> step_general(const BasicState<Scalar>& state, const BasicModelParams<Scalar>& params) {
  const auto [g0, g1] = step_group(state, params, Group::Green);
  const auto [b0, b1] = step_group(state, params, Group::Blue);
  return {g0, g1, b0, b1};
}

namespace detail {

template <typename Scalar>
void require_split(const BasicModelParams<Scalar>& params, const char* who) {
  if (classify_regime(params).tag != Regime::Split)
    throw RegimeMismatch(std::string(who) + ": regime mismatch, requires c_high > p >= c_low");
}

}  // namespace detail

/// Update in the Split regime when the low-cost group always takes the
/// risky action at v = 1. Labels are normalised internally so the high-cost
/// group plays the green role.
template <typename Scalar>
BasicState<Scalar> step_simplified(const BasicState<Scalar>& state, const BasicModelParams<Scalar>& params) {
  detail::require_split(params, "step_simplified");
  if (classify_regime(params).relabeled())
    return swap_groups(step_simplified(swap_groups(state), swap_groups(params)));
  const auto& g = params.green;
  const auto& b = params.blue;
  const Scalar a = g.homophily * g.pi * state.g1 + (Scalar(1) - g.homophily) * b.pi;
  return {Scalar(0), Scalar(1) - ipow(Scalar(1) - a, g.degree), ipow(Scalar(1) - b.homophily * b.pi, b.degree),
          Scalar(1)};
}

/// Whether `state` lies on the manifold where step_simplified coincides with
/// step_general: g(0) = 0, b(1) = 1, and every possible blue profile without a
/// blue high-cost friend keeps the blue posterior at or above c_b.
template <typename Scalar>
bool check_simplified_applicable(const BasicState<Scalar>& state, const BasicModelParams<Scalar>& params) {
  if (classify_regime(params).tag != Regime::Split) return false;
  if (classify_regime(params).relabeled()) return check_simplified_applicable(swap_groups(state), swap_groups(params));
  if (state.g0 != Scalar(0) || state.b1 != Scalar(1)) return false;
  const int d = params.blue.degree;
  for (int ng = 0; ng <= d; ++ng) {
    const SignalTally t{0, ng, d - ng, Revealed::None};
    const bool reachable = profile_probability(t, params, state, Group::Blue, 0) > Scalar(0) ||
                           profile_probability(t, params, state, Group::Blue, 1) > Scalar(0);
    if (!reachable) continue;
    const auto belief = posterior(t, params, state, Group::Blue);
    if (!belief || belief->value < params.blue.cost) return false;
  }
  return true;
}

/// One-group update under full homophily, restricted to the region where the
/// other state component sits at its steady value.
template <typename Scalar>
Scalar step_full_homophily(Scalar fraction, const BasicGroupParams<Scalar>& group, Scalar p, int v) {
  if (group.homophily != Scalar(1)) throw RegimeMismatch("step_full_homophily: requires homophily == 1");
  if (group.cost <= p) return v ? Scalar(1) : ipow(Scalar(1) - group.pi, group.degree);
  if (!v) return Scalar(0);
  return Scalar(1) - ipow(Scalar(1) - group.pi * fraction, group.degree);
}

template <typename Scalar>
BasicState<Scalar> step_with(StepRule rule, const BasicState<Scalar>& s, const BasicModelParams<Scalar>& params) {
  switch (rule) {
    case StepRule::General: return step_general(s, params);
    case StepRule::SimplifiedSplit: return step_simplified(s, params);
    case StepRule::FullHomophily:
      return {step_full_homophily(s.g0, params.green, params.p, 0), step_full_homophily(s.g1, params.green, params.p, 1),
              step_full_homophily(s.b0, params.blue, params.p, 0), step_full_homophily(s.b1, params.blue, params.p, 1)};
  }
  throw std::logic_error("unknown step rule");
}

template <typename Scalar>
struct BasicTrajectory {
  std::vector<BasicState<Scalar>> states;
  BasicModelParams<Scalar> params;
  StepRule rule{StepRule::General};
  /// First t with |x_t - x_{t-1}|_inf <= tolerance, if any.
  std::optional<int> fixed_point_at;
};
using Trajectory = BasicTrajectory<double>;

inline constexpr double kFixedPointTolerance = 1e-12;

/// Applies `rule` T times starting from `initial`; the result holds T + 1
/// states.
template <typename Scalar>
BasicTrajectory<Scalar> iterate(const BasicState<Scalar>& initial, const BasicModelParams<Scalar>& params, int T,
                                StepRule rule = StepRule::General) {
  if (T < 0) throw std::invalid_argument("iterate: T must be nonnegative");
  if (rule == StepRule::SimplifiedSplit) detail::require_split(params, "iterate");
  if (rule == StepRule::FullHomophily &&
      (params.green.homophily != Scalar(1) || params.blue.homophily != Scalar(1)))
    throw RegimeMismatch("iterate: full-homophily rule requires h_g = h_b = 1");
  BasicTrajectory<Scalar> traj{{initial}, params, rule, std::nullopt};
  traj.states.reserve(static_cast<std::size_t>(T) + 1);
  for (int t = 1; t <= T; ++t) {
    traj.states.push_back(step_with(rule, traj.states.back(), params));
    if (!traj.fixed_point_at &&
        sup_distance(traj.states[t], traj.states[t - 1]) <= Scalar(kFixedPointTolerance))
      traj.fixed_point_at = t;
  }
  return traj;
}

/// g_t(1) >= g_t(0) and b_t(1) >= b_t(0) for every t >= 1.
template <typename Scalar>
bool check_monotonicity(const BasicTrajectory<Scalar>& traj) {
  for (std::size_t t = 1; t < traj.states.size(); ++t) {
    const auto& s = traj.states[t];
    if (s.g1 < s.g0 || s.b1 < s.b0) return false;
  }
  return true;
}

}  // namespace hlearn
