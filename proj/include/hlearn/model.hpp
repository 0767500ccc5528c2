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
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace hlearn {

enum class Group { Blue, Green };

constexpr Group other(Group g) { return g == Group::Blue ? Group::Green : Group::Blue; }

inline const char* to_string(Group g) { return g == Group::Blue ? "blue" : "green"; }

/// Raised by validation; `field()` names the offending parameter path.
class ParameterError : public std::invalid_argument {
 public:
  ParameterError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Parameters of one group. `cost` is the positive cost drawn with
/// probability `pi`; the remaining members have cost zero.
template <typename Scalar>
struct BasicGroupParams {
  Scalar cost{};
  Scalar pi{};
  int degree{1};
  Scalar homophily{};

  friend bool operator==(const BasicGroupParams&, const BasicGroupParams&) = default;
};

template <typename Scalar>
struct BasicModelParams {
  Scalar p{};  // prior probability that v = 1
  BasicGroupParams<Scalar> green;
  BasicGroupParams<Scalar> blue;

  const BasicGroupParams<Scalar>& group(Group g) const { return g == Group::Green ? green : blue; }
  BasicGroupParams<Scalar>& group(Group g) { return g == Group::Green ? green : blue; }

  template <typename Other>
  BasicModelParams<Other> cast() const {
    auto conv = [](const BasicGroupParams<Scalar>& gp) {
      return BasicGroupParams<Other>{Other(gp.cost), Other(gp.pi), gp.degree, Other(gp.homophily)};
    };
    return {Other(p), conv(green), conv(blue)};
  }

  friend bool operator==(const BasicModelParams&, const BasicModelParams&) = default;
};

/// Mean-field profile: fraction of high-cost members of each group taking
/// the risky action, conditional on the value of the risky action.
template <typename Scalar>
struct BasicState {
  Scalar g0{}, g1{}, b0{}, b1{};

  Scalar taking(Group g, int v) const {
    if (g == Group::Green) return v ? g1 : g0;
    return v ? b1 : b0;
  }
  Scalar& taking(Group g, int v) {
    if (g == Group::Green) return v ? g1 : g0;
    return v ? b1 : b0;
  }

  Eigen::Matrix<Scalar, 4, 1> vector() const { return {g0, g1, b0, b1}; }
  static BasicState from_vector(const Eigen::Matrix<Scalar, 4, 1>& x) { return {x(0), x(1), x(2), x(3)}; }

  template <typename Other>
  BasicState<Other> cast() const {
    return {Other(g0), Other(g1), Other(b0), Other(b1)};
  }

  friend bool operator==(const BasicState&, const BasicState&) = default;
};

using GroupParams = BasicGroupParams<double>;
using ModelParams = BasicModelParams<double>;
using StateVector = BasicState<double>;

template <typename Scalar>
Scalar sup_distance(const BasicState<Scalar>& a, const BasicState<Scalar>& b) {
  return (a.vector() - b.vector()).cwiseAbs().maxCoeff();
}

template <typename Scalar>
bool in_unit_cube(const BasicState<Scalar>& s) {
  auto x = s.vector();
  return (x.array() >= Scalar(0)).all() && (x.array() <= Scalar(1)).all();
}

// ---------------------------------------------------------------------------
// Validation

namespace detail {

template <typename Scalar>
void validate_group(const BasicGroupParams<Scalar>& g, const std::string& name) {
  if (!(g.cost > Scalar(0))) throw ParameterError(name + ".cost", "cost must be positive");
  if (g.cost == Scalar(1)) throw ParameterError(name + ".cost", "cost equals 1");
  // A cost above 1 makes the risky outcome negative in both states, so the
  // sign of a high-cost payoff would no longer reveal v.
  if (g.cost > Scalar(1)) throw ParameterError(name + ".cost", "cost exceeds 1");
  if (!(g.pi >= Scalar(0) && g.pi <= Scalar(1))) throw ParameterError(name + ".pi", "pi out of [0,1]");
  if (!(g.homophily >= Scalar(0) && g.homophily <= Scalar(1)))
    throw ParameterError(name + ".homophily", "homophily out of [0,1]");
  if (g.degree < 1) throw ParameterError(name + ".degree", "degree must be at least 1");
}

}  // namespace detail

/// Returns `params` unchanged when every invariant holds; otherwise throws a
/// ParameterError naming the first violation.
template <typename Scalar>
const BasicModelParams<Scalar>& validate_params(const BasicModelParams<Scalar>& params) {
  if (!(params.p > Scalar(0) && params.p < Scalar(1))) throw ParameterError("p", "p out of open interval (0,1)");
  detail::validate_group(params.green, "green");
  detail::validate_group(params.blue, "blue");
  return params;
}

// ---------------------------------------------------------------------------
// Regimes

enum class Regime { BothRisky, BothSafe, Split };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::BothRisky: return "BothRisky";
    case Regime::BothSafe: return "BothSafe";
    case Regime::Split: return "Split";
  }
  return "?";
}

struct RegimeInfo {
  Regime tag{Regime::BothRisky};
  /// Only meaningful for Split: the group whose cost exceeds the prior.
  Group high_cost_group{Group::Green};
  bool relabeled() const { return tag == Regime::Split && high_cost_group == Group::Blue; }
};

/// Ties c == p resolve to the risky-by-default side.
template <typename Scalar>
RegimeInfo classify_regime(const BasicModelParams<Scalar>& params) {
  const bool green_safe = params.green.cost > params.p;
  const bool blue_safe = params.blue.cost > params.p;
  if (green_safe && blue_safe) return {Regime::BothSafe, Group::Green};
  if (!green_safe && !blue_safe) return {Regime::BothRisky, Group::Green};
  return {Regime::Split, green_safe ? Group::Green : Group::Blue};
}

/// Swaps the roles of the two groups.
template <typename Scalar>
BasicModelParams<Scalar> swap_groups(const BasicModelParams<Scalar>& params) {
  return {params.p, params.blue, params.green};
}

template <typename Scalar>
BasicState<Scalar> swap_groups(const BasicState<Scalar>& s) {
  return {s.b0, s.b1, s.g0, s.g1};
}

/// Behaviour of high-cost members with no information: risky iff p >= cost.
template <typename Scalar>
BasicState<Scalar> default_state(const BasicModelParams<Scalar>& params) {
  const Scalar g = params.p >= params.green.cost ? Scalar(1) : Scalar(0);
  const Scalar b = params.p >= params.blue.cost ? Scalar(1) : Scalar(0);
  return {g, g, b, b};
}

}  // namespace hlearn
