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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hlearn/model.hpp"
#include "hlearn/signal_bayes.hpp"

namespace hlearn::multicost {

/// Finitely many values and costs; agent types are (group, cost) pairs.
///
/// Types are indexed group-major: green costs first, then blue costs, in the
/// order of `costs`. `friend_dist[i][j]` is the per-draw probability that a
/// type-i agent observes a type-j agent.
struct CostValueModel {
  std::vector<double> values;  // ascending
  std::vector<double> prior;   // Pr(v)
  std::vector<double> costs;   // ascending
  double lambda_g = 0.5;
  double lambda_b = 0.5;
  std::array<std::vector<double>, 2> cost_dist;  // [green, blue] over costs
  std::array<std::vector<int>, 2> degrees;       // [green, blue] per cost
  std::vector<std::vector<double>> friend_dist;

  std::size_t n_costs() const { return costs.size(); }
  std::size_t n_types() const { return 2 * costs.size(); }
  std::size_t type_index(Group g, std::size_t cost) const {
    return (g == Group::Green ? 0 : costs.size()) + cost;
  }
  Group type_group(std::size_t type) const { return type < costs.size() ? Group::Green : Group::Blue; }
  std::size_t type_cost_index(std::size_t type) const { return type % costs.size(); }
  double type_cost(std::size_t type) const { return costs[type_cost_index(type)]; }
  int type_degree(std::size_t type) const {
    return degrees[type_group(type) == Group::Green ? 0 : 1][type_cost_index(type)];
  }
  const std::vector<double>& dist(Group g) const { return cost_dist[g == Group::Green ? 0 : 1]; }
  double lambda(Group g) const { return g == Group::Green ? lambda_g : lambda_b; }
};

/// Throws ParameterError naming the first violated invariant. Costs may be
/// negative (a stand-in for agents who always gain from the risky action).
void validate_model(const CostValueModel& model);

/// Rows are types, columns are values: fraction of the type taking the
/// risky action when the value is `values[k]`.
using StatePolicy = Eigen::MatrixXd;

/// Every cost lies strictly between two values.
bool check_assumption_nontrivial(const CostValueModel& model);

enum class McOutcome { Success, Failure, Safe };

struct FriendObservation {
  std::size_t type = 0;
  McOutcome outcome = McOutcome::Safe;
};

/// Posterior over `values` after the observations. std::nullopt when the
/// profile is impossible under every value.
std::optional<Eigen::VectorXd> mc_posterior(const std::vector<FriendObservation>& profile,
                                            const CostValueModel& model, const StatePolicy& previous);

/// One period of best responses: for each type and value, the probability
/// over friend profiles that E[v | profile] >= own cost.
StatePolicy mc_step(const StatePolicy& policy, const CostValueModel& model);

/// Risky exactly when cost < value.
StatePolicy complete_learning_policy(const CostValueModel& model);

struct PchWitness {
  std::size_t observer = 0;
  std::size_t observed = 0;
  double value = 0.0;  // strictly between the two costs
};

struct PchCheck {
  bool holds = true;
  std::optional<PchWitness> witness;
};

PchCheck is_perfect_cost_homophily(const CostValueModel& model);

struct ProbeOptions {
  double eps = 1e-2;
  int directions = 20;
  int iterations = 1000;
  double tol = 1e-6;
  std::uint64_t seed = 1;
};

struct CompleteLearningVerdict {
  bool perfect_cost_homophily = false;
  double fixed_point_residual = 0.0;  // |mc_step(CL) - CL|_inf
  bool is_fixed_point = false;
  int probes_run = 0;
  int probes_returned = 0;
  std::optional<PchWitness> witness;
  // Filled when a witness exists.
  bool witness_breaks = false;
  double breaking_value = 0.0;
  double witness_posterior_mean = 0.0;
  double breaking_gap = 0.0;  // |mc_step(CL) - CL| at (observer, breaking value)
  bool departs = false;       // iterating from CL does not stay within tol
  bool complete_learning_stable_unique = false;
  std::string summary;
};

/// Checks complete learning against the network structure. Requires every
/// degree > 1 and check_assumption_nontrivial.
CompleteLearningVerdict verify_complete_learning(const CostValueModel& model, const ProbeOptions& options = {});

/// Friend distribution under colour-blind perfect cost homophily.
std::vector<std::vector<double>> colorblind_pch_friend_dist(const CostValueModel& model);

/// Sum over c of Pr_theta(c) h_{theta,c}(theta,c), for [green, blue].
std::array<double, 2> incidental_homophily(const CostValueModel& model);

struct HomophilyByCostRow {
  double cost = 0.0;
  double ratio = 0.0;  // Pr_g(c) / Pr_b(c), +inf when Pr_b(c) = 0
  double h_green = 0.0;
  double h_blue = 0.0;
};

struct HomophilyByCost {
  std::vector<HomophilyByCostRow> rows;
  bool lr_dominant = false;  // ratio nondecreasing in cost
  std::size_t cbar_index = 0;
  double cbar = 0.0;  // smallest cost with ratio >= 1
  /// h_green >= lambda_g and h_blue <= lambda_b exactly when ratio >= 1.
  bool threshold_equivalence = false;
  /// Under lr_dominant: h_green nondecreasing and h_blue nonincreasing.
  bool monotone = false;
};

HomophilyByCost homophily_by_cost(const CostValueModel& model);

/// The two-group model written as a cost/value model: values {0, 1}, costs
/// {-1/2, c_b, c_g} where the negative cost stands for the zero-cost members.
/// Requires c_b != c_g.
CostValueModel embed_binary_model(const ModelParams& params);
StatePolicy embed_state(const StateVector& state, const ModelParams& params);
StateVector project_state(const StatePolicy& policy, const ModelParams& params);

}  // namespace hlearn::multicost
