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

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hlearn/dynamics.hpp"
#include "hlearn/model.hpp"

namespace hlearn {

enum class Stability { Stable, Unstable, Marginal, NonRegular };
enum class Sign { Negative, Zero, Positive };

const char* to_string(Stability s);
const char* to_string(Sign s);

struct SolverOptions {
  double tol = 1e-12;
  long max_iter = 1'000'000;
  /// x <- (1 - damping) x + damping * step(x)
  double damping = 1.0;
};

/// Half-width of the band around spectral radius 1 reported as Marginal.
inline constexpr double kMarginBand = 1e-6;
/// On-path posteriors closer than this to the cost make a point non-regular.
inline constexpr double kRegularityTolerance = 1e-12;

struct SteadyStateReport {
  StateVector state;
  double residual = 0.0;  // |step_general(state) - state|_inf
  bool converged = false;
  long iterations = 0;
  bool refined_by_bisection = false;

  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();     // v = 1 block, (g1, b1)
  Eigen::Matrix2d jacobian_v0 = Eigen::Matrix2d::Zero();  // v = 0 block, (g0, b0)
  double spectral_radius = 0.0;                           // over both blocks
  double indicator_margin = 0.0;
  bool regular = true;
  Stability stability = Stability::Stable;
  int probes_returned = 0;  // of kProbeDirections

  Sign hg_sensitivity_sign = Sign::Zero;
  RegimeInfo regime;
  bool simplified_applicable = false;
  /// Some group has pi == 0 and never produces informative members.
  bool degenerate_pi = false;
};

inline constexpr int kProbeDirections = 8;

/// Partial derivatives of the v = 1 update, rows (g'(1), b'(1)) and columns
/// (g(1), b(1)), holding every decision locally fixed.
Eigen::Matrix2d jacobian_v1(const StateVector& state, const ModelParams& params);
Eigen::Matrix2d jacobian_v0(const StateVector& state, const ModelParams& params);

/// d step_general(state)(g1) / d h_g with decisions held fixed.
double green_update_homophily_partial(const StateVector& state, const ModelParams& params);

/// Smallest |posterior - cost| over every tally reachable in either state,
/// for both groups.
double indicator_margin(const StateVector& state, const ModelParams& params);

double spectral_radius(const Eigen::Matrix2d& m);

/// Classification from the spectral radius and regularity already stored in
/// `report`.
Stability classify_stability(const SteadyStateReport& report);

/// Number of the 8 axis perturbations (+-eps along each coordinate) from
/// which step_general returns within 1e-7 of `fixed_point`.
int probe_stability(const StateVector& fixed_point, const ModelParams& params, double eps = 1e-3,
                    int iterations = 10'000);

/// Fixed point of step_general reached from `initial`, refined by bisection
/// on the closed-form green equation when the simplified regime applies.
SteadyStateReport solve_steady_state(const ModelParams& params, const StateVector& initial,
                                     const SolverOptions& options = {});

/// Every distinct fixed point reached from the default profile and from the
/// high-adoption profile (g(1) = b(1) = 1), deduplicated at 1e-8.
std::vector<SteadyStateReport> find_steady_states(const ModelParams& params, const SolverOptions& options = {});

/// The converged stable report with the largest g(1), or the first report if
/// there is none.
const SteadyStateReport& select_stable(const std::vector<SteadyStateReport>& reports);

struct FullHomophilySteadyState {
  double g0 = 0.0;
  double g1 = 0.0;
  Stability stability = Stability::Stable;
};

/// Closed-form steady states of one group with h = 1.
std::vector<FullHomophilySteadyState> full_homophily_steady_states(const GroupParams& group, double p);

/// Largest x in (lo, hi] with f > 0 on (lo, x), given f(hi) <= 0.
double bisect_descending(const std::function<double(double)>& f, double lo, double hi);

struct HomophilySensitivity {
  Sign sign = Sign::Zero;     // sign(pi_g g*(1) - pi_b b*(1))
  double ift = 0.0;           // implicit-function estimate of d g*(1) / d h_g
  double finite_difference = 0.0;
  Sign fd_sign = Sign::Zero;
  bool agree = false;
  bool flagged = false;  // report not stable and regular; only the re-solve is meaningful
};

HomophilySensitivity homophily_sensitivity(const SteadyStateReport& report, const ModelParams& params,
                                           const SolverOptions& options = {}, double step = 1e-4);

/// Degree above which more green homophily raises g*(1) in the simplified
/// regime; +infinity when pi_g <= pi_b.
double degree_threshold(double pi_g, double pi_b);

struct SweepGrid {
  std::vector<double> hg;
  std::vector<int> dg;
};

struct SweepRow {
  double hg = 0.0;
  int dg = 1;
  SteadyStateReport report;
  bool ok = false;
  std::string error;
};

struct SweepTable {
  SweepGrid grid;
  std::vector<SweepRow> rows;  // dg-major, then hg, in grid order
};

SweepTable sweep(const SweepGrid& grid, const ModelParams& base, const SolverOptions& options = {});

}  // namespace hlearn
