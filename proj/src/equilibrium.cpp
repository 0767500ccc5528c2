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

#include "hlearn/equilibrium.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace hlearn {

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "Stable";
    case Stability::Unstable: return "Unstable";
    case Stability::Marginal: return "Marginal";
    case Stability::NonRegular: return "NonRegular";
  }
  return "?";
}

const char* to_string(Sign s) {
  switch (s) {
    case Sign::Negative: return "Negative";
    case Sign::Zero: return "Zero";
    case Sign::Positive: return "Positive";
  }
  return "?";
}

namespace {

constexpr Group kRows[2] = {Group::Green, Group::Blue};

Sign sign_of(double x, double zero_band) {
  if (x > zero_band) return Sign::Positive;
  if (x < -zero_band) return Sign::Negative;
  return Sign::Zero;
}

StateVector clamp_state(const StateVector& s) {
  return StateVector::from_vector(s.vector().cwiseMax(0.0).cwiseMin(1.0));
}

double residual_of(const StateVector& x, const ModelParams& params) {
  return sup_distance(step_general(x, params), x);
}

// Maps a state between the caller's labels and labels where green is the
// high-cost group.
StateVector to_split_labels(const StateVector& s, const RegimeInfo& r) { return r.relabeled() ? swap_groups(s) : s; }

}  // namespace

// ---------------------------------------------------------------------------
// Derivatives

Eigen::Matrix2d jacobian_v1(const StateVector& state, const ModelParams& params) {
  Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
  for (int row = 0; row < 2; ++row) {
    const Group obs = kRows[row];
    for (const auto& t : enumerate_tallies(params.group(obs).degree)) {
      if (decide_tally(t, params, state, obs) == Action::Risky) continue;
      j(row, 0) -= profile_probability_derivative(t, params, state, obs, 1, Wrt::GreenTaking);
      j(row, 1) -= profile_probability_derivative(t, params, state, obs, 1, Wrt::BlueTaking);
    }
  }
  return j;
}

Eigen::Matrix2d jacobian_v0(const StateVector& state, const ModelParams& params) {
  Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
  for (int row = 0; row < 2; ++row) {
    const Group obs = kRows[row];
    for (const auto& t : enumerate_tallies(params.group(obs).degree)) {
      if (decide_tally(t, params, state, obs) == Action::Safe) continue;
      j(row, 0) += profile_probability_derivative(t, params, state, obs, 0, Wrt::GreenTaking);
      j(row, 1) += profile_probability_derivative(t, params, state, obs, 0, Wrt::BlueTaking);
    }
  }
  return j;
}

double green_update_homophily_partial(const StateVector& state, const ModelParams& params) {
  double d = 0.0;
  for (const auto& t : enumerate_tallies(params.green.degree)) {
    if (decide_tally(t, params, state, Group::Green) == Action::Risky) continue;
    d -= profile_probability_derivative(t, params, state, Group::Green, 1, Wrt::ObserverHomophily);
  }
  return d;
}

double indicator_margin(const StateVector& state, const ModelParams& params) {
  double margin = std::numeric_limits<double>::infinity();
  for (const Group obs : kRows) {
    for (const auto& t : enumerate_tallies(params.group(obs).degree)) {
      if (profile_probability(t, params, state, obs, 0) <= 0.0 && profile_probability(t, params, state, obs, 1) <= 0.0)
        continue;
      if (auto b = posterior(t, params, state, obs))
        margin = std::min(margin, std::abs(b->value - params.group(obs).cost));
    }
  }
  return margin;
}

double spectral_radius(const Eigen::Matrix2d& m) {
  Eigen::EigenSolver<Eigen::Matrix2d> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Stability classify_stability(const SteadyStateReport& report) {
  if (!report.regular) return Stability::NonRegular;
  if (report.spectral_radius < 1.0 - kMarginBand) return Stability::Stable;
  if (report.spectral_radius > 1.0 + kMarginBand) return Stability::Unstable;
  return Stability::Marginal;
}

int probe_stability(const StateVector& fixed_point, const ModelParams& params, double eps, int iterations) {
  int returned = 0;
  for (int axis = 0; axis < 4; ++axis) {
    for (const double dir : {1.0, -1.0}) {
      Eigen::Vector4d x = fixed_point.vector();
      x(axis) += dir * eps;
      StateVector y = clamp_state(StateVector::from_vector(x));
      for (int it = 0; it < iterations; ++it) {
        if (sup_distance(y, fixed_point) <= 1e-7) {
          ++returned;
          break;
        }
        const StateVector next = step_general(y, params);
        if (sup_distance(next, y) <= 1e-15) break;  // settled somewhere else
        y = next;
      }
    }
  }
  return returned;
}

// ---------------------------------------------------------------------------
// Solvers

double bisect_descending(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

// Bisection on g = Gamma(g) for the closed-form green update, then rebuild
// the remaining components of the simplified steady state.
std::optional<StateVector> refine_simplified(const StateVector& x, const ModelParams& params) {
  const RegimeInfo r = classify_regime(params);
  if (r.tag != Regime::Split) return std::nullopt;
  const ModelParams np = r.relabeled() ? swap_groups(params) : params;
  const StateVector xs = to_split_labels(x, r);
  if (std::abs(xs.g0) > 1e-9 || std::abs(xs.b1 - 1.0) > 1e-9) return std::nullopt;

  auto gamma = [&](double g) { return step_simplified(StateVector{0.0, g, 0.0, 1.0}, np).g1; };
  double g = 0.0;
  if (gamma(0.0) > 0.0 || xs.g1 > 1e-9) g = bisect_descending([&](double y) { return gamma(y) - y; }, 0.0, 1.0);
  StateVector cand{0.0, g, ipow(1.0 - np.blue.homophily * np.blue.pi, np.blue.degree), 1.0};
  if (!check_simplified_applicable(cand, np)) return std::nullopt;
  return to_split_labels(cand, r);
}

}  // namespace

SteadyStateReport solve_steady_state(const ModelParams& params, const StateVector& initial,
                                     const SolverOptions& options) {
  validate_params(params);
  if (!(options.damping > 0.0 && options.damping <= 1.0))
    throw std::invalid_argument("solve_steady_state: damping must be in (0, 1]");

  SteadyStateReport rep;
  rep.regime = classify_regime(params);
  rep.degenerate_pi = params.green.pi == 0.0 || params.blue.pi == 0.0;

  StateVector x = clamp_state(initial);
  double prev_diff = std::numeric_limits<double>::infinity();
  bool settled = false;
  long it = 0;
  while (it < options.max_iter) {
    ++it;
    StateVector y = step_general(x, params);
    if (options.damping != 1.0)
      y = StateVector::from_vector((1.0 - options.damping) * x.vector() + options.damping * y.vector());
    const double diff = sup_distance(y, x);
    x = y;
    if (diff == 0.0) {
      settled = true;
      break;
    }
    if (diff <= options.tol) {
      // Geometric tail estimate of the remaining distance to the fixed point.
      const double ratio = diff / prev_diff;
      const bool tail_ok = ratio < 1.0 ? diff * ratio / (1.0 - ratio) <= options.tol : diff <= 1e-3 * options.tol;
      if (tail_ok) {
        settled = true;
        break;
      }
    }
    prev_diff = diff;
  }
  rep.iterations = it;

  double residual = residual_of(x, params);
  if (auto refined = refine_simplified(x, params)) {
    const double r2 = residual_of(*refined, params);
    if (r2 <= std::max(residual, options.tol)) {
      x = *refined;
      residual = r2;
      rep.refined_by_bisection = true;
    }
  }

  rep.state = x;
  rep.residual = residual;
  rep.converged = residual <= options.tol || (settled && residual <= 10.0 * options.tol);
  {
    const RegimeInfo& r = rep.regime;
    rep.simplified_applicable =
        r.tag == Regime::Split &&
        check_simplified_applicable(to_split_labels(x, r), r.relabeled() ? swap_groups(params) : params);
  }

  rep.jacobian = jacobian_v1(x, params);
  rep.jacobian_v0 = jacobian_v0(x, params);
  rep.spectral_radius = std::max(spectral_radius(rep.jacobian), spectral_radius(rep.jacobian_v0));
  rep.indicator_margin = indicator_margin(x, params);
  rep.regular = rep.indicator_margin > kRegularityTolerance;
  rep.stability = classify_stability(rep);
  rep.probes_returned = probe_stability(x, params);
  rep.hg_sensitivity_sign = sign_of(params.green.pi * x.g1 - params.blue.pi * x.b1, 1e-12);
  return rep;
}

std::vector<SteadyStateReport> find_steady_states(const ModelParams& params, const SolverOptions& options) {
  const StateVector low = default_state(params);
  StateVector high = low;
  high.g1 = 1.0;
  high.b1 = 1.0;
  std::vector<SteadyStateReport> out;
  for (const auto& seed : {low, high}) {
    auto rep = solve_steady_state(params, seed, options);
    const bool dup = std::any_of(out.begin(), out.end(),
                                 [&](const SteadyStateReport& r) { return sup_distance(r.state, rep.state) <= 1e-8; });
    if (!dup) out.push_back(std::move(rep));
  }
  return out;
}

const SteadyStateReport& select_stable(const std::vector<SteadyStateReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("select_stable: no reports");
  const SteadyStateReport* best = nullptr;
  for (const auto& r : reports)
    if (r.converged && r.stability == Stability::Stable && (!best || r.state.g1 > best->state.g1)) best = &r;
  return best ? *best : reports.front();
}

std::vector<FullHomophilySteadyState> full_homophily_steady_states(const GroupParams& group, double p) {
  if (group.homophily != 1.0) throw RegimeMismatch("full_homophily_steady_states: requires homophily == 1");
  if (group.pi == 1.0 && group.degree == 1)
    throw std::domain_error("full_homophily_steady_states: continuum of steady states (pi = d = 1)");
  if (group.cost <= p) return {{ipow(1.0 - group.pi, group.degree), 1.0, Stability::Stable}};
  const double slope_at_zero = group.pi * group.degree;
  if (slope_at_zero <= 1.0) return {{0.0, 0.0, Stability::Stable}};
  auto f = [&](double g) { return 1.0 - ipow(1.0 - group.pi * g, group.degree) - g; };
  const double g_star = bisect_descending(f, 0.0, 1.0);
  return {{0.0, 0.0, Stability::Unstable}, {0.0, g_star, Stability::Stable}};
}

// ---------------------------------------------------------------------------
// Comparative statics

HomophilySensitivity homophily_sensitivity(const SteadyStateReport& report, const ModelParams& params,
                                           const SolverOptions& options, double step) {
  HomophilySensitivity out;
  const StateVector& x = report.state;
  out.sign = sign_of(params.green.pi * x.g1 - params.blue.pi * x.b1, 1e-12);
  out.flagged = !(report.regular && report.stability == Stability::Stable);

  if (!out.flagged) {
    const Eigen::Matrix2d a = Eigen::Matrix2d::Identity() - report.jacobian;
    const Eigen::Vector2d rhs(green_update_homophily_partial(x, params), 0.0);
    out.ift = a.inverse().row(0).dot(rhs);
  }

  auto resolve = [&](double h) {
    ModelParams q = params;
    q.green.homophily = h;
    return solve_steady_state(q, x, options).state.g1;
  };
  const double h = params.green.homophily;
  const double up = std::min(1.0, h + step);
  const double down = std::max(0.0, h - step);
  const double g_up = up == h ? x.g1 : resolve(up);
  const double g_down = down == h ? x.g1 : resolve(down);
  out.finite_difference = (g_up - g_down) / (up - down);
  out.fd_sign = sign_of(out.finite_difference, 1e-12);
  out.agree = !out.flagged && std::abs(out.ift - out.finite_difference) <=
                                  std::max(1e-4, 0.01 * std::abs(out.finite_difference));
  return out;
}

double degree_threshold(double pi_g, double pi_b) {
  if (!(pi_b > 0.0 && pi_b < 1.0)) throw std::domain_error("degree_threshold: pi_b must lie in (0,1)");
  if (pi_g <= pi_b) return std::numeric_limits<double>::infinity();
  return std::log((pi_g - pi_b) / pi_g) / std::log(1.0 - pi_b);
}

SweepTable sweep(const SweepGrid& grid, const ModelParams& base, const SolverOptions& options) {
  SweepTable table{grid, {}};
  for (const int dg : grid.dg)
    for (const double hg : grid.hg) table.rows.push_back({hg, dg, {}, false, {}});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < table.rows.size(); i = next++) {
      SweepRow& row = table.rows[i];
      try {
        ModelParams q = base;
        q.green.homophily = row.hg;
        q.green.degree = row.dg;
        validate_params(q);
        row.report = select_stable(find_steady_states(q, options));
        row.ok = row.report.converged;
        if (!row.ok) row.error = "not converged";
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                     static_cast<unsigned>(table.rows.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return table;
}

}  // namespace hlearn
