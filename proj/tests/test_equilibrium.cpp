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

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <random>

#include "hlearn/equilibrium.hpp"
#include "oracles.hpp"

using namespace hlearn;

namespace {

ModelParams base_params(double hg = 0.5, int dg = 2) { return {0.5, {0.8, 0.6, dg, hg}, {0.2, 0.3, 2, 1.0}}; }

// Root of f on [lo, hi] by Boost's bisection, to full double precision.
template <typename F>
double boost_root(F f, double lo, double hi) {
  auto r = boost::math::tools::bisect(f, lo, hi, boost::math::tools::eps_tolerance<double>(52));
  return 0.5 * (r.first + r.second);
}

double base_green_root(double hg, int dg) {
  const double a = (1 - hg) * 0.3, b = hg * 0.6;
  auto f = [&](double g) { return 1 - std::pow(1 - (a + b * g), dg) - g; };
  if (a == 0.0 && b * dg <= 1.0) return 0.0;
  return boost_root(f, a == 0.0 ? 1e-3 : 0.0, 1.0);
}

SteadyStateReport stable_point(const ModelParams& P) { return select_stable(find_steady_states(P)); }

Eigen::Matrix2d fd_jacobian(const StateVector& s, const ModelParams& P, int v, double h = 1e-6) {
  Eigen::Matrix2d j;
  for (int col = 0; col < 2; ++col) {
    const Group target = col == 0 ? Group::Green : Group::Blue;
    StateVector up = s, dn = s;
    up.taking(target, v) += h;
    dn.taking(target, v) -= h;
    const auto fu = step_general(up, P), fd = step_general(dn, P);
    j(0, col) = (fu.taking(Group::Green, v) - fd.taking(Group::Green, v)) / (2 * h);
    j(1, col) = (fu.taking(Group::Blue, v) - fd.taking(Group::Blue, v)) / (2 * h);
  }
  return j;
}

}  // namespace

TEST(SolveSteadyState, BaselineExample) {
  const auto rep = solve_steady_state(base_params(), default_state(base_params()));
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(rep.residual, 1e-12);
  EXPECT_NEAR(rep.state.g1, base_green_root(0.5, 2), 1e-12);
  EXPECT_NEAR(rep.state.g1, 0.5172, 5e-5);
  EXPECT_EQ(rep.state.g0, 0.0);
  EXPECT_EQ(rep.state.b1, 1.0);
  EXPECT_NEAR(rep.state.b0, 0.49, 1e-15);
  EXPECT_TRUE(rep.simplified_applicable);
  EXPECT_TRUE(rep.refined_by_bisection);
  EXPECT_EQ(rep.stability, Stability::Stable);
  EXPECT_EQ(rep.probes_returned, kProbeDirections);
}

TEST(SolveSteadyState, BlueSafeComponentFollowsBlueHomophily) {
  ModelParams P = base_params();
  P.blue.homophily = 0.6;
  P.blue.cost = 1e-6;
  const auto rep = solve_steady_state(P, default_state(P));
  EXPECT_TRUE(rep.converged);
  EXPECT_NEAR(rep.state.b0, 0.6724, 1e-12);
  EXPECT_NEAR(rep.state.g1, base_green_root(0.5, 2), 1e-12);
}

TEST(SolveSteadyState, ZeroInformationCorner) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 50; ++i) {
    ModelParams P = oracle::random_params(rng, 4);
    P.green.pi = P.blue.pi = 0.0;
    const auto rep = solve_steady_state(P, oracle::random_state(rng));
    EXPECT_EQ(rep.state, default_state(P));
    EXPECT_TRUE(rep.degenerate_pi);
  }
}

TEST(SolveSteadyState, RelabelingEquivariance) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 60; ++i) {
    const auto P = oracle::random_split_params(rng, 4);
    const auto init = oracle::random_state(rng);
    const auto a = solve_steady_state(P, init);
    const auto b = solve_steady_state(swap_groups(P), swap_groups(init));
    EXPECT_LE(sup_distance(a.state, swap_groups(b.state)), 1e-12);
    EXPECT_EQ(a.stability, b.stability);
    EXPECT_NEAR(a.spectral_radius, b.spectral_radius, 1e-9);
  }
}

TEST(SolveSteadyState, RejectsBadDamping) {
  SolverOptions o;
  o.damping = 0.0;
  EXPECT_THROW(solve_steady_state(base_params(), StateVector{}, o), std::invalid_argument);
}

TEST(SolveSteadyState, DampingReachesSamePoint) {
  SolverOptions o;
  o.damping = 0.5;
  const auto rep = solve_steady_state(base_params(0.3, 4), default_state(base_params()), o);
  EXPECT_TRUE(rep.converged);
  EXPECT_NEAR(rep.state.g1, base_green_root(0.3, 4), 1e-12);
}

TEST(FullHomophily, ClosedFormExamples) {
  auto low = full_homophily_steady_states(GroupParams{0.3, 0.5, 2, 1.0}, 0.5);
  ASSERT_EQ(low.size(), 1u);
  EXPECT_DOUBLE_EQ(low[0].g0, 0.25);
  EXPECT_EQ(low[0].g1, 1.0);

  auto weak = full_homophily_steady_states(GroupParams{0.8, 0.3, 3, 1.0}, 0.5);
  ASSERT_EQ(weak.size(), 1u);
  EXPECT_EQ(weak[0].g1, 0.0);
  EXPECT_EQ(weak[0].stability, Stability::Stable);

  auto strong = full_homophily_steady_states(GroupParams{0.8, 0.6, 3, 1.0}, 0.5);
  ASSERT_EQ(strong.size(), 2u);
  EXPECT_EQ(strong[0].g1, 0.0);
  EXPECT_EQ(strong[0].stability, Stability::Unstable);
  EXPECT_NEAR(strong[1].g1, 0.9043, 5e-5);
  EXPECT_NEAR(strong[1].g1, boost_root([](double g) { return 1 - std::pow(1 - 0.6 * g, 3) - g; }, 0.5, 1.0), 1e-12);
  EXPECT_EQ(strong[1].stability, Stability::Stable);
}

TEST(FullHomophily, Errors) {
  EXPECT_THROW(full_homophily_steady_states(GroupParams{0.8, 1.0, 1, 1.0}, 0.5), std::domain_error);
  EXPECT_THROW(full_homophily_steady_states(GroupParams{0.8, 0.5, 2, 0.9}, 0.5), RegimeMismatch);
}

TEST(FullHomophily, SolverAgreesWithClosedForms) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 100; ++i) {
    ModelParams P = oracle::random_params(rng, 6);
    P.green.homophily = P.blue.homophily = 1.0;
    P.green.pi = oracle::uniform(rng, 0.05, 0.95);
    P.blue.pi = oracle::uniform(rng, 0.05, 0.95);
    const auto reports = find_steady_states(P);
    for (Group g : {Group::Green, Group::Blue}) {
      const auto closed = full_homophily_steady_states(P.group(g), P.p);
      for (const auto& c : closed) {
        const bool found = std::any_of(reports.begin(), reports.end(), [&](const SteadyStateReport& r) {
          return std::abs(r.state.taking(g, 0) - c.g0) <= 1e-9 && std::abs(r.state.taking(g, 1) - c.g1) <= 1e-9;
        });
        EXPECT_TRUE(found) << "group " << to_string(g) << " closed-form point (" << c.g0 << ", " << c.g1 << ")";
      }
    }
  }
}

TEST(Jacobian, BaselineGreenPartial) {
  const double g = base_green_root(0.5, 2);
  const StateVector s{0, g, 0.49, 1};
  const auto j = jacobian_v1(s, base_params());
  const double A = 0.3 * g + 0.15;
  EXPECT_NEAR(j(0, 0), 2 * (1 - A) * 0.3, 1e-13);
  EXPECT_NEAR(j(0, 0), 0.4169, 1e-4);
  EXPECT_NEAR(j(0, 1), 2 * (1 - A) * 0.5 * 0.3, 1e-13);
  // Below b(1) = 1 a safe blue friend signals v = 0, so the general map
  // has a one-sided slope d_b h_b pi_b (1 - h_b pi_b)^(d_b - 1) there.
  EXPECT_EQ(j(1, 0), 0.0);
  EXPECT_NEAR(j(1, 1), 2 * 0.3 * 0.7, 1e-15);
  EXPECT_NEAR(spectral_radius(j), 0.42, 1e-12);
}

TEST(Jacobian, SimplifiedBlueRowIsConstant) {
  const double g = base_green_root(0.5, 2);
  const StateVector s{0, g, 0.49, 1};
  const double h = 1e-6;
  for (int col = 0; col < 2; ++col) {
    StateVector up = s, dn = s;
    (col == 0 ? up.g1 : up.b1) += col == 0 ? h : 0.0;
    (col == 0 ? dn.g1 : dn.b1) -= h;
    const auto fu = step_simplified(up, base_params()), fd = step_simplified(dn, base_params());
    EXPECT_EQ(fu.b1, 1.0);
    EXPECT_EQ(fd.b1, 1.0);
  }
}

TEST(Jacobian, MatchesFiniteDifferencesAtRegularPoints) {
  std::mt19937_64 rng(44);
  int checked = 0;
  while (checked < 200) {
    const auto P = oracle::random_params(rng, 4);
    const StateVector s{oracle::uniform(rng, 0.01, 0.99), oracle::uniform(rng, 0.01, 0.99),
                        oracle::uniform(rng, 0.01, 0.99), oracle::uniform(rng, 0.01, 0.99)};
    if (indicator_margin(s, P) < 1e-3) continue;
    ++checked;
    const Eigen::Matrix2d j1 = jacobian_v1(s, P), j0 = jacobian_v0(s, P);
    EXPECT_LE((j1 - fd_jacobian(s, P, 1)).cwiseAbs().maxCoeff(), 1e-5);
    EXPECT_LE((j0 - fd_jacobian(s, P, 0)).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(Jacobian, HomophilyPartialMatchesFiniteDifference) {
  std::mt19937_64 rng(45);
  int checked = 0;
  while (checked < 100) {
    auto P = oracle::random_params(rng, 4);
    P.green.homophily = oracle::uniform(rng, 0.05, 0.95);
    const auto s = oracle::random_state(rng);
    if (indicator_margin(s, P) < 1e-3) continue;
    ++checked;
    const double h = 1e-6;
    ModelParams up = P, dn = P;
    up.green.homophily += h;
    dn.green.homophily -= h;
    const double fd = (step_general(s, up).g1 - step_general(s, dn).g1) / (2 * h);
    EXPECT_NEAR(green_update_homophily_partial(s, P), fd, 1e-6);
  }
}

TEST(Jacobian, SimplifiedHomophilyPartialClosedForm) {
  // d g'/d h_g = d (1 - A)^(d-1) (pi_g g - pi_b b) in the simplified regime
  for (int dg : {1, 2, 4, 8}) {
    const double g = base_green_root(0.4, dg);
    const double A = 0.4 * 0.6 * g + 0.6 * 0.3;
    EXPECT_NEAR(green_update_homophily_partial(StateVector{0, g, 0.49, 1}, base_params(0.4, dg)),
                dg * std::pow(1 - A, dg - 1) * (0.6 * g - 0.3), 1e-13);
  }
}

TEST(Stability, FullHomophilyZeroIsUnstable) {
  ModelParams P = base_params(1.0, 3);
  const auto reports = find_steady_states(P);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].state.g1, 0.0);
  EXPECT_EQ(reports[0].stability, Stability::Unstable);
  EXPECT_NEAR(reports[0].spectral_radius, 0.6 * 3, 1e-12);
  EXPECT_LT(reports[0].probes_returned, kProbeDirections);
  EXPECT_NEAR(reports[1].state.g1, 0.9043, 5e-5);
  EXPECT_EQ(reports[1].stability, Stability::Stable);
  EXPECT_EQ(&select_stable(reports), &reports[1]);
}

TEST(Stability, ClassificationBands) {
  SteadyStateReport r;
  r.spectral_radius = 1.0 - 2e-6;
  EXPECT_EQ(classify_stability(r), Stability::Stable);
  r.spectral_radius = 1.0;
  EXPECT_EQ(classify_stability(r), Stability::Marginal);
  r.spectral_radius = 1.0 + 2e-6;
  EXPECT_EQ(classify_stability(r), Stability::Unstable);
  r.regular = false;
  EXPECT_EQ(classify_stability(r), Stability::NonRegular);
}

TEST(Stability, NonRegularWhenPosteriorHitsCost) {
  // One safe green friend at g(1) = 0.5, g(0) = 0 gives a blue posterior of
  // exactly 1/3 with p = 0.5.
  ModelParams P{0.5, {0.8, 0.6, 2, 0.5}, {1.0 / 3.0, 0.3, 1, 0.0}};
  const StateVector s{0, 0.5, 0.49, 1};
  EXPECT_LE(indicator_margin(s, P), 1e-15);
  SteadyStateReport r;
  r.regular = indicator_margin(s, P) > kRegularityTolerance;
  EXPECT_EQ(classify_stability(r), Stability::NonRegular);
}

TEST(Stability, MMatrixAtStablePoints) {
  std::mt19937_64 rng(46);
  int checked = 0;
  for (int i = 0; i < 400 && checked < 100; ++i) {
    const auto P = oracle::random_split_params(rng, 4);
    for (const auto& rep : find_steady_states(P)) {
      if (rep.stability != Stability::Stable || !rep.converged) continue;
      ++checked;
      EXPECT_GE(rep.jacobian.minCoeff(), 0.0);
      // More safe-state takers means more visible failures, so the v = 0
      // block can only push the other way.
      EXPECT_LE(rep.jacobian_v0.maxCoeff(), 0.0);
      const Eigen::Matrix2d inv = (Eigen::Matrix2d::Identity() - rep.jacobian).inverse();
      EXPECT_GE(inv.minCoeff(), 0.0);
      EXPECT_GT(inv(0, 0), 0.0);
      EXPECT_GT(inv(1, 1), 0.0);
      EXPECT_EQ(rep.probes_returned, kProbeDirections);
    }
  }
  EXPECT_GE(checked, 50);
}

TEST(HomophilySensitivity, ZeroSignOnBoundary) {
  SteadyStateReport r;
  r.state = {0, 0.5, 0.49, 1};
  r.stability = Stability::Unstable;
  EXPECT_EQ(homophily_sensitivity(r, base_params()).sign, Sign::Zero);
}

TEST(HomophilySensitivity, BaselineDegreeOneIsNegative) {
  for (double hg : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
    const auto rep = stable_point(base_params(hg, 1));
    const auto s = homophily_sensitivity(rep, base_params(hg, 1));
    EXPECT_EQ(s.sign, Sign::Negative) << hg;
    EXPECT_EQ(s.fd_sign, Sign::Negative) << hg;
  }
}

TEST(HomophilySensitivity, BaselineDegreeFourIsPositive) {
  for (double hg : {0.0, 0.2, 0.5, 0.8, 1.0}) {
    const auto rep = stable_point(base_params(hg, 4));
    const auto s = homophily_sensitivity(rep, base_params(hg, 4));
    EXPECT_EQ(s.sign, Sign::Positive) << hg;
    EXPECT_EQ(s.fd_sign, Sign::Positive) << hg;
    EXPECT_TRUE(s.agree) << hg << " ift " << s.ift << " fd " << s.finite_difference;
  }
}

TEST(HomophilySensitivity, IftAgreesWithResolve) {
  std::mt19937_64 rng(47);
  int checked = 0;
  for (int i = 0; i < 1000 && checked < 100; ++i) {
    auto P = oracle::random_split_params(rng, 4);
    P.green.homophily = oracle::uniform(rng, 0.01, 0.99);
    const auto rep = stable_point(P);
    if (!rep.converged || rep.stability != Stability::Stable || rep.indicator_margin < 1e-3) continue;
    ++checked;
    const auto s = homophily_sensitivity(rep, P);
    EXPECT_FALSE(s.flagged);
    EXPECT_TRUE(s.agree) << "ift " << s.ift << " fd " << s.finite_difference;
  }
  EXPECT_GE(checked, 50);
}

TEST(DegreeThreshold, Examples) {
  EXPECT_NEAR(degree_threshold(0.6, 0.3), std::log(0.5) / std::log(0.7), 1e-15);
  EXPECT_NEAR(degree_threshold(0.6, 0.3), 1.9434, 1e-4);
  EXPECT_TRUE(std::isinf(degree_threshold(0.3, 0.3)));
  EXPECT_TRUE(std::isinf(degree_threshold(0.2, 0.3)));
  EXPECT_THROW(degree_threshold(0.6, 0.0), std::domain_error);
  EXPECT_THROW(degree_threshold(0.6, 1.0), std::domain_error);
}

TEST(DegreeThreshold, SignFlipsAcrossThreshold) {
  const double dbar = degree_threshold(0.6, 0.3);
  for (int dg : {1, 2, 3}) {
    const auto rep = stable_point(base_params(0.5, dg));
    EXPECT_EQ(rep.hg_sensitivity_sign, dg > dbar ? Sign::Positive : Sign::Negative) << dg;
  }
}

TEST(Sweep, BaselineGridShape) {
  SweepGrid grid;
  for (int k = 0; k <= 10; ++k) grid.hg.push_back(k / 10.0);
  grid.dg = {1, 2, 4, 8};
  const auto table = sweep(grid, base_params());
  ASSERT_EQ(table.rows.size(), 44u);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    EXPECT_EQ(row.dg, grid.dg[i / 11]);
    EXPECT_EQ(row.hg, grid.hg[i % 11]);
    EXPECT_TRUE(row.ok) << row.error;
    EXPECT_TRUE(row.report.simplified_applicable);
    EXPECT_NEAR(row.report.state.g1, base_green_root(row.hg, row.dg), 1e-10);
  }
  for (std::size_t d = 0; d < 4; ++d) {
    for (std::size_t k = 1; k < 11; ++k) {
      const double prev = table.rows[d * 11 + k - 1].report.state.g1;
      const double cur = table.rows[d * 11 + k].report.state.g1;
      if (grid.dg[d] == 1) EXPECT_LT(cur, prev - 1e-9);
      else EXPECT_GT(cur, prev + 1e-9);
    }
  }
}

TEST(Sweep, RecordsRowFailures) {
  const auto table = sweep(SweepGrid{{0.5, 1.5}, {2}}, base_params());
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_TRUE(table.rows[0].ok);
  EXPECT_FALSE(table.rows[1].ok);
  EXPECT_NE(table.rows[1].error.find("homophily"), std::string::npos);
}

TEST(BisectDescending, FindsRoot) {
  const double r = bisect_descending([](double x) { return 0.3 - x * x; }, 0.0, 1.0);
  EXPECT_NEAR(r, std::sqrt(0.3), 1e-15);
}
