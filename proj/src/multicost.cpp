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

#include "hlearn/multicost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace hlearn::multicost {
namespace {

constexpr double kSumTolerance = 1e-12;

void require_distribution(const std::vector<double>& w, std::size_t n, const std::string& field) {
  if (w.size() != n) throw ParameterError(field, "expected " + std::to_string(n) + " entries");
  for (double x : w)
    if (!(x >= 0.0 && x <= 1.0)) throw ParameterError(field, "probability out of [0,1]");
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  if (std::abs(s - 1.0) > kSumTolerance) throw ParameterError(field, "does not sum to 1");
}

void require_ascending(const std::vector<double>& x, const std::string& field) {
  if (x.empty()) throw ParameterError(field, "must not be empty");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw ParameterError(field, "must be finite");
    if (i > 0 && !(x[i] > x[i - 1])) throw ParameterError(field, "must be strictly ascending");
  }
}

// Likelihood of one observation category at each value.
struct Category {
  std::size_t type;
  bool taker;
  double prob;  // per-draw probability under the true value
};

double observation_factor(const CostValueModel& m, const StatePolicy& a, std::size_t type, McOutcome o,
                          std::size_t k) {
  const double v = m.values[k];
  const double c = m.type_cost(type);
  switch (o) {
    case McOutcome::Success: return v > c ? a(type, k) : 0.0;
    case McOutcome::Failure: return v < c ? a(type, k) : 0.0;
    case McOutcome::Safe: return 1.0 - a(type, k);
  }
  return 0.0;
}

// Posterior from per-value likelihood products; log space only on underflow.
std::optional<Eigen::VectorXd> normalise(const CostValueModel& m, const Eigen::MatrixXd& factors,
                                         const std::vector<int>& counts) {
  const std::size_t nv = m.values.size();
  Eigen::VectorXd like(nv);
  bool any_positive_factor_product = false;
  for (std::size_t k = 0; k < nv; ++k) {
    double l = m.prior[k];
    bool zero = l == 0.0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] == 0) continue;
      if (factors(c, k) == 0.0) zero = true;
      l *= ipow(factors(c, k), counts[c]);
    }
    like(k) = zero ? 0.0 : l;
    any_positive_factor_product |= !zero;
  }
  if (!any_positive_factor_product) return std::nullopt;
  const double total = like.sum();
  if (total >= 1e-300) return Eigen::VectorXd(like / total);

  Eigen::VectorXd logl = Eigen::VectorXd::Constant(nv, -std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < nv; ++k) {
    if (m.prior[k] == 0.0) continue;
    double l = std::log(m.prior[k]);
    bool zero = false;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] == 0) continue;
      if (factors(c, k) == 0.0) zero = true;
      else l += counts[c] * std::log(factors(c, k));
    }
    if (!zero) logl(k) = l;
  }
  const double mx = logl.maxCoeff();
  Eigen::VectorXd w = (logl.array() - mx).exp().matrix();
  return Eigen::VectorXd(w / w.sum());
}

double posterior_mean(const CostValueModel& m, const Eigen::VectorXd& post) {
  double e = 0.0;
  for (std::size_t k = 0; k < m.values.size(); ++k) e += m.values[k] * post(k);
  return e;
}

double prior_mean(const CostValueModel& m) {
  double e = 0.0;
  for (std::size_t k = 0; k < m.values.size(); ++k) e += m.values[k] * m.prior[k];
  return e;
}

double sup_norm(const StatePolicy& a, const StatePolicy& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

void validate_model(const CostValueModel& m) {
  require_ascending(m.values, "values");
  for (double v : m.values)
    if (v < 0.0) throw ParameterError("values", "values must be nonnegative");
  require_distribution(m.prior, m.values.size(), "prior");
  require_ascending(m.costs, "costs");
  for (double c : m.costs)
    if (std::find(m.values.begin(), m.values.end(), c) != m.values.end())
      throw ParameterError("costs", "costs and values must be disjoint");
  if (!(m.lambda_g >= 0.0 && m.lambda_b >= 0.0) || std::abs(m.lambda_g + m.lambda_b - 1.0) > kSumTolerance)
    throw ParameterError("lambda", "group shares must be nonnegative and sum to 1");
  require_distribution(m.cost_dist[0], m.n_costs(), "cost_dist.green");
  require_distribution(m.cost_dist[1], m.n_costs(), "cost_dist.blue");
  for (int g = 0; g < 2; ++g) {
    const std::string name = g == 0 ? "degrees.green" : "degrees.blue";
    if (m.degrees[g].size() != m.n_costs()) throw ParameterError(name, "expected one degree per cost");
    for (int d : m.degrees[g])
      if (d < 1) throw ParameterError(name, "degree must be at least 1");
  }
  if (m.friend_dist.size() != m.n_types()) throw ParameterError("friend_dist", "expected one row per type");
  for (std::size_t i = 0; i < m.n_types(); ++i)
    require_distribution(m.friend_dist[i], m.n_types(), "friend_dist[" + std::to_string(i) + "]");
}

bool check_assumption_nontrivial(const CostValueModel& m) {
  for (double c : m.costs) {
    const bool below = std::any_of(m.values.begin(), m.values.end(), [c](double v) { return v < c; });
    const bool above = std::any_of(m.values.begin(), m.values.end(), [c](double v) { return v > c; });
    if (!below || !above) return false;
  }
  return true;
}

std::optional<Eigen::VectorXd> mc_posterior(const std::vector<FriendObservation>& profile,
                                            const CostValueModel& model, const StatePolicy& previous) {
  // Group identical observations so the likelihood uses integer powers.
  std::vector<std::pair<std::size_t, McOutcome>> keys;
  std::vector<int> counts;
  for (const auto& o : profile) {
    if (o.type >= model.n_types()) throw std::out_of_range("mc_posterior: type index out of range");
    auto it = std::find(keys.begin(), keys.end(), std::make_pair(o.type, o.outcome));
    if (it == keys.end()) {
      keys.emplace_back(o.type, o.outcome);
      counts.push_back(1);
    } else {
      ++counts[static_cast<std::size_t>(it - keys.begin())];
    }
  }
  Eigen::MatrixXd factors(static_cast<Eigen::Index>(keys.size()), static_cast<Eigen::Index>(model.values.size()));
  for (std::size_t c = 0; c < keys.size(); ++c)
    for (std::size_t k = 0; k < model.values.size(); ++k)
      factors(c, k) = observation_factor(model, previous, keys[c].first, keys[c].second, k);
  return normalise(model, factors, counts);
}

StatePolicy mc_step(const StatePolicy& policy, const CostValueModel& model) {
  const std::size_t nt = model.n_types();
  const std::size_t nv = model.values.size();
  if (static_cast<std::size_t>(policy.rows()) != nt || static_cast<std::size_t>(policy.cols()) != nv)
    throw std::invalid_argument("mc_step: policy shape does not match model");
  const double default_mean = prior_mean(model);

  StatePolicy next = StatePolicy::Zero(policy.rows(), policy.cols());
  for (std::size_t i = 0; i < nt; ++i) {
    const int d = model.type_degree(i);
    const double cost = model.type_cost(i);
    for (std::size_t k = 0; k < nv; ++k) {
      std::vector<Category> cats;
      for (std::size_t j = 0; j < nt; ++j) {
        const double h = model.friend_dist[i][j];
        if (h <= 0.0) continue;
        const double a = policy(j, k);
        if (h * a > 0.0) cats.push_back({j, true, h * a});
        if (h * (1.0 - a) > 0.0) cats.push_back({j, false, h * (1.0 - a)});
      }
      // Each category maps to a fixed observation, since the true value is v_k.
      Eigen::MatrixXd factors(static_cast<Eigen::Index>(cats.size()), static_cast<Eigen::Index>(nv));
      for (std::size_t c = 0; c < cats.size(); ++c) {
        McOutcome o = McOutcome::Safe;
        if (cats[c].taker) o = model.values[k] > model.type_cost(cats[c].type) ? McOutcome::Success : McOutcome::Failure;
        for (std::size_t kk = 0; kk < nv; ++kk) factors(c, kk) = observation_factor(model, policy, cats[c].type, o, kk);
      }

      std::vector<int> counts(cats.size(), 0);
      double risky_mass = 0.0;
      // log d! accumulated once; leaf weight = d! prod p^n / n!
      const double log_dfact = std::lgamma(d + 1.0);
      auto leaf = [&]() {
        double logw = log_dfact;
        for (std::size_t c = 0; c < cats.size(); ++c)
          if (counts[c] > 0) logw += counts[c] * std::log(cats[c].prob) - std::lgamma(counts[c] + 1.0);
        const double w = std::exp(logw);
        auto post = normalise(model, factors, counts);
        const double mean = post ? posterior_mean(model, *post) : default_mean;
        if (mean >= cost) risky_mass += w;
      };
      auto rec = [&](auto&& self, std::size_t c, int remaining) -> void {
        if (c + 1 == cats.size()) {
          counts[c] = remaining;
          leaf();
          counts[c] = 0;
          return;
        }
        for (int n = 0; n <= remaining; ++n) {
          counts[c] = n;
          self(self, c + 1, remaining - n);
        }
        counts[c] = 0;
      };
      if (cats.empty()) {
        risky_mass = default_mean >= cost ? 1.0 : 0.0;
      } else {
        rec(rec, 0, d);
      }
      next(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = std::clamp(risky_mass, 0.0, 1.0);
    }
  }
  return next;
}

StatePolicy complete_learning_policy(const CostValueModel& model) {
  StatePolicy a(static_cast<Eigen::Index>(model.n_types()), static_cast<Eigen::Index>(model.values.size()));
  for (std::size_t i = 0; i < model.n_types(); ++i)
    for (std::size_t k = 0; k < model.values.size(); ++k)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = model.type_cost(i) < model.values[k] ? 1.0 : 0.0;
  return a;
}

PchCheck is_perfect_cost_homophily(const CostValueModel& model) {
  for (std::size_t i = 0; i < model.n_types(); ++i) {
    for (std::size_t j = 0; j < model.n_types(); ++j) {
      if (!(model.friend_dist[i][j] > 0.0)) continue;
      const double lo = std::min(model.type_cost(i), model.type_cost(j));
      const double hi = std::max(model.type_cost(i), model.type_cost(j));
      for (double v : model.values)
        if (lo < v && v < hi) return {false, PchWitness{i, j, v}};
    }
  }
  return {true, std::nullopt};
}

CompleteLearningVerdict verify_complete_learning(const CostValueModel& model, const ProbeOptions& options) {
  for (int g = 0; g < 2; ++g)
    for (int d : model.degrees[g])
      if (d <= 1) throw std::domain_error("verify_complete_learning: requires every degree > 1");
  if (!check_assumption_nontrivial(model))
    throw std::domain_error("verify_complete_learning: every cost must lie strictly between two values");

  CompleteLearningVerdict out;
  const StatePolicy cl = complete_learning_policy(model);
  const StatePolicy image = mc_step(cl, model);
  out.fixed_point_residual = sup_norm(image, cl);
  out.is_fixed_point = out.fixed_point_residual <= 1e-12;

  const auto pch = is_perfect_cost_homophily(model);
  out.perfect_cost_homophily = pch.holds;
  out.witness = pch.witness;

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int probe = 0; probe < options.directions; ++probe) {
    StatePolicy dir = StatePolicy::NullaryExpr(cl.rows(), cl.cols(), [&]() { return unit(rng); });
    const double scale = dir.cwiseAbs().maxCoeff();
    if (scale > 0.0) dir /= scale;
    StatePolicy a = (cl + options.eps * dir).cwiseMax(0.0).cwiseMin(1.0);
    bool back = sup_norm(a, cl) <= options.tol;
    for (int t = 0; t < options.iterations && !back; ++t) {
      StatePolicy nxt = mc_step(a, model);
      const double moved = sup_norm(nxt, a);
      a = std::move(nxt);
      back = sup_norm(a, cl) <= options.tol;
      if (moved <= 1e-15) break;
    }
    ++out.probes_run;
    if (back) ++out.probes_returned;
  }

  if (out.witness) {
    const auto& w = *out.witness;
    const double c = model.type_cost(w.observer);
    const double c_obs = model.type_cost(w.observed);
    const int d = model.type_degree(w.observer);
    // All d friends are the observed type, acting as under complete learning.
    const McOutcome o = c_obs < w.value ? McOutcome::Success : McOutcome::Safe;
    const std::vector<FriendObservation> profile(static_cast<std::size_t>(d), FriendObservation{w.observed, o});
    const auto post = mc_posterior(profile, model, cl);
    out.witness_posterior_mean = post ? posterior_mean(model, *post) : prior_mean(model);
    const bool risky = out.witness_posterior_mean >= c;
    // The same profile arises at the witness value and at a value on the far
    // side of the observer's cost, and complete learning needs opposite
    // actions at the two.
    double breaking = w.value;
    if ((c > w.value) != risky) {
      if (c > w.value) {
        breaking = model.values.back();
      } else {
        breaking = model.values.front();
      }
    }
    out.breaking_value = breaking;
    const auto k = static_cast<Eigen::Index>(std::find(model.values.begin(), model.values.end(), breaking) -
                                             model.values.begin());
    const auto row = static_cast<Eigen::Index>(w.observer);
    out.breaking_gap = std::abs(image(row, k) - cl(row, k));
    out.witness_breaks = out.breaking_gap > 0.0;

    StatePolicy a = cl;
    for (int t = 0; t < options.iterations; ++t) {
      StatePolicy nxt = mc_step(a, model);
      const double moved = sup_norm(nxt, a);
      a = std::move(nxt);
      if (moved <= 1e-15) break;
    }
    out.departs = sup_norm(a, cl) > options.tol;
  }

  out.complete_learning_stable_unique =
      out.perfect_cost_homophily && out.is_fixed_point && out.probes_returned == out.probes_run;
  out.summary = out.complete_learning_stable_unique ? "complete learning is the stable steady state"
                                                    : "complete learning not stable-unique";
  return out;
}

std::vector<std::vector<double>> colorblind_pch_friend_dist(const CostValueModel& model) {
  const std::size_t nc = model.n_costs();
  std::vector<std::vector<double>> fd(model.n_types(), std::vector<double>(model.n_types(), 0.0));
  for (std::size_t c = 0; c < nc; ++c) {
    const double wg = model.lambda_g * model.cost_dist[0][c];
    const double wb = model.lambda_b * model.cost_dist[1][c];
    const double mass = wg + wb;
    if (!(mass > 0.0))
      throw ParameterError("cost_dist", "cost " + std::to_string(model.costs[c]) + " has zero population mass");
    for (Group g : {Group::Green, Group::Blue}) {
      auto& row = fd[model.type_index(g, c)];
      row[model.type_index(Group::Green, c)] = wg / mass;
      row[model.type_index(Group::Blue, c)] = wb / mass;
    }
  }
  return fd;
}

std::array<double, 2> incidental_homophily(const CostValueModel& model) {
  std::array<double, 2> avg{0.0, 0.0};
  for (std::size_t c = 0; c < model.n_costs(); ++c) {
    const double wg = model.lambda_g * model.cost_dist[0][c];
    const double wb = model.lambda_b * model.cost_dist[1][c];
    const double mass = wg + wb;
    if (!(mass > 0.0)) continue;  // neither group has this cost
    avg[0] += model.cost_dist[0][c] * wg / mass;
    avg[1] += model.cost_dist[1][c] * wb / mass;
  }
  return avg;
}

HomophilyByCost homophily_by_cost(const CostValueModel& model) {
  constexpr double tol = 1e-12;
  const double inf = std::numeric_limits<double>::infinity();
  HomophilyByCost out;
  for (std::size_t c = 0; c < model.n_costs(); ++c) {
    const double pg = model.cost_dist[0][c];
    const double pb = model.cost_dist[1][c];
    HomophilyByCostRow row;
    row.cost = model.costs[c];
    if (pb > 0.0) row.ratio = pg / pb;
    else if (pg > 0.0) row.ratio = inf;
    else throw ParameterError("cost_dist", "cost " + std::to_string(model.costs[c]) + " has zero population mass");
    const double mass = model.lambda_g * pg + model.lambda_b * pb;
    row.h_green = model.lambda_g * pg / mass;
    row.h_blue = model.lambda_b * pb / mass;
    out.rows.push_back(row);
  }

  out.lr_dominant = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i)
    if (out.rows[i].ratio < out.rows[i - 1].ratio) out.lr_dominant = false;

  out.cbar_index = out.rows.size();
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    if (out.rows[i].ratio >= 1.0) {
      out.cbar_index = i;
      out.cbar = out.rows[i].cost;
      break;
    }
  }
  if (out.cbar_index == out.rows.size()) out.cbar = inf;

  out.threshold_equivalence = true;
  for (const auto& r : out.rows) {
    const bool above = r.ratio >= 1.0;
    const bool green_ok = above ? r.h_green >= model.lambda_g - tol : r.h_green < model.lambda_g + tol;
    const bool blue_ok = above ? r.h_blue <= model.lambda_b + tol : r.h_blue > model.lambda_b - tol;
    if (!green_ok || !blue_ok) out.threshold_equivalence = false;
  }

  out.monotone = false;
  if (out.lr_dominant) {
    out.monotone = true;
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
      if (out.rows[i].h_green < out.rows[i - 1].h_green - tol) out.monotone = false;
      if (out.rows[i].h_blue > out.rows[i - 1].h_blue + tol) out.monotone = false;
    }
  }
  return out;
}

CostValueModel embed_binary_model(const ModelParams& params) {
  validate_params(params);
  if (params.green.cost == params.blue.cost)
    throw std::invalid_argument("embed_binary_model: requires distinct group costs");
  CostValueModel m;
  m.values = {0.0, 1.0};
  m.prior = {1.0 - params.p, params.p};
  const double zero_cost = -0.5;
  m.costs = {zero_cost, std::min(params.green.cost, params.blue.cost), std::max(params.green.cost, params.blue.cost)};
  const std::size_t g_idx = params.green.cost < params.blue.cost ? 1 : 2;
  const std::size_t b_idx = 3 - g_idx;
  m.cost_dist[0] = std::vector<double>(3, 0.0);
  m.cost_dist[1] = std::vector<double>(3, 0.0);
  m.cost_dist[0][0] = 1.0 - params.green.pi;
  m.cost_dist[0][g_idx] = params.green.pi;
  m.cost_dist[1][0] = 1.0 - params.blue.pi;
  m.cost_dist[1][b_idx] = params.blue.pi;
  m.degrees[0] = std::vector<int>(3, params.green.degree);
  m.degrees[1] = std::vector<int>(3, params.blue.degree);
  m.friend_dist.assign(6, std::vector<double>(6, 0.0));
  for (Group obs : {Group::Green, Group::Blue}) {
    const double h = params.group(obs).homophily;
    for (std::size_t c = 0; c < 3; ++c) {
      auto& row = m.friend_dist[m.type_index(obs, c)];
      for (std::size_t cc = 0; cc < 3; ++cc) {
        row[m.type_index(obs, cc)] += h * m.dist(obs)[cc];
        row[m.type_index(other(obs), cc)] += (1.0 - h) * m.dist(other(obs))[cc];
      }
    }
  }
  return m;
}

StatePolicy embed_state(const StateVector& state, const ModelParams& params) {
  const CostValueModel m = embed_binary_model(params);
  StatePolicy a = StatePolicy::Zero(static_cast<Eigen::Index>(m.n_types()), 2);
  const std::size_t g_idx = params.green.cost < params.blue.cost ? 1 : 2;
  const std::size_t b_idx = 3 - g_idx;
  for (int v = 0; v < 2; ++v) {
    a(static_cast<Eigen::Index>(m.type_index(Group::Green, 0)), v) = 1.0;
    a(static_cast<Eigen::Index>(m.type_index(Group::Blue, 0)), v) = 1.0;
    a(static_cast<Eigen::Index>(m.type_index(Group::Green, g_idx)), v) = state.taking(Group::Green, v);
    a(static_cast<Eigen::Index>(m.type_index(Group::Blue, b_idx)), v) = state.taking(Group::Blue, v);
  }
  return a;
}

StateVector project_state(const StatePolicy& a, const ModelParams& params) {
  const CostValueModel m = embed_binary_model(params);
  const std::size_t g_idx = params.green.cost < params.blue.cost ? 1 : 2;
  const std::size_t b_idx = 3 - g_idx;
  const auto gi = static_cast<Eigen::Index>(m.type_index(Group::Green, g_idx));
  const auto bi = static_cast<Eigen::Index>(m.type_index(Group::Blue, b_idx));
  return {a(gi, 0), a(gi, 1), a(bi, 0), a(bi, 1)};
}

}  // namespace hlearn::multicost
