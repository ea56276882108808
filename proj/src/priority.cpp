// Copyright 2026 The Discretion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "discretion/priority.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "discretion/errors.hpp"

namespace discretion {

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double clamp01(double p, double eps) {
  return std::min(std::max(p, eps), 1.0 - eps);
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

double pair_objective(std::span<const double> weights,
                      std::span<const PairObservation> pairs) {
  double obj = 0.0;
  for (const auto& p : pairs) {
    double delta = weights[p.first] - weights[p.second];
    // target*log(sigmoid(delta)) + (1-target)*log(1-sigmoid(delta))
    obj += p.weight * (-p.supremacy_target * softplus(-delta) -
                       (1.0 - p.supremacy_target) * softplus(delta));
  }
  return obj;
}

void pair_gradient(std::span<const double> weights,
                   std::span<const PairObservation> pairs,
                   std::span<double> grad_out) {
  std::fill(grad_out.begin(), grad_out.end(), 0.0);
  for (const auto& p : pairs) {
    double delta = weights[p.first] - weights[p.second];
    double g = p.weight * (p.supremacy_target - sigmoid(delta));
    grad_out[p.first] += g;
    grad_out[p.second] -= g;
  }
}

std::pair<std::vector<double>, FitMetadata> fit_pairs(
    std::span<const PairObservation> pairs, std::size_t n,
    const FitConfig& config) {
  std::vector<double> w(n, 0.0);
  FitMetadata meta;
  meta.seed = config.seed;

  if (pairs.empty() || n == 0) {
    meta.converged = true;
    meta.objective = 0.0;
    return {w, meta};
  }

  // Lipschitz bound on the gradient: each pair term contributes at most
  // weight/4 curvature along a direction of squared norm 2.
  double lipschitz = 0.0;
  for (const auto& p : pairs) lipschitz += p.weight * 0.5;
  const double base_step = lipschitz > 0 ? 1.0 / lipschitz : 1.0;

  std::vector<double> grad(n, 0.0);
  std::vector<double> prev_w(n, 0.0);
  std::vector<double> prev_grad(n, 0.0);
  std::vector<double> trial(n, 0.0);

  double obj = pair_objective(w, pairs);
  double grad_norm = 0.0;
  int iter = 0;
  for (; iter < config.max_iterations; ++iter) {
    pair_gradient(w, pairs, grad);
    grad_norm = l2_norm(grad);
    if (grad_norm <= config.tolerance) {
      meta.converged = true;
      break;
    }

    // Barzilai-Borwein step estimate, falling back to 1/L.
    double step = base_step;
    if (iter > 0) {
      double ss = 0.0;
      double sy = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        double s = w[k] - prev_w[k];
        double y = grad[k] - prev_grad[k];
        ss += s * s;
        sy += s * y;
      }
      // Ascent on a concave objective: s'y < 0 when curvature is present.
      if (sy < 0.0 && std::isfinite(ss / -sy)) step = ss / -sy;
    }

    prev_w = w;
    prev_grad = grad;

    // Backtrack until the objective does not decrease.
    double new_obj = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = w[k] + step * grad[k];
      new_obj = pair_objective(trial, pairs);
      if (new_obj >= obj - 1e-15 * std::abs(obj)) break;
      step *= 0.5;
    }
    w.swap(trial);
    obj = new_obj;
  }

  if (!meta.converged) {
    std::map<std::string, double> last;
    for (std::size_t k = 0; k < n; ++k) last["w" + std::to_string(k)] = w[k];
    throw ConvergenceError(
        "priority fit did not converge: gradient norm " +
            std::to_string(grad_norm) + " after " + std::to_string(iter) +
            " iterations (tolerance " + std::to_string(config.tolerance) + ")",
        std::move(last), grad_norm, iter);
  }

  // The gradient sums to zero so zero-initialized ascent stays centered;
  // re-center to flush accumulated rounding.
  double mean = std::accumulate(w.begin(), w.end(), 0.0) /
                static_cast<double>(n);
  for (double& x : w) x -= mean;

  meta.iterations = iter;
  meta.gradient_norm = grad_norm;
  meta.objective = pair_objective(w, pairs);
  return {w, meta};
}

PrinciplePartition partition_principles(const SupremacyMatrix& supremacy) {
  PrinciplePartition out;
  const std::size_t n = supremacy.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t defined = 0;
    std::int64_t saturated_high = 0;  // win_count == support
    std::int64_t saturated_low = 0;   // win_count == 0
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& cell = supremacy.at(i, j);
      if (!cell.defined()) continue;
      defined++;
      if (cell.win_count == cell.support) saturated_high++;
      if (cell.win_count == 0) saturated_low++;
    }
    const std::string& id = supremacy.principle_ids()[i];
    if (defined == 0) {
      out.no_data.push_back(id);
    } else if (saturated_high == defined) {
      out.always_top.push_back(id);
    } else if (saturated_low == defined) {
      out.always_bottom.push_back(id);
    } else {
      out.fittable.push_back(id);
    }
  }
  return out;
}

PriorityProfile fit_priorities(const SupremacyMatrix& supremacy,
                               const ConflictFrequencyMatrix& freq,
                               const FitConfig& config) {
  if (freq.principle_ids != supremacy.principle_ids())
    throw DataError(
        "supremacy and conflict-frequency matrices cover different "
        "principle sets");

  PriorityProfile profile;
  profile.partition = partition_principles(supremacy);
  profile.fit.seed = config.seed;

  const auto& fittable = profile.partition.fittable;
  if (fittable.size() < 2) {
    profile.fit.converged = true;
    return profile;
  }

  // Pair observations over the fittable subset, both directions as in the
  // joint likelihood; never-conflicting pairs contribute no term.
  std::vector<std::size_t> full_index(fittable.size());
  for (std::size_t k = 0; k < fittable.size(); ++k)
    full_index[k] = supremacy.principle_index(fittable[k]);

  std::vector<PairObservation> pairs;
  for (std::size_t a = 0; a < fittable.size(); ++a) {
    for (std::size_t b = 0; b < fittable.size(); ++b) {
      if (a == b) continue;
      const auto& cell = supremacy.at(full_index[a], full_index[b]);
      if (!cell.defined()) continue;
      PairObservation obs;
      obs.first = a;
      obs.second = b;
      obs.supremacy_target =
          clamp01(*cell.proportion(), config.epsilon_clamp);
      obs.weight = freq.freq[full_index[a]][full_index[b]];
      pairs.push_back(obs);
    }
  }

  auto [weights, meta] = fit_pairs(pairs, fittable.size(), config);
  for (std::size_t k = 0; k < fittable.size(); ++k)
    profile.weights[fittable[k]] = weights[k];
  profile.fit = meta;
  profile.fit.seed = config.seed;
  return profile;
}

std::optional<double> predicted_supremacy(const PriorityProfile& profile,
                                          const std::string& c,
                                          const std::string& c_prime) {
  if (c == c_prime)
    throw DataError("supremacy is undefined for a principle against itself");

  enum class Tier { Bottom, Finite, Top, NoData };
  auto tier_of = [&profile](const std::string& id) {
    const auto& p = profile.partition;
    if (std::find(p.always_top.begin(), p.always_top.end(), id) !=
        p.always_top.end())
      return Tier::Top;
    if (std::find(p.always_bottom.begin(), p.always_bottom.end(), id) !=
        p.always_bottom.end())
      return Tier::Bottom;
    if (profile.weights.count(id) > 0) return Tier::Finite;
    if (std::find(p.no_data.begin(), p.no_data.end(), id) != p.no_data.end())
      return Tier::NoData;
    throw DataError("principle '" + id + "' is not part of this profile");
  };

  Tier ta = tier_of(c);
  Tier tb = tier_of(c_prime);
  if (ta == Tier::NoData || tb == Tier::NoData) return std::nullopt;
  if (ta == tb && ta != Tier::Finite) return std::nullopt;
  if (ta == Tier::Top || tb == Tier::Bottom) return 1.0;
  if (ta == Tier::Bottom || tb == Tier::Top) return 0.0;
  return sigmoid(profile.weights.at(c) - profile.weights.at(c_prime));
}

}  // namespace discretion
