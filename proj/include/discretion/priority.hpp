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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "discretion/metrics.hpp"

namespace discretion {

struct FitConfig {
  double tolerance = 1e-8;      // L2 gradient norm at convergence
  int max_iterations = 10000;
  double epsilon_clamp = 1e-6;  // saturated targets clamped to [eps, 1-eps]
  std::uint64_t seed = 0;       // recorded in metadata; the fit is
                                // deterministic (zero initialization)
};

struct FitMetadata {
  int iterations = 0;
  double gradient_norm = 0.0;
  double objective = 0.0;
  std::uint64_t seed = 0;
  bool converged = false;
};

// Splits the principle set by supremacy evidence: fittable principles win
// some conflicts and lose others; always_top win every observed conflict;
// always_bottom lose every one; no_data never conflict at all. The four
// sets partition the principle set.
struct PrinciplePartition {
  std::vector<std::string> fittable;
  std::vector<std::string> always_top;
  std::vector<std::string> always_bottom;
  std::vector<std::string> no_data;
};

// Priority weights for the fittable principles, mean-centered so profiles
// are comparable. Infinite-priority principles live in the partition.
struct PriorityProfile {
  std::string annotator_id;
  PrinciplePartition partition;
  std::map<std::string, double> weights;  // fittable ids only
  FitMetadata fit;
};

// One directed supremacy observation feeding the likelihood: the model
// predicts supremacy_target with sigmoid(w[first] - w[second]), weighted by
// the pair's conflict frequency.
struct PairObservation {
  std::size_t first = 0;
  std::size_t second = 0;
  double supremacy_target = 0.5;  // already clamped away from 0 and 1
  double weight = 1.0;            // conflict frequency f
};

// Weighted Bernoulli log-likelihood of Eq.-style pairwise targets and its
// analytic gradient. Exposed so tests can cross-check with finite
// differences and closed forms.
double pair_objective(std::span<const double> weights,
                      std::span<const PairObservation> pairs);
void pair_gradient(std::span<const double> weights,
                   std::span<const PairObservation> pairs,
                   std::span<double> grad_out);

// Maximizes pair_objective over n weights with zero initialization and a
// deterministic first-order method (Barzilai-Borwein steps safeguarded by
// backtracking). Throws ConvergenceError when the gradient norm does not
// reach config.tolerance within config.max_iterations. The returned
// weights are mean-centered.
std::pair<std::vector<double>, FitMetadata> fit_pairs(
    std::span<const PairObservation> pairs, std::size_t n,
    const FitConfig& config);

// Classification uses exact integer counts: a proportion is 1 iff
// win_count == support.
PrinciplePartition partition_principles(const SupremacyMatrix& supremacy);

// Fits priority weights for the fittable principles from the supremacy
// matrix, weighting each defined pair by its conflict frequency. With
// fewer than two fittable principles the profile carries the partition and
// no weights.
PriorityProfile fit_priorities(const SupremacyMatrix& supremacy,
                               const ConflictFrequencyMatrix& freq,
                               const FitConfig& config);

// Model-predicted supremacy sigmoid(w_c - w_c'). Infinite-priority
// principles dominate finite ones (1.0 / 0.0); two principles on the same
// infinite side, or any no_data principle, yield nullopt.
std::optional<double> predicted_supremacy(const PriorityProfile& profile,
                                          const std::string& c,
                                          const std::string& c_prime);

double sigmoid(double x);
double logit(double p);

}  // namespace discretion
