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

#include "discretion/stats.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace discretion {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

BootstrapEstimate bootstrap(const ItemMetric& metric, std::size_t n_items,
                            int num_replicates, std::uint64_t seed) {
  if (n_items == 0) throw DataError("bootstrap needs at least one item");
  if (num_replicates < 2)
    throw DataError("bootstrap needs at least two replicates");

  std::vector<std::size_t> identity(n_items);
  std::iota(identity.begin(), identity.end(), 0);
  auto point = metric(identity);
  if (!point.has_value())
    throw DataError("metric is undefined on the full dataset");

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(num_replicates));
  std::vector<std::size_t> resample(n_items);
  for (int r = 0; r < num_replicates; ++r) {
    // Modulo reduction keeps draws identical across standard libraries;
    // the bias is negligible at these sizes.
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
    for (std::size_t i = 0; i < n_items; ++i)
      resample[i] = static_cast<std::size_t>(rng() % n_items);
    auto v = metric(resample);
    if (v.has_value()) values.push_back(*v);
  }
  if (values.empty())
    throw DataError("metric was undefined on every bootstrap replicate");

  // Shifted variance: exact zero for a constant metric and better
  // conditioning, since replicate values cluster around the point estimate.
  const double shift = values.front();
  double sum = 0.0;
  for (double v : values) sum += v - shift;
  double mean_shifted = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) {
    double d = (v - shift) - mean_shifted;
    ss += d * d;
  }
  double se = values.size() > 1
                  ? std::sqrt(ss / static_cast<double>(values.size() - 1))
                  : 0.0;

  BootstrapEstimate out;
  out.point = *point;
  out.standard_error = se;
  out.replicates = num_replicates;
  out.replicates_used = static_cast<int>(values.size());
  out.seed = seed;
  return out;
}

}  // namespace discretion
