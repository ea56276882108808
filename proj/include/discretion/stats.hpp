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
#include <functional>
#include <optional>
#include <span>

#include "discretion/errors.hpp"

namespace discretion {

struct BootstrapEstimate {
  double point = 0.0;
  double standard_error = 0.0;
  int replicates = 0;        // requested B
  int replicates_used = 0;   // replicates where the metric was defined
  std::uint64_t seed = 0;
};

// A metric over an item multiset, given as indices into the caller's item
// list (resamples repeat indices). nullopt when undefined on that sample.
using ItemMetric =
    std::function<std::optional<double>(std::span<const std::size_t>)>;

// Nonparametric bootstrap at item granularity: point = metric on the full
// data, SE = sample standard deviation of the metric over B
// with-replacement resamples of the n items. Each replicate draws its RNG
// stream from (seed, replicate index), so results are independent of
// evaluation order. Undefined replicates are dropped and counted. Throws
// DataError when the full-data metric is undefined or every replicate is.
BootstrapEstimate bootstrap(const ItemMetric& metric, std::size_t n_items,
                            int num_replicates, std::uint64_t seed);

// Stable seed mix for per-replicate RNG streams (splitmix64 step).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace discretion
