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
#include <string>
#include <vector>

#include "discretion/ingest.hpp"
#include "discretion/types.hpp"

namespace discretion {

// Synthetic dataset generator: principle judgments with scripted conflict
// structure plus an annotator whose conflict choices are Bernoulli draws
// from the logistic model at the true weights.
struct SimulateConfig {
  std::vector<double> true_weights;       // one per principle
  std::vector<std::string> principle_ids;  // defaults to p01..pNN
  int conflicts_per_pair = 100;
  int consensus_items = 0;     // annotator agrees with the consensus
  int indifference_items = 0;  // annotator picks a side at random
  std::uint64_t seed = 0;
  std::string annotator_id = "synthetic";
};

struct SimulatedData {
  std::vector<PreferenceItem> items;
  AnnotatorLabels labels;
  JudgmentMatrix judgments;
  std::vector<double> true_weights;
  std::vector<std::string> principle_ids;
};

SimulatedData simulate_dataset(const SimulateConfig& config);

// Materializes a simulation as CLI artifacts: a generic-format dataset, a
// judgment cache (model id "simulated"), and the ground-truth weights.
void write_simulated_data(const SimulatedData& data,
                          const std::string& items_path,
                          const std::string& cache_path,
                          const std::string& truth_path);

}  // namespace discretion
