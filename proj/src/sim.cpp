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

#include "discretion/sim.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include <json.hpp>

#include "discretion/priority.hpp"
#include "discretion/stats.hpp"

namespace discretion {

namespace {

std::string padded(int n) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%05d", n);
  return buf;
}

// Uniform double in [0,1) from explicit bit manipulation so draws are
// identical across standard libraries.
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

SimulatedData simulate_dataset(const SimulateConfig& config) {
  const std::size_t n = config.true_weights.size();
  if (n < 2) throw DataError("simulation needs at least two principles");

  SimulatedData out;
  out.true_weights = config.true_weights;
  out.principle_ids = config.principle_ids;
  if (out.principle_ids.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      char buf[24];
      std::snprintf(buf, sizeof(buf), "p%02u", static_cast<unsigned>(i + 1));
      out.principle_ids.push_back(buf);
    }
  }
  if (out.principle_ids.size() != n)
    throw DataError("principle_ids and true_weights sizes differ");

  out.judgments = JudgmentMatrix(out.principle_ids);
  out.labels.annotator_id = config.annotator_id;
  std::mt19937_64 rng(mix_seed(config.seed, 0));

  int item_counter = 0;
  auto add_item = [&](std::vector<TernaryPreference> row,
                      TernaryPreference label) {
    ++item_counter;
    PreferenceItem item = make_item(
        "synthetic prompt " + padded(item_counter),
        "synthetic response zero " + padded(item_counter),
        "synthetic response one " + padded(item_counter));
    out.judgments.set_row(item.item_id, std::move(row));
    out.labels.labels[item.item_id] = label;
    out.items.push_back(std::move(item));
  };

  // Conflict items: each pair conflicts in isolation; the annotator sides
  // with the higher-weighted principle with logistic probability.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double p_side_i =
          sigmoid(config.true_weights[i] - config.true_weights[j]);
      for (int k = 0; k < config.conflicts_per_pair; ++k) {
        int sign = next_unit(rng) < 0.5 ? +1 : -1;
        std::vector<TernaryPreference> row(n);
        row[i] = TernaryPreference::from_int(sign);
        row[j] = TernaryPreference::from_int(-sign);
        bool sides_with_i = next_unit(rng) < p_side_i;
        add_item(row, TernaryPreference::from_int(sides_with_i ? sign : -sign));
      }
    }
  }

  for (int k = 0; k < config.consensus_items; ++k) {
    int sign = next_unit(rng) < 0.5 ? +1 : -1;
    std::size_t which = static_cast<std::size_t>(rng() % n);
    std::vector<TernaryPreference> row(n);
    row[which] = TernaryPreference::from_int(sign);
    add_item(row, TernaryPreference::from_int(sign));
  }

  for (int k = 0; k < config.indifference_items; ++k) {
    std::vector<TernaryPreference> row(n);
    int sign = next_unit(rng) < 0.5 ? +1 : -1;
    add_item(row, TernaryPreference::from_int(sign));
  }

  return out;
}

void write_simulated_data(const SimulatedData& data,
                          const std::string& items_path,
                          const std::string& cache_path,
                          const std::string& truth_path) {
  LoadedDataset dataset;
  dataset.items = data.items;
  dataset.labels.push_back(data.labels);
  save_generic(dataset, items_path);

  JudgmentCache cache;
  cache.model_id = "simulated";
  cache.template_version = "sim-v1";
  for (const auto& [item_id, row] : data.judgments.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      JudgmentCacheEntry entry;
      entry.judgment = row[i];
      entry.flag = row[i].value() == 0 ? SwapMergeFlag::BothNA
                                       : SwapMergeFlag::Consistent;
      entry.raw_first = row[i].value() == 0   ? "NA"
                        : row[i].value() == 1 ? "B"
                                              : "A";
      entry.raw_second = row[i].value() == 0   ? "NA"
                         : row[i].value() == 1 ? "A"
                                               : "B";
      cache.cells[{item_id, data.principle_ids[i]}] = entry;
    }
  }
  save_judgment_cache(cache, cache_path);

  nlohmann::json truth;
  truth["principle_ids"] = data.principle_ids;
  truth["true_weights"] = data.true_weights;
  truth["annotator_id"] = data.labels.annotator_id;
  std::ofstream out(truth_path, std::ios::trunc);
  if (!out) throw DataError("cannot write '" + truth_path + "'");
  out << truth.dump(2) << "\n";
}

}  // namespace discretion
