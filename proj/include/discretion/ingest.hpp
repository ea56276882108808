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

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "discretion/types.hpp"

namespace discretion {

enum class DatasetFormat { HHChosenRejected, PKUSingle, PKUDual, Generic };

DatasetFormat dataset_format_from_string(const std::string& name);
const char* to_string(DatasetFormat f);

struct DatasetDescriptor {
  DatasetFormat format = DatasetFormat::Generic;
  std::string path;
  // Annotator ids the labels are filed under. Defaults per format:
  // HH/PKUSingle {"general"}, PKUDual {"helpfulness","safety"}; Generic
  // reads annotator ids from the records.
  std::vector<std::string> label_dimensions;
};

struct LoadedDataset {
  std::vector<PreferenceItem> items;
  std::vector<AnnotatorLabels> labels;
};

// Loads line-delimited records. HH: response0 := rejected, response1 :=
// chosen, human label fixed at +1. PKU: responses in file order, labels
// from the index fields. Throws DataError with the line number on
// malformed input.
LoadedDataset load_dataset(const DatasetDescriptor& desc);

// Canonical generic JSONL: one object per line with id, prompt, response0,
// response1, labels {annotator_id: -1|0|+1}.
void save_generic(const LoadedDataset& data, const std::string& path);

// A raw oracle choice for one slot-ordered query.
enum class RawChoice { ResponseA, ResponseB, NA };

// Strict token used inside cache files; model-output parsing is the oracle
// client's job. Throws DataError carrying the raw text.
RawChoice raw_choice_from_string(const std::string& raw);
const char* to_string(RawChoice c);

enum class SwapMergeFlag { Consistent, PositionalBias, BothNA, MixedNA };

SwapMergeFlag swap_merge_flag_from_string(const std::string& s);
const char* to_string(SwapMergeFlag f);

struct SwapMergeOutcome {
  TernaryPreference judgment;
  SwapMergeFlag flag = SwapMergeFlag::BothNA;

  bool excluded() const { return flag == SwapMergeFlag::PositionalBias; }
};

// Merges the two slot orders of one query. first_order was asked with
// response0 in slot A; second_order_swapped with response1 in slot A. Both
// picking the same underlying response is Consistent; picking different
// ones is PositionalBias (judgment 0, excluded); NA on both sides is
// BothNA; a lone decisive call is MixedNA and merges to 0.
SwapMergeOutcome merge_swapped(RawChoice first_order,
                               RawChoice second_order_swapped);
SwapMergeOutcome merge_swapped(const std::string& first_order,
                               const std::string& second_order_swapped);

// One merged judgment cell with its raw-choice provenance.
struct JudgmentCacheEntry {
  TernaryPreference judgment;
  SwapMergeFlag flag = SwapMergeFlag::BothNA;
  std::string raw_first;
  std::string raw_second;

  friend bool operator==(const JudgmentCacheEntry&,
                         const JudgmentCacheEntry&) = default;
};

// Judgment cells keyed by (item_id, principle_id), bound to the oracle
// model and template version that produced them. The generic (whole-pair)
// preference uses an empty principle_id. The decoding temperature is
// recorded for audit; it is metadata, not part of the key.
struct JudgmentCache {
  static constexpr int kVersion = 1;

  std::string model_id;
  std::string template_version;
  double temperature = 0.0;
  std::map<std::pair<std::string, std::string>, JudgmentCacheEntry> cells;

  bool contains(const std::string& item_id,
                const std::string& principle_id) const {
    return cells.count({item_id, principle_id}) > 0;
  }

  // Builds the matrix for the given principles over the cached items.
  // Items missing any requested cell are skipped and reported in
  // missing_cells. Positional-bias cells are marked excluded.
  JudgmentMatrix to_judgment_matrix(
      const std::vector<std::string>& principle_ids,
      const std::vector<std::string>& item_ids,
      std::vector<std::pair<std::string, std::string>>* missing_cells =
          nullptr) const;

  // Positional-bias share among cached cells.
  double positional_bias_rate() const;
};

JudgmentCache load_judgment_cache(const std::string& path);
void save_judgment_cache(const JudgmentCache& cache, const std::string& path);

// Serialized crash-safe appends: the header is written once, then each
// completed cell is flushed on its own line.
class JudgmentCacheWriter {
 public:
  // Creates the file with a header when absent; appends otherwise (the
  // existing header must match model and template version).
  JudgmentCacheWriter(const std::string& path, const std::string& model_id,
                      const std::string& template_version,
                      double temperature = 0.0);

  void append(const std::string& item_id, const std::string& principle_id,
              const JudgmentCacheEntry& entry);

 private:
  std::string path_;
};

}  // namespace discretion
