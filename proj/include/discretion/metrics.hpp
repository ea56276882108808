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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "discretion/types.hpp"

namespace discretion {

// How often the annotator's nonzero label opposes a principle consensus.
// Undefined (nullopt value) when no consensus item carries a nonzero label.
struct ArbitrarinessResult {
  std::optional<double> value;
  std::int64_t numerator = 0;    // consensus items the annotator opposed
  std::int64_t denominator = 0;  // consensus items with a nonzero label
};

// One ordered principle pair: how often the first principle won a conflict.
// Counts are kept so antisymmetry can be asserted exactly.
struct SupremacyCell {
  std::int64_t win_count = 0;
  std::int64_t support = 0;  // conflicts where the annotator took a side

  bool defined() const { return support > 0; }
  std::optional<double> proportion() const {
    if (support == 0) return std::nullopt;
    return static_cast<double>(win_count) / static_cast<double>(support);
  }
};

// Dense ordered-pair matrix of supremacy cells; the diagonal is unused.
class SupremacyMatrix {
 public:
  SupremacyMatrix() = default;
  explicit SupremacyMatrix(std::vector<std::string> principle_ids);
  SupremacyMatrix(std::vector<std::string> principle_ids,
                  std::vector<SupremacyCell> cells);

  const std::vector<std::string>& principle_ids() const {
    return principle_ids_;
  }
  std::size_t size() const { return principle_ids_.size(); }

  const SupremacyCell& at(std::size_t i, std::size_t j) const;
  SupremacyCell& at(std::size_t i, std::size_t j);

  std::size_t principle_index(const std::string& principle_id) const;

 private:
  std::vector<std::string> principle_ids_;
  std::vector<SupremacyCell> cells_;  // row-major size*size
};

// Symmetric matrix of conflict probabilities f over all dataset items.
struct ConflictFrequencyMatrix {
  std::vector<std::string> principle_ids;
  std::vector<std::vector<double>> freq;       // symmetric, zero diagonal
  std::vector<std::vector<std::int64_t>> conflict_counts;
  std::int64_t total_items = 0;
};

// Discretion arbitrariness over the items of the judgment matrix, or over
// an explicit item-id multiset (bootstrap resamples repeat ids). Items with
// a missing or indifferent annotator label are dropped from the
// conditional.
ArbitrarinessResult arbitrariness(const AnnotatorLabels& labels,
                                  const JudgmentMatrix& judgments);
ArbitrarinessResult arbitrariness(const AnnotatorLabels& labels,
                                  const JudgmentMatrix& judgments,
                                  std::span<const std::string> item_ids);

// Supremacy of principle c over c': among items where the two conflict and
// the annotator took a side, the fraction where the annotator agreed with
// c. Throws DataError when c == c'.
std::pair<std::optional<double>, std::int64_t> supremacy_pair(
    const AnnotatorLabels& labels, const JudgmentMatrix& judgments,
    const std::string& c, const std::string& c_prime);

SupremacyMatrix supremacy_matrix(const AnnotatorLabels& labels,
                                 const JudgmentMatrix& judgments);
SupremacyMatrix supremacy_matrix(const AnnotatorLabels& labels,
                                 const JudgmentMatrix& judgments,
                                 std::span<const std::string> item_ids);

// Empirical probability that each principle pair conflicts. The denominator
// is the full item set; annotator labels play no role.
ConflictFrequencyMatrix conflict_frequencies(const JudgmentMatrix& judgments);
ConflictFrequencyMatrix conflict_frequencies(
    const JudgmentMatrix& judgments, std::span<const std::string> item_ids);

// Labeled-item share per annotator over the matrix items, reported next to
// the conditional metrics.
struct CoverageStats {
  std::int64_t labeled = 0;
  std::int64_t nonzero = 0;
  std::int64_t total = 0;
};
CoverageStats coverage(const AnnotatorLabels& labels,
                       const JudgmentMatrix& judgments);

// Per-principle agreement with one annotator's nonzero labels: how often
// each principle is indifferent, agrees, or disagrees on those items.
struct PrinciplePreferenceStats {
  std::vector<std::string> principle_ids;
  std::vector<std::int64_t> indifferent;
  std::vector<std::int64_t> agree;
  std::vector<std::int64_t> disagree;
  std::int64_t denominator = 0;  // items with a present, nonzero label
};
PrinciplePreferenceStats principle_preferences(const AnnotatorLabels& labels,
                                               const JudgmentMatrix& judgments);

}  // namespace discretion
