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

#include "discretion/metrics.hpp"

#include <algorithm>

#include "discretion/agreement.hpp"

namespace discretion {

SupremacyMatrix::SupremacyMatrix(std::vector<std::string> principle_ids)
    : principle_ids_(std::move(principle_ids)),
      cells_(principle_ids_.size() * principle_ids_.size()) {}

SupremacyMatrix::SupremacyMatrix(std::vector<std::string> principle_ids,
                                 std::vector<SupremacyCell> cells)
    : principle_ids_(std::move(principle_ids)), cells_(std::move(cells)) {
  if (cells_.size() != principle_ids_.size() * principle_ids_.size())
    throw DataError("supremacy cell grid does not match principle count");
}

const SupremacyCell& SupremacyMatrix::at(std::size_t i, std::size_t j) const {
  return cells_[i * principle_ids_.size() + j];
}

SupremacyCell& SupremacyMatrix::at(std::size_t i, std::size_t j) {
  return cells_[i * principle_ids_.size() + j];
}

std::size_t SupremacyMatrix::principle_index(
    const std::string& principle_id) const {
  auto it = std::find(principle_ids_.begin(), principle_ids_.end(),
                      principle_id);
  if (it == principle_ids_.end())
    throw DataError("unknown principle id '" + principle_id + "'");
  return static_cast<std::size_t>(it - principle_ids_.begin());
}

ArbitrarinessResult arbitrariness(const AnnotatorLabels& labels,
                                  const JudgmentMatrix& judgments) {
  auto ids = judgments.item_ids();
  return arbitrariness(labels, judgments, ids);
}

ArbitrarinessResult arbitrariness(const AnnotatorLabels& labels,
                                  const JudgmentMatrix& judgments,
                                  std::span<const std::string> item_ids) {
  ArbitrarinessResult out;
  for (const auto& item_id : item_ids) {
    const auto* row = judgments.row(item_id);
    if (row == nullptr) continue;
    auto label = labels.label_for(item_id);
    if (!label.has_value() || label->is_indifferent()) continue;
    if (classify_item(*row) != AgreementCase::Consensus) continue;
    out.denominator++;
    // In consensus all nonzero judgments share one sign, so opposing any
    // one of them means opposing the direction.
    if (label->value() != consensus_direction(*row)) out.numerator++;
  }
  if (out.denominator > 0) {
    out.value = static_cast<double>(out.numerator) /
                static_cast<double>(out.denominator);
  }
  return out;
}

std::pair<std::optional<double>, std::int64_t> supremacy_pair(
    const AnnotatorLabels& labels, const JudgmentMatrix& judgments,
    const std::string& c, const std::string& c_prime) {
  if (c == c_prime)
    throw DataError("supremacy is undefined for a principle against itself");
  std::size_t i = judgments.principle_index(c);
  std::size_t j = judgments.principle_index(c_prime);

  std::int64_t wins = 0;
  std::int64_t support = 0;
  for (const auto& [item_id, row] : judgments.rows()) {
    if (product(row[i], row[j]) != -1) continue;
    auto label = labels.label_for(item_id);
    if (!label.has_value() || label->is_indifferent()) continue;
    support++;
    if (product(*label, row[i]) == +1) wins++;
  }
  if (support == 0) return {std::nullopt, 0};
  return {static_cast<double>(wins) / static_cast<double>(support), support};
}

SupremacyMatrix supremacy_matrix(const AnnotatorLabels& labels,
                                 const JudgmentMatrix& judgments) {
  auto ids = judgments.item_ids();
  return supremacy_matrix(labels, judgments, ids);
}

SupremacyMatrix supremacy_matrix(const AnnotatorLabels& labels,
                                 const JudgmentMatrix& judgments,
                                 std::span<const std::string> item_ids) {
  const std::size_t n = judgments.num_principles();
  SupremacyMatrix out(judgments.principle_ids());
  for (const auto& item_id : item_ids) {
    const auto* row = judgments.row(item_id);
    if (row == nullptr) continue;
    auto label = labels.label_for(item_id);
    if (!label.has_value() || label->is_indifferent()) continue;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (product((*row)[i], (*row)[j]) != -1) continue;
        auto& ij = out.at(i, j);
        auto& ji = out.at(j, i);
        ij.support++;
        ji.support++;
        if (product(*label, (*row)[i]) == +1) {
          ij.win_count++;
        } else {
          ji.win_count++;
        }
      }
    }
  }
  return out;
}

ConflictFrequencyMatrix conflict_frequencies(const JudgmentMatrix& judgments) {
  auto ids = judgments.item_ids();
  return conflict_frequencies(judgments, ids);
}

ConflictFrequencyMatrix conflict_frequencies(
    const JudgmentMatrix& judgments, std::span<const std::string> item_ids) {
  const std::size_t n = judgments.num_principles();
  ConflictFrequencyMatrix out;
  out.principle_ids = judgments.principle_ids();
  out.freq.assign(n, std::vector<double>(n, 0.0));
  out.conflict_counts.assign(n, std::vector<std::int64_t>(n, 0));

  for (const auto& item_id : item_ids) {
    const auto* row = judgments.row(item_id);
    if (row == nullptr) continue;
    out.total_items++;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (product((*row)[i], (*row)[j]) == -1) {
          out.conflict_counts[i][j]++;
          out.conflict_counts[j][i]++;
        }
      }
    }
  }
  if (out.total_items > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        out.freq[i][j] = static_cast<double>(out.conflict_counts[i][j]) /
                         static_cast<double>(out.total_items);
      }
    }
  }
  return out;
}

CoverageStats coverage(const AnnotatorLabels& labels,
                       const JudgmentMatrix& judgments) {
  CoverageStats out;
  for (const auto& [item_id, row] : judgments.rows()) {
    (void)row;
    out.total++;
    auto label = labels.label_for(item_id);
    if (!label.has_value()) continue;
    out.labeled++;
    if (!label->is_indifferent()) out.nonzero++;
  }
  return out;
}

PrinciplePreferenceStats principle_preferences(
    const AnnotatorLabels& labels, const JudgmentMatrix& judgments) {
  const std::size_t n = judgments.num_principles();
  PrinciplePreferenceStats out;
  out.principle_ids = judgments.principle_ids();
  out.indifferent.assign(n, 0);
  out.agree.assign(n, 0);
  out.disagree.assign(n, 0);
  for (const auto& [item_id, row] : judgments.rows()) {
    auto label = labels.label_for(item_id);
    if (!label.has_value() || label->is_indifferent()) continue;
    out.denominator++;
    for (std::size_t i = 0; i < n; ++i) {
      int p = product(*label, row[i]);
      if (p == 0) {
        out.indifferent[i]++;
      } else if (p > 0) {
        out.agree[i]++;
      } else {
        out.disagree[i]++;
      }
    }
  }
  return out;
}

}  // namespace discretion
