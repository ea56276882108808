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
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "discretion/errors.hpp"

namespace discretion {

// A ternary pairwise preference: +1 prefers response1, -1 prefers response0,
// 0 is indifferent. No other value is constructible.
class TernaryPreference {
 public:
  constexpr TernaryPreference() = default;

  static constexpr TernaryPreference prefers_response1() {
    return TernaryPreference(+1);
  }
  static constexpr TernaryPreference prefers_response0() {
    return TernaryPreference(-1);
  }
  static constexpr TernaryPreference indifferent() {
    return TernaryPreference(0);
  }

  // Throws DataError for any integer outside {-1, 0, +1}.
  static TernaryPreference from_int(int v);

  constexpr int value() const { return v_; }
  constexpr bool is_indifferent() const { return v_ == 0; }

  friend constexpr bool operator==(TernaryPreference,
                                   TernaryPreference) = default;

 private:
  explicit constexpr TernaryPreference(std::int8_t v) : v_(v) {}
  std::int8_t v_ = 0;
};

// Product of two ternary preferences: +1 agree, -1 disagree, 0 if either
// side is indifferent.
constexpr int product(TernaryPreference a, TernaryPreference b) {
  return a.value() * b.value();
}

// One (prompt, response0, response1) triple with a stable id.
struct PreferenceItem {
  std::string item_id;
  std::string prompt;
  std::string response0;
  std::string response1;

  friend bool operator==(const PreferenceItem&,
                         const PreferenceItem&) = default;
};

// Stable content hash of (prompt, response0, response1), used as item_id
// when the source record carries none. 64-bit FNV-1a over length-prefixed
// fields, rendered as 16 hex chars.
std::string content_id(const std::string& prompt, const std::string& response0,
                       const std::string& response1);

// Validates non-empty fields; assigns content_id when no id is supplied.
PreferenceItem make_item(std::string prompt, std::string response0,
                         std::string response1,
                         std::optional<std::string> id = std::nullopt);

// Labels of one annotator (human, reward model, or LLM), keyed by item id.
// A missing key means the annotator never labeled that item, which is
// distinct from an explicit indifferent label.
struct AnnotatorLabels {
  std::string annotator_id;
  std::map<std::string, TernaryPreference> labels;

  std::optional<TernaryPreference> label_for(const std::string& item_id) const {
    auto it = labels.find(item_id);
    if (it == labels.end()) return std::nullopt;
    return it->second;
  }
};

// A normative statement responses are judged against.
struct Principle {
  std::string principle_id;
  std::string short_name;
  std::string long_text;

  friend bool operator==(const Principle&, const Principle&) = default;
};

// Per-item, per-principle ternary judgments from the oracle. Rows are
// aligned with principle_ids. Cells flagged positional-bias are pinned to 0
// and never count as agreement or disagreement.
class JudgmentMatrix {
 public:
  JudgmentMatrix() = default;
  explicit JudgmentMatrix(std::vector<std::string> principle_ids);

  // Throws DataError if the row length differs from the principle count.
  void set_row(const std::string& item_id, std::vector<TernaryPreference> row);

  // Loader path: stores the row as given so downstream validation can report
  // length mismatches instead of aborting on the first bad record.
  void set_row_unchecked(const std::string& item_id,
                         std::vector<TernaryPreference> row);

  // Flags a cell as positional-bias and forces its judgment to 0.
  void mark_excluded(const std::string& item_id,
                     const std::string& principle_id);

  const std::vector<std::string>& principle_ids() const {
    return principle_ids_;
  }
  const std::map<std::string, std::vector<TernaryPreference>>& rows() const {
    return rows_;
  }
  const std::set<std::pair<std::string, std::string>>& excluded() const {
    return excluded_;
  }

  std::size_t num_principles() const { return principle_ids_.size(); }
  std::size_t num_items() const { return rows_.size(); }

  bool is_excluded(const std::string& item_id,
                   const std::string& principle_id) const {
    return excluded_.count({item_id, principle_id}) > 0;
  }

  // Null if the item has no row.
  const std::vector<TernaryPreference>* row(const std::string& item_id) const {
    auto it = rows_.find(item_id);
    return it == rows_.end() ? nullptr : &it->second;
  }

  // Sorted item ids (rows_ is ordered by key).
  std::vector<std::string> item_ids() const;

  // Throws DataError for an unknown principle id.
  std::size_t principle_index(const std::string& principle_id) const;

  friend bool operator==(const JudgmentMatrix&,
                         const JudgmentMatrix&) = default;

 private:
  std::vector<std::string> principle_ids_;
  std::map<std::string, std::vector<TernaryPreference>> rows_;
  std::set<std::pair<std::string, std::string>> excluded_;
};

// The three mutually exclusive principle-agreement cases of a judgment row.
enum class AgreementCase { Consensus, Conflict, Indifference };

const char* to_string(AgreementCase c);

// One consistency problem found in a dataset. Report-style: violations are
// data, not exceptions.
struct ValidationIssue {
  std::string code;    // e.g. "duplicate_item_id", "dangling_label_item"
  std::string detail;  // names the offending id
};

// Cross-checks items, labels, and judgments: duplicate item ids, label or
// judgment rows referencing unknown items, judgment rows of the wrong
// length. Empty result iff consistent.
std::vector<ValidationIssue> validate_dataset(
    const std::vector<PreferenceItem>& items, const AnnotatorLabels& labels,
    const JudgmentMatrix& judgments);

}  // namespace discretion
