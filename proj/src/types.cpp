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

#include "discretion/types.hpp"

#include <algorithm>
#include <cstdio>

namespace discretion {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a_bytes(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

// Length-prefixed so ("ab","c") and ("a","bc") hash differently.
std::uint64_t fnv1a_field(std::uint64_t h, const std::string& s) {
  std::uint64_t len = s.size();
  h = fnv1a_bytes(h, &len, sizeof(len));
  return fnv1a_bytes(h, s.data(), s.size());
}

}  // namespace

TernaryPreference TernaryPreference::from_int(int v) {
  switch (v) {
    case -1:
      return prefers_response0();
    case 0:
      return indifferent();
    case +1:
      return prefers_response1();
    default:
      throw DataError("ternary preference must be -1, 0 or +1, got " +
                      std::to_string(v));
  }
}

std::string content_id(const std::string& prompt, const std::string& response0,
                       const std::string& response1) {
  std::uint64_t h = kFnvOffset;
  h = fnv1a_field(h, prompt);
  h = fnv1a_field(h, response0);
  h = fnv1a_field(h, response1);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

PreferenceItem make_item(std::string prompt, std::string response0,
                         std::string response1,
                         std::optional<std::string> id) {
  if (prompt.empty()) throw DataError("item prompt must be non-empty");
  if (response0.empty() || response1.empty())
    throw DataError("item responses must be non-empty");
  std::string item_id =
      id.has_value() ? *id : content_id(prompt, response0, response1);
  if (item_id.empty()) throw DataError("item id must be non-empty");
  return PreferenceItem{std::move(item_id), std::move(prompt),
                        std::move(response0), std::move(response1)};
}

JudgmentMatrix::JudgmentMatrix(std::vector<std::string> principle_ids)
    : principle_ids_(std::move(principle_ids)) {}

void JudgmentMatrix::set_row(const std::string& item_id,
                             std::vector<TernaryPreference> row) {
  if (row.size() != principle_ids_.size()) {
    throw DataError("judgment row for item '" + item_id + "' has length " +
                    std::to_string(row.size()) + ", expected " +
                    std::to_string(principle_ids_.size()));
  }
  rows_[item_id] = std::move(row);
}

void JudgmentMatrix::set_row_unchecked(const std::string& item_id,
                                       std::vector<TernaryPreference> row) {
  rows_[item_id] = std::move(row);
}

void JudgmentMatrix::mark_excluded(const std::string& item_id,
                                   const std::string& principle_id) {
  std::size_t idx = principle_index(principle_id);
  auto it = rows_.find(item_id);
  if (it != rows_.end() && idx < it->second.size()) {
    it->second[idx] = TernaryPreference::indifferent();
  }
  excluded_.insert({item_id, principle_id});
}

std::vector<std::string> JudgmentMatrix::item_ids() const {
  std::vector<std::string> ids;
  ids.reserve(rows_.size());
  for (const auto& [id, row] : rows_) ids.push_back(id);
  return ids;
}

std::size_t JudgmentMatrix::principle_index(
    const std::string& principle_id) const {
  auto it = std::find(principle_ids_.begin(), principle_ids_.end(),
                      principle_id);
  if (it == principle_ids_.end())
    throw DataError("unknown principle id '" + principle_id + "'");
  return static_cast<std::size_t>(it - principle_ids_.begin());
}

const char* to_string(AgreementCase c) {
  switch (c) {
    case AgreementCase::Consensus:
      return "consensus";
    case AgreementCase::Conflict:
      return "conflict";
    case AgreementCase::Indifference:
      return "indifference";
  }
  return "unknown";
}

std::vector<ValidationIssue> validate_dataset(
    const std::vector<PreferenceItem>& items, const AnnotatorLabels& labels,
    const JudgmentMatrix& judgments) {
  std::vector<ValidationIssue> issues;

  std::set<std::string> known_ids;
  for (const auto& item : items) {
    if (!known_ids.insert(item.item_id).second) {
      issues.push_back({"duplicate_item_id", item.item_id});
    }
  }
  for (const auto& [item_id, pref] : labels.labels) {
    (void)pref;
    if (known_ids.count(item_id) == 0) {
      issues.push_back({"dangling_label_item", item_id});
    }
  }
  for (const auto& [item_id, row] : judgments.rows()) {
    if (known_ids.count(item_id) == 0) {
      issues.push_back({"dangling_judgment_item", item_id});
    }
    if (row.size() != judgments.num_principles()) {
      issues.push_back(
          {"wrong_row_length", item_id + ": " + std::to_string(row.size()) +
                                   " != " +
                                   std::to_string(judgments.num_principles())});
    }
  }
  return issues;
}

}  // namespace discretion
