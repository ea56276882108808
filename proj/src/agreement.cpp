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

#include "discretion/agreement.hpp"

namespace discretion {

bool is_conflict(std::span<const TernaryPreference> row) {
  bool has_pos = false;
  bool has_neg = false;
  for (TernaryPreference p : row) {
    if (p.value() > 0) has_pos = true;
    if (p.value() < 0) has_neg = true;
  }
  return has_pos && has_neg;
}

bool is_consensus(std::span<const TernaryPreference> row) {
  bool has_pos = false;
  bool has_neg = false;
  bool has_nonzero = false;
  for (TernaryPreference p : row) {
    if (p.value() > 0) has_pos = true;
    if (p.value() < 0) has_neg = true;
    if (p.value() != 0) has_nonzero = true;
  }
  return has_nonzero && !(has_pos && has_neg);
}

bool is_indifference(std::span<const TernaryPreference> row) {
  for (TernaryPreference p : row) {
    if (p.value() != 0) return false;
  }
  return true;
}

AgreementCase classify_item(std::span<const TernaryPreference> row) {
  if (row.empty()) throw DataError("cannot classify an empty judgment row");
  bool has_pos = false;
  bool has_neg = false;
  for (TernaryPreference p : row) {
    if (p.value() > 0) has_pos = true;
    if (p.value() < 0) has_neg = true;
  }
  if (has_pos && has_neg) return AgreementCase::Conflict;
  if (has_pos || has_neg) return AgreementCase::Consensus;
  return AgreementCase::Indifference;
}

int consensus_direction(std::span<const TernaryPreference> row) {
  if (classify_item(row) != AgreementCase::Consensus)
    throw DataError("row is not a consensus row");
  for (TernaryPreference p : row) {
    if (p.value() != 0) return p.value();
  }
  throw DataError("row is not a consensus row");
}

AgreementSummary summarize(const JudgmentMatrix& judgments) {
  if (judgments.num_items() == 0)
    throw DataError("cannot summarize an empty judgment matrix");
  AgreementSummary out;
  out.counts[AgreementCase::Consensus] = 0;
  out.counts[AgreementCase::Conflict] = 0;
  out.counts[AgreementCase::Indifference] = 0;
  for (const auto& [item_id, row] : judgments.rows()) {
    if (row.size() != judgments.num_principles())
      throw DataError("malformed judgment row for item '" + item_id + "'");
    out.counts[classify_item(row)]++;
    out.total++;
  }
  for (const auto& [c, n] : out.counts) {
    out.fractions[c] = static_cast<double>(n) / static_cast<double>(out.total);
  }
  return out;
}

}  // namespace discretion
