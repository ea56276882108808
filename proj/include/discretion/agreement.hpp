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
#include <span>

#include "discretion/types.hpp"

namespace discretion {

// Case counts and fractions over a judgment matrix. Fractions sum to 1.
struct AgreementSummary {
  std::map<AgreementCase, std::int64_t> counts;
  std::map<AgreementCase, double> fractions;
  std::int64_t total = 0;
};

// The three case predicates, each evaluated independently of the others.
// Exactly one holds for any non-empty row.
bool is_conflict(std::span<const TernaryPreference> row);
bool is_consensus(std::span<const TernaryPreference> row);
bool is_indifference(std::span<const TernaryPreference> row);

// Classifies one judgment row. Conflict if two principles disagree, else
// Consensus if any principle has a nonzero judgment, else Indifference.
// Throws DataError on an empty row (no principles loaded).
AgreementCase classify_item(std::span<const TernaryPreference> row);

// In Consensus every nonzero judgment shares one sign; returns it (+1/-1).
// Throws DataError if the row is not a consensus row.
int consensus_direction(std::span<const TernaryPreference> row);

// Per-case counts and fractions over all items. Throws DataError on an
// empty matrix.
AgreementSummary summarize(const JudgmentMatrix& judgments);

}  // namespace discretion
