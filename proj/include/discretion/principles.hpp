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

#include <string>
#include <vector>

#include "discretion/types.hpp"

namespace discretion {

// The 21 Collective Constitutional AI seed statements in their original
// order, bundled as the default principle set.
const std::vector<Principle>& ccai_seed_principles();

inline constexpr const char* kCcaiPrincipleSetId = "ccai-seed-v1";

// Loads a principle set from a JSONL file with fields principle_id,
// short_name, long_text. Throws DataError on malformed lines or duplicate
// ids.
std::vector<Principle> load_principles(const std::string& path);

void save_principles(const std::vector<Principle>& principles,
                     const std::string& path);

std::vector<std::string> principle_ids(const std::vector<Principle>& ps);

}  // namespace discretion
