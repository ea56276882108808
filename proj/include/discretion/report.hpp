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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "discretion/ingest.hpp"
#include "discretion/priority.hpp"

namespace discretion {

inline constexpr const char* kToolVersion = "0.1.0";

// Everything that determines a report bundle. Two runs with equal
// manifests over equal inputs produce byte-identical bundles; the bundle
// directory is keyed by the manifest hash.
struct RunManifest {
  std::string dataset_path;
  std::string dataset_format;
  std::string principle_set_id;
  std::vector<std::string> principle_ids;
  std::string cache_path;
  std::string oracle_model_id;
  std::string template_version;
  double oracle_temperature = 0.0;
  std::vector<std::string> annotators;
  std::string reference_annotator;
  double fit_tolerance = 0.0;
  int fit_max_iterations = 0;
  double fit_epsilon_clamp = 0.0;
  int bootstrap_replicates = 0;
  std::uint64_t seed = 0;
  std::string conflict_freq_denominator = "all_items";
  std::string tool_version = kToolVersion;
  std::string timestamp;  // ISO-8601; injectable for reproducible runs

  std::string to_json_string() const;
  std::string hash() const;  // 16 hex chars over the canonical JSON
};

struct AnalyzeOptions {
  DatasetDescriptor dataset;
  std::string principles_path;  // empty: bundled CCAI seed set
  std::string cache_path;
  std::vector<std::string> annotators;  // empty: every loaded annotator
  std::string reference_annotator;      // empty: first annotator
  FitConfig fit;
  int bootstrap_replicates = 1000;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string timestamp;  // empty: current UTC time
};

struct AnalyzeResult {
  std::filesystem::path bundle_dir;
  RunManifest manifest;
  std::vector<std::string> warnings;
};

// Runs ingestion -> cached judgments -> agreement/metrics -> priority fit
// -> discrepancy -> bootstrap, and writes the bundle:
//   manifest.json   the manifest above
//   report.jsonl    one record per metric, each with counts or SE
//   matrices.json   supremacy / conflict-frequency matrix container
//   summary.txt     human-readable tables
AnalyzeResult run_analyze(const AnalyzeOptions& options);

// Renders the table files of an existing bundle to a plain-text report
// (arbitrariness and discrepancy tables, supremacy matrix shape).
std::string render_report(const std::filesystem::path& bundle_dir);

// Full DD pipeline over an item multiset, as re-run inside each bootstrap
// replicate: supremacy -> fit -> rank -> tau-b distance. nullopt when the
// fit has too few principles or the distance is undefined on that sample.
std::optional<double> discrepancy_on_items(
    const AnnotatorLabels& labels_a, const AnnotatorLabels& labels_b,
    const JudgmentMatrix& judgments, std::span<const std::string> item_ids,
    const FitConfig& fit);

}  // namespace discretion
