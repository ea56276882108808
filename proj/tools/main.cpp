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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "discretion/agreement.hpp"
#include "discretion/ingest.hpp"
#include "discretion/oracle.hpp"
#include "discretion/principles.hpp"
#include "discretion/report.hpp"
#include "discretion/sim.hpp"

namespace {

using namespace discretion;

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitEndpointError = 2;
constexpr int kExitNonConvergence = 3;

struct IngestArgs {
  std::string input;
  std::string format = "generic";
  std::string output;
};

int cmd_ingest(const IngestArgs& args) {
  DatasetDescriptor desc;
  desc.format = dataset_format_from_string(args.format);
  desc.path = args.input;
  LoadedDataset data = load_dataset(desc);

  std::cout << "loaded " << data.items.size() << " items, "
            << data.labels.size() << " annotator(s)\n";
  for (const auto& ann : data.labels) {
    std::int64_t nonzero = 0;
    for (const auto& [id, l] : ann.labels)
      if (!l.is_indifferent()) ++nonzero;
    std::cout << "  annotator " << ann.annotator_id << ": "
              << ann.labels.size() << " labels (" << nonzero << " nonzero)\n";
  }
  for (const auto& ann : data.labels) {
    auto issues = validate_dataset(data.items, ann, JudgmentMatrix{});
    for (const auto& issue : issues)
      std::cout << "  violation [" << issue.code << "] " << issue.detail
                << "\n";
  }
  if (!args.output.empty()) {
    save_generic(data, args.output);
    std::cout << "wrote canonical generic dataset to " << args.output << "\n";
  }
  return kExitOk;
}

struct AnnotateArgs {
  std::string input;
  std::string format = "generic";
  std::string principles_path;
  std::string endpoint_path;
  std::string cache_path;
  bool generic = false;
  bool dry_run = false;
};

int cmd_annotate(const AnnotateArgs& args) {
  DatasetDescriptor desc;
  desc.format = dataset_format_from_string(args.format);
  desc.path = args.input;
  LoadedDataset data = load_dataset(desc);

  std::vector<Principle> principles = args.principles_path.empty()
                                          ? ccai_seed_principles()
                                          : load_principles(args.principles_path);

  if (args.dry_run) {
    // Render without talking to any endpoint.
    std::int64_t rendered = 0;
    for (const auto& item : data.items) {
      if (args.generic) {
        render_prompt(generic_template(), item, nullptr, Orientation::Original);
        render_prompt(generic_template(), item, nullptr, Orientation::Swapped);
        rendered += 2;
      } else {
        for (const auto& p : principles) {
          render_prompt(oracle_template(), item, &p, Orientation::Original);
          render_prompt(oracle_template(), item, &p, Orientation::Swapped);
          rendered += 2;
        }
      }
    }
    std::cout << "dry run: rendered " << rendered
              << " prompts, 0 network calls\n";
    return kExitOk;
  }

  EndpointConfig endpoint = load_endpoint_config(args.endpoint_path);
  const std::string template_version =
      args.generic ? generic_template().version : oracle_template().version;

  JudgmentCacheWriter writer(args.cache_path, endpoint.model_id,
                             template_version, endpoint.temperature);
  JudgmentCache cache;
  cache.model_id = endpoint.model_id;
  cache.template_version = template_version;
  cache.temperature = endpoint.temperature;
  {
    std::ifstream probe(args.cache_path);
    if (probe && probe.peek() != std::ifstream::traits_type::eof())
      cache = load_judgment_cache(args.cache_path);
  }

  AnnotationStats stats;
  if (args.generic) {
    auto result = annotate_generic(data.items, endpoint, cache, &writer);
    stats = result.stats;
    std::cout << "annotator '" << result.labels.annotator_id << "': "
              << result.labels.labels.size() << " labels\n";
  } else {
    auto result =
        annotate_principles(data.items, principles, endpoint, cache, &writer);
    stats = result.stats;
    std::cout << "judgment matrix: " << result.matrix.num_items()
              << " items x " << result.matrix.num_principles()
              << " principles\n";
  }

  double bias_rate =
      stats.cells_fetched > 0
          ? static_cast<double>(stats.positional_bias_cells) /
                static_cast<double>(stats.cells_fetched)
          : 0.0;
  std::printf(
      "cells: %lld requested, %lld cached, %lld fetched (%lld calls)\n",
      static_cast<long long>(stats.cells_requested),
      static_cast<long long>(stats.cells_from_cache),
      static_cast<long long>(stats.cells_fetched),
      static_cast<long long>(stats.network_calls));
  std::printf("exclusions: positional bias %.2f%% of fetched cells (%lld)\n",
              bias_rate * 100.0,
              static_cast<long long>(stats.positional_bias_cells));
  if (stats.unparseable_completions > 0)
    std::printf("unparseable completions: %lld\n",
                static_cast<long long>(stats.unparseable_completions));
  if (!stats.missing.empty())
    std::printf("missing cells: %zu (re-run to resume)\n",
                stats.missing.size());
  if (!stats.endpoint_error.empty()) {
    std::cerr << "endpoint error: " << stats.endpoint_error << "\n";
    return kExitEndpointError;
  }
  return kExitOk;
}

struct AnalyzeArgs {
  std::string input;
  std::string format = "generic";
  std::string principles_path;
  std::string cache_path;
  std::vector<std::string> annotators;
  std::string reference;
  std::string out_dir = "reports";
  std::string timestamp;
  int bootstrap = 1000;
  std::uint64_t seed = 0;
  double fit_tolerance = 1e-8;
  int fit_max_iterations = 10000;
  double fit_epsilon_clamp = 1e-6;
};

int cmd_analyze(const AnalyzeArgs& args) {
  AnalyzeOptions options;
  options.dataset.format = dataset_format_from_string(args.format);
  options.dataset.path = args.input;
  options.principles_path = args.principles_path;
  options.cache_path = args.cache_path;
  options.annotators = args.annotators;
  options.reference_annotator = args.reference;
  options.out_dir = args.out_dir;
  options.timestamp = args.timestamp;
  options.bootstrap_replicates = args.bootstrap;
  options.seed = args.seed;
  options.fit.tolerance = args.fit_tolerance;
  options.fit.max_iterations = args.fit_max_iterations;
  options.fit.epsilon_clamp = args.fit_epsilon_clamp;
  options.fit.seed = args.seed;

  AnalyzeResult result = run_analyze(options);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "bundle written to " << result.bundle_dir.string() << "\n";
  std::ifstream summary(result.bundle_dir / "summary.txt");
  std::cout << summary.rdbuf();
  return kExitOk;
}

struct SimulateArgs {
  std::vector<double> weights = {1.0, 0.5, 0.0, -0.5, -1.0};
  int conflicts_per_pair = 100;
  int consensus_items = 0;
  int indifference_items = 0;
  std::uint64_t seed = 0;
  std::string out_dir = "simulated";
};

int cmd_simulate(const SimulateArgs& args) {
  SimulateConfig config;
  config.true_weights = args.weights;
  config.conflicts_per_pair = args.conflicts_per_pair;
  config.consensus_items = args.consensus_items;
  config.indifference_items = args.indifference_items;
  config.seed = args.seed;

  SimulatedData data = simulate_dataset(config);
  std::filesystem::create_directories(args.out_dir);
  std::filesystem::path dir(args.out_dir);
  write_simulated_data(data, (dir / "items.jsonl").string(),
                       (dir / "cache.jsonl").string(),
                       (dir / "truth.json").string());
  std::cout << "simulated " << data.items.size() << " items over "
            << data.principle_ids.size() << " principles (seed " << args.seed
            << ") into " << args.out_dir << "\n";
  return kExitOk;
}

int cmd_report(const std::string& bundle_dir) {
  std::cout << render_report(bundle_dir);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit of annotator discretion in pairwise preference data"};
  app.require_subcommand(1);

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand(
      "ingest", "Load and validate a preference dataset");
  ingest->add_option("--input", ingest_args.input, "dataset file (JSONL)")
      ->required();
  ingest->add_option("--format", ingest_args.format,
                     "hh | pku-single | pku-dual | generic");
  ingest->add_option("--out", ingest_args.output,
                     "write canonical generic JSONL here");

  AnnotateArgs annotate_args;
  auto* annotate = app.add_subcommand(
      "annotate", "Collect principle judgments or generic LLM preferences");
  annotate->add_option("--input", annotate_args.input, "dataset file")
      ->required();
  annotate->add_option("--format", annotate_args.format, "dataset format");
  annotate->add_option("--principles", annotate_args.principles_path,
                       "principle set JSONL (default: bundled seed set)");
  annotate->add_option("--endpoint", annotate_args.endpoint_path,
                       "endpoint config JSON");
  annotate->add_option("--cache", annotate_args.cache_path,
                       "judgment cache file (created or resumed)");
  annotate->add_flag("--generic", annotate_args.generic,
                     "collect whole-pair preferences instead of "
                     "principle-specific judgments");
  annotate->add_flag("--dry-run", annotate_args.dry_run,
                     "render prompts only; no network calls");

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand(
      "analyze", "Compute agreement, arbitrariness, priorities and "
                 "discrepancy; write a report bundle");
  analyze->add_option("--input", analyze_args.input, "dataset file")
      ->required();
  analyze->add_option("--format", analyze_args.format, "dataset format");
  analyze->add_option("--principles", analyze_args.principles_path,
                      "principle set JSONL (default: bundled seed set)");
  analyze->add_option("--cache", analyze_args.cache_path,
                      "judgment cache file")
      ->required();
  analyze->add_option("--annotator", analyze_args.annotators,
                      "annotator id(s) to analyze (default: all)");
  analyze->add_option("--reference", analyze_args.reference,
                      "reference annotator for the discrepancy table");
  analyze->add_option("--out-dir", analyze_args.out_dir,
                      "bundle root directory");
  analyze->add_option("--timestamp", analyze_args.timestamp,
                      "pin the manifest timestamp (ISO-8601) for "
                      "reproducible bundles");
  analyze->add_option("--bootstrap", analyze_args.bootstrap,
                      "bootstrap replicates B");
  analyze->add_option("--seed", analyze_args.seed, "bootstrap seed");
  analyze->add_option("--fit-tolerance", analyze_args.fit_tolerance,
                      "gradient norm at convergence");
  analyze->add_option("--fit-max-iter", analyze_args.fit_max_iterations,
                      "iteration budget for the priority fit");
  analyze->add_option("--fit-epsilon-clamp", analyze_args.fit_epsilon_clamp,
                      "clamp for saturated supremacy targets");

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand(
      "simulate", "Generate a synthetic dataset from known priority weights");
  simulate->add_option("--weights", simulate_args.weights,
                       "true priority weights, one per principle");
  simulate->add_option("--conflicts-per-pair",
                       simulate_args.conflicts_per_pair,
                       "conflict items per principle pair");
  simulate->add_option("--consensus-items", simulate_args.consensus_items,
                       "consensus items (annotator agrees)");
  simulate->add_option("--indifference-items",
                       simulate_args.indifference_items,
                       "all-indifferent items");
  simulate->add_option("--seed", simulate_args.seed, "RNG seed");
  simulate->add_option("--out-dir", simulate_args.out_dir,
                       "output directory");

  std::string bundle_dir;
  auto* report = app.add_subcommand(
      "report", "Render the tables of an existing report bundle");
  report->add_option("--bundle", bundle_dir, "bundle directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest(ingest_args);
    if (*annotate) return cmd_annotate(annotate_args);
    if (*analyze) return cmd_analyze(analyze_args);
    if (*simulate) return cmd_simulate(simulate_args);
    if (*report) return cmd_report(bundle_dir);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const EndpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEndpointError;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitOk;
}
