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

#include "discretion/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "discretion/agreement.hpp"
#include "discretion/discrepancy.hpp"
#include "discretion/metrics.hpp"
#include "discretion/principles.hpp"
#include "discretion/stats.hpp"

namespace discretion {

namespace {

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", v * 100.0);
  return buf;
}

// "28.9% (± 1.3%)" — the row shape every scalar table uses.
std::string pct_with_se(double v, double se) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f%% (± %.1f%%)", v * 100.0, se * 100.0);
  return buf;
}

nlohmann::json supremacy_to_json(const SupremacyMatrix& m) {
  nlohmann::json wins = nlohmann::json::array();
  nlohmann::json support = nlohmann::json::array();
  nlohmann::json win_counts = nlohmann::json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    nlohmann::json wrow = nlohmann::json::array();
    nlohmann::json srow = nlohmann::json::array();
    nlohmann::json crow = nlohmann::json::array();
    for (std::size_t j = 0; j < m.size(); ++j) {
      const auto& cell = m.at(i, j);
      if (i == j || !cell.defined()) {
        wrow.push_back(nullptr);  // never 0.0: empty means no conflicts
      } else {
        wrow.push_back(*cell.proportion());
      }
      srow.push_back(i == j ? 0 : cell.support);
      crow.push_back(i == j ? 0 : cell.win_count);
    }
    wins.push_back(wrow);
    support.push_back(srow);
    win_counts.push_back(crow);
  }
  return {{"wins", wins}, {"support", support}, {"win_counts", win_counts}};
}

nlohmann::json profile_to_json(const PriorityProfile& p) {
  nlohmann::json weights = nlohmann::json::object();
  for (const auto& [id, w] : p.weights) weights[id] = w;
  nlohmann::json j;
  j["annotator"] = p.annotator_id;
  j["weights"] = weights;
  j["always_top"] = p.partition.always_top;
  j["always_bottom"] = p.partition.always_bottom;
  j["no_data"] = p.partition.no_data;
  j["fit"] = {{"iterations", p.fit.iterations},
              {"gradient_norm", p.fit.gradient_norm},
              {"objective", p.fit.objective},
              {"converged", p.fit.converged},
              {"seed", p.fit.seed}};
  return j;
}

}  // namespace

std::string RunManifest::to_json_string() const {
  nlohmann::json j;
  j["dataset_path"] = dataset_path;
  j["dataset_format"] = dataset_format;
  j["principle_set_id"] = principle_set_id;
  j["principle_ids"] = principle_ids;
  j["cache_path"] = cache_path;
  j["oracle_model_id"] = oracle_model_id;
  j["template_version"] = template_version;
  j["oracle_temperature"] = oracle_temperature;
  j["annotators"] = annotators;
  j["reference_annotator"] = reference_annotator;
  j["fit"] = {{"tolerance", fit_tolerance},
              {"max_iterations", fit_max_iterations},
              {"epsilon_clamp", fit_epsilon_clamp}};
  j["bootstrap"] = {{"replicates", bootstrap_replicates}, {"seed", seed}};
  j["conflict_freq_denominator"] = conflict_freq_denominator;
  j["tool_version"] = tool_version;
  j["timestamp"] = timestamp;
  return j.dump(2);
}

std::string RunManifest::hash() const { return fnv1a_hex(to_json_string()); }

std::optional<double> discrepancy_on_items(
    const AnnotatorLabels& labels_a, const AnnotatorLabels& labels_b,
    const JudgmentMatrix& judgments, std::span<const std::string> item_ids,
    const FitConfig& fit) {
  try {
    ConflictFrequencyMatrix freq = conflict_frequencies(judgments, item_ids);
    SupremacyMatrix sup_a = supremacy_matrix(labels_a, judgments, item_ids);
    SupremacyMatrix sup_b = supremacy_matrix(labels_b, judgments, item_ids);
    PriorityProfile pa = fit_priorities(sup_a, freq, fit);
    pa.annotator_id = labels_a.annotator_id;
    PriorityProfile pb = fit_priorities(sup_b, freq, fit);
    pb.annotator_id = labels_b.annotator_id;
    DiscrepancyScore score = discretion_discrepancy(pa, pb);
    if (!score.value.has_value()) return std::nullopt;
    return *score.value;
  } catch (const DataError&) {
    return std::nullopt;
  } catch (const ConvergenceError&) {
    return std::nullopt;
  }
}

AnalyzeResult run_analyze(const AnalyzeOptions& options) {
  // --- inputs ---
  LoadedDataset data = load_dataset(options.dataset);
  if (data.items.empty()) throw DataError("dataset has no items");

  std::vector<Principle> principles;
  std::string principle_set_id;
  if (options.principles_path.empty()) {
    principles = ccai_seed_principles();
    principle_set_id = kCcaiPrincipleSetId;
  } else {
    principles = load_principles(options.principles_path);
    principle_set_id = options.principles_path;
  }

  JudgmentCache cache = load_judgment_cache(options.cache_path);

  std::vector<std::string> pid_list = principle_ids(principles);
  std::vector<std::string> all_item_ids;
  all_item_ids.reserve(data.items.size());
  for (const auto& item : data.items) all_item_ids.push_back(item.item_id);

  std::vector<std::pair<std::string, std::string>> missing_cells;
  JudgmentMatrix judgments =
      cache.to_judgment_matrix(pid_list, all_item_ids, &missing_cells);
  if (judgments.num_items() == 0)
    throw DataError(
        "no dataset item has a complete judgment row in cache '" +
        options.cache_path + "'; run the annotate command first");

  // --- annotator selection ---
  std::vector<const AnnotatorLabels*> annotators;
  for (const auto& ann : data.labels) {
    if (!options.annotators.empty() &&
        std::find(options.annotators.begin(), options.annotators.end(),
                  ann.annotator_id) == options.annotators.end())
      continue;
    annotators.push_back(&ann);
  }
  if (annotators.empty()) throw DataError("no annotator labels selected");

  std::string reference = options.reference_annotator.empty()
                              ? annotators.front()->annotator_id
                              : options.reference_annotator;

  AnalyzeResult result;
  for (const auto* ann : annotators) {
    if (ann->annotator_id == cache.model_id) {
      result.warnings.push_back(
          "annotator '" + ann->annotator_id +
          "' is also the oracle model; it is biased towards agreeing with "
          "the consensus of its own judgments, so treat its arbitrariness "
          "as uninformative");
    }
  }

  // --- manifest ---
  RunManifest manifest;
  manifest.dataset_path = options.dataset.path;
  manifest.dataset_format = to_string(options.dataset.format);
  manifest.principle_set_id = principle_set_id;
  manifest.principle_ids = pid_list;
  manifest.cache_path = options.cache_path;
  manifest.oracle_model_id = cache.model_id;
  manifest.template_version = cache.template_version;
  manifest.oracle_temperature = cache.temperature;
  for (const auto* ann : annotators)
    manifest.annotators.push_back(ann->annotator_id);
  manifest.reference_annotator = reference;
  manifest.fit_tolerance = options.fit.tolerance;
  manifest.fit_max_iterations = options.fit.max_iterations;
  manifest.fit_epsilon_clamp = options.fit.epsilon_clamp;
  manifest.bootstrap_replicates = options.bootstrap_replicates;
  manifest.seed = options.seed;
  manifest.timestamp =
      options.timestamp.empty() ? utc_now_iso8601() : options.timestamp;
  result.manifest = manifest;

  // --- metrics over the analysis item set (items with judgment rows) ---
  std::vector<std::string> ids = judgments.item_ids();
  const std::size_t n_items = ids.size();

  AgreementSummary agreement = summarize(judgments);
  ConflictFrequencyMatrix freq = conflict_frequencies(judgments);

  struct AnnotatorBlock {
    std::string id;
    const AnnotatorLabels* labels = nullptr;
    CoverageStats coverage;
    ArbitrarinessResult arbitrariness;
    std::optional<BootstrapEstimate> arbitrariness_se;
    SupremacyMatrix supremacy;
    PriorityProfile profile;
    PrinciplePreferenceStats preferences;
  };
  std::vector<AnnotatorBlock> blocks;

  for (const auto* ann : annotators) {
    AnnotatorBlock block;
    block.id = ann->annotator_id;
    block.labels = ann;
    block.coverage = coverage(*ann, judgments);
    block.preferences = principle_preferences(*ann, judgments);
    block.arbitrariness = arbitrariness(*ann, judgments);
    if (block.arbitrariness.value.has_value() &&
        options.bootstrap_replicates >= 2) {
      ItemMetric metric =
          [&](std::span<const std::size_t> idx) -> std::optional<double> {
        std::vector<std::string> sample;
        sample.reserve(idx.size());
        for (std::size_t k : idx) sample.push_back(ids[k]);
        return arbitrariness(*ann, judgments, sample).value;
      };
      block.arbitrariness_se = bootstrap(
          metric, n_items, options.bootstrap_replicates, options.seed);
    }
    block.supremacy = supremacy_matrix(*ann, judgments);
    block.profile = fit_priorities(block.supremacy, freq, options.fit);
    block.profile.annotator_id = ann->annotator_id;
    blocks.push_back(std::move(block));
  }

  // --- pairwise discrepancy (reference first, then the rest) ---
  struct DdRow {
    std::string a;
    std::string b;
    std::optional<double> value;
    std::optional<BootstrapEstimate> se;
    DiscrepancyScore score;
  };
  std::vector<DdRow> dd_rows;
  const AnnotatorBlock* ref_block = nullptr;
  for (const auto& b : blocks)
    if (b.id == reference) ref_block = &b;
  if (ref_block == nullptr)
    throw DataError("reference annotator '" + reference +
                    "' is not among the selected annotators");

  for (const auto& block : blocks) {
    DdRow row;
    row.a = reference;
    row.b = block.id;
    try {
      row.score = discretion_discrepancy(ref_block->profile, block.profile);
      row.value = row.score.value;
    } catch (const DataError&) {
      row.value = std::nullopt;
    }
    const AnnotatorLabels* la = ref_block->labels;
    const AnnotatorLabels* lb = block.labels;
    if (row.value.has_value() && options.bootstrap_replicates >= 2) {
      ItemMetric metric =
          [&](std::span<const std::size_t> idx) -> std::optional<double> {
        std::vector<std::string> sample;
        sample.reserve(idx.size());
        for (std::size_t k : idx) sample.push_back(ids[k]);
        return discrepancy_on_items(*la, *lb, judgments, sample, options.fit);
      };
      try {
        row.se = bootstrap(metric, n_items, options.bootstrap_replicates,
                           options.seed);
      } catch (const DataError&) {
        row.se = std::nullopt;  // undefined on every replicate
      }
    }
    dd_rows.push_back(std::move(row));
  }

  // --- write the bundle ---
  std::filesystem::path dir =
      std::filesystem::path(options.out_dir) / manifest.hash();
  std::filesystem::create_directories(dir);
  result.bundle_dir = dir;

  {
    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    out << manifest.to_json_string() << "\n";
  }

  {
    std::ofstream out(dir / "report.jsonl", std::ios::trunc);
    nlohmann::json meta;
    meta["record"] = "meta";
    meta["manifest_hash"] = manifest.hash();
    meta["items_analyzed"] = n_items;
    meta["items_in_dataset"] = data.items.size();
    meta["missing_judgment_cells"] = missing_cells.size();
    meta["positional_bias_rate"] = cache.positional_bias_rate();
    meta["excluded_cells"] = judgments.excluded().size();
    out << meta.dump() << "\n";

    nlohmann::json agree;
    agree["record"] = "agreement";
    for (const auto& [c, count] : agreement.counts) {
      agree["counts"][to_string(c)] = count;
      agree["fractions"][to_string(c)] = agreement.fractions.at(c);
    }
    agree["total"] = agreement.total;
    out << agree.dump() << "\n";

    for (const auto& block : blocks) {
      nlohmann::json cov;
      cov["record"] = "coverage";
      cov["annotator"] = block.id;
      cov["labeled"] = block.coverage.labeled;
      cov["nonzero"] = block.coverage.nonzero;
      cov["total"] = block.coverage.total;
      out << cov.dump() << "\n";

      nlohmann::json da;
      da["record"] = "arbitrariness";
      da["annotator"] = block.id;
      da["value"] = block.arbitrariness.value.has_value()
                        ? nlohmann::json(*block.arbitrariness.value)
                        : nlohmann::json(nullptr);
      da["numerator"] = block.arbitrariness.numerator;
      da["denominator"] = block.arbitrariness.denominator;
      if (block.arbitrariness_se.has_value()) {
        da["standard_error"] = block.arbitrariness_se->standard_error;
        da["bootstrap_replicates_used"] =
            block.arbitrariness_se->replicates_used;
      }
      out << da.dump() << "\n";

      nlohmann::json prio = profile_to_json(block.profile);
      prio["record"] = "priority";
      out << prio.dump() << "\n";

      // Per-principle indifference/agreement/disagreement with this
      // annotator's nonzero labels.
      const auto& prefs = block.preferences;
      nlohmann::json pp;
      pp["record"] = "principle_preferences";
      pp["annotator"] = block.id;
      pp["denominator"] = prefs.denominator;
      nlohmann::json per = nlohmann::json::object();
      for (std::size_t i = 0; i < prefs.principle_ids.size(); ++i) {
        per[prefs.principle_ids[i]] = {{"indifferent", prefs.indifferent[i]},
                                       {"agree", prefs.agree[i]},
                                       {"disagree", prefs.disagree[i]}};
      }
      pp["principles"] = per;
      out << pp.dump() << "\n";
    }

    for (const auto& row : dd_rows) {
      nlohmann::json dd;
      dd["record"] = "discrepancy";
      dd["annotator_a"] = row.a;
      dd["annotator_b"] = row.b;
      dd["value"] = row.value.has_value() ? nlohmann::json(*row.value)
                                          : nlohmann::json(nullptr);
      if (row.value.has_value()) {
        dd["tau_b"] = row.score.tau_b;
        dd["concordant"] = row.score.concordant;
        dd["discordant"] = row.score.discordant;
        dd["tied_x"] = row.score.tied_x;
        dd["tied_y"] = row.score.tied_y;
      }
      if (row.se.has_value()) {
        dd["standard_error"] = row.se->standard_error;
        dd["bootstrap_replicates_used"] = row.se->replicates_used;
      }
      out << dd.dump() << "\n";
    }
  }

  {
    nlohmann::json m;
    m["principle_ids"] = pid_list;
    m["conflict_frequency"] = freq.freq;
    m["conflict_counts"] = freq.conflict_counts;
    m["total_items"] = freq.total_items;
    nlohmann::json sup = nlohmann::json::object();
    for (const auto& block : blocks)
      sup[block.id] = supremacy_to_json(block.supremacy);
    m["supremacy"] = sup;
    std::ofstream out(dir / "matrices.json", std::ios::trunc);
    out << m.dump(2) << "\n";
  }

  {
    std::ostringstream s;
    s << "discretion analysis (" << manifest.hash() << ")\n";
    s << "dataset: " << manifest.dataset_path << " ["
      << manifest.dataset_format << "], " << n_items << "/"
      << data.items.size() << " items with complete judgments\n";
    s << "oracle: " << manifest.oracle_model_id << ", template "
      << manifest.template_version
      << ", positional-bias rate " << pct(cache.positional_bias_rate())
      << "\n\n";

    s << "principle agreement (n=" << agreement.total << ")\n";
    for (auto c : {AgreementCase::Consensus, AgreementCase::Conflict,
                   AgreementCase::Indifference}) {
      s << "  " << to_string(c) << ": " << pct(agreement.fractions.at(c))
        << " (" << agreement.counts.at(c) << ")\n";
    }
    s << "\n";

    s << "discretion arbitrariness (B=" << options.bootstrap_replicates
      << ", seed=" << options.seed << ")\n";
    for (const auto& block : blocks) {
      s << "  " << block.id << ": ";
      if (block.arbitrariness.value.has_value()) {
        double se = block.arbitrariness_se.has_value()
                        ? block.arbitrariness_se->standard_error
                        : 0.0;
        s << pct_with_se(*block.arbitrariness.value, se) << "  ["
          << block.arbitrariness.numerator << "/"
          << block.arbitrariness.denominator << "]";
      } else {
        s << "undefined (no consensus items with a nonzero label)";
      }
      s << "\n";
    }
    s << "\n";

    s << "discretion discrepancy vs " << reference << "\n";
    for (const auto& row : dd_rows) {
      s << "  " << row.b << ": ";
      if (row.value.has_value()) {
        double se = row.se.has_value() ? row.se->standard_error : 0.0;
        s << pct_with_se(*row.value, se);
      } else {
        s << "undefined";
      }
      s << "\n";
    }
    s << "\n";

    for (const auto& w : result.warnings) s << "warning: " << w << "\n";

    std::ofstream out(dir / "summary.txt", std::ios::trunc);
    out << s.str();
  }

  return result;
}

std::string render_report(const std::filesystem::path& bundle_dir) {
  std::ifstream jsonl(bundle_dir / "report.jsonl");
  if (!jsonl)
    throw DataError("no report.jsonl under '" + bundle_dir.string() + "'");

  std::ostringstream s;
  std::vector<nlohmann::json> records;
  std::string line;
  while (std::getline(jsonl, line)) {
    if (!line.empty()) records.push_back(nlohmann::json::parse(line));
  }

  s << "Discretion arbitrariness\n";
  for (const auto& r : records) {
    if (r.value("record", "") != "arbitrariness") continue;
    s << "  " << r.at("annotator").get<std::string>() << "  ";
    if (r.at("value").is_null()) {
      s << "undefined\n";
      continue;
    }
    double se = r.value("standard_error", 0.0);
    s << pct_with_se(r.at("value").get<double>(), se) << "\n";
  }
  s << "\nDiscretion discrepancy\n";
  for (const auto& r : records) {
    if (r.value("record", "") != "discrepancy") continue;
    s << "  " << r.at("annotator_a").get<std::string>() << " vs "
      << r.at("annotator_b").get<std::string>() << "  ";
    if (r.at("value").is_null()) {
      s << "undefined\n";
      continue;
    }
    double se = r.value("standard_error", 0.0);
    s << pct_with_se(r.at("value").get<double>(), se) << "\n";
  }

  std::ifstream mf(bundle_dir / "matrices.json");
  if (mf) {
    nlohmann::json m;
    mf >> m;
    auto ids = m.at("principle_ids").get<std::vector<std::string>>();
    s << "\nPrinciple supremacy (win proportion / support; '-' = never in "
         "conflict)\n";
    for (const auto& [annotator, mat] : m.at("supremacy").items()) {
      s << "  annotator " << annotator << "\n";
      const auto& wins = mat.at("wins");
      const auto& support = mat.at("support");
      for (std::size_t i = 0; i < ids.size(); ++i) {
        s << "    " << ids[i] << ":";
        for (std::size_t j = 0; j < ids.size(); ++j) {
          if (i == j || wins.at(i).at(j).is_null()) {
            s << "  -";
          } else {
            char buf[48];
            std::snprintf(buf, sizeof(buf), "  %.2f/%lld",
                          wins.at(i).at(j).get<double>(),
                          static_cast<long long>(
                              support.at(i).at(j).get<std::int64_t>()));
            s << buf;
          }
        }
        s << "\n";
      }
    }
  }
  return s.str();
}

}  // namespace discretion
