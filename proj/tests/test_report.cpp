#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "discretion/report.hpp"
#include "discretion/sim.hpp"

using namespace discretion;

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() /
             ("discretion_report_" + name)) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Simulated dataset on disk plus an AnalyzeOptions pointing at it.
struct Pipeline {
  TempDir dir;
  AnalyzeOptions options;

  explicit Pipeline(const std::string& name, std::uint64_t seed = 5)
      : dir(name) {
    SimulateConfig config;
    config.true_weights = {0.8, 0.2, -0.3, -0.7};
    config.conflicts_per_pair = 40;
    config.consensus_items = 30;
    config.indifference_items = 10;
    config.seed = seed;
    auto data = simulate_dataset(config);
    write_simulated_data(data, (dir.path / "items.jsonl").string(),
                         (dir.path / "cache.jsonl").string(),
                         (dir.path / "truth.json").string());
    // Principles file matching the simulated ids.
    {
      std::ofstream out(dir.path / "principles.jsonl");
      for (const auto& pid : data.principle_ids) {
        nlohmann::json j;
        j["principle_id"] = pid;
        j["short_name"] = pid;
        j["long_text"] = "Synthetic principle " + pid + ".";
        out << j.dump() << "\n";
      }
    }
    options.dataset.format = DatasetFormat::Generic;
    options.dataset.path = (dir.path / "items.jsonl").string();
    options.principles_path = (dir.path / "principles.jsonl").string();
    options.cache_path = (dir.path / "cache.jsonl").string();
    options.bootstrap_replicates = 30;
    options.seed = 7;
    options.out_dir = (dir.path / "reports").string();
    options.timestamp = "2026-01-01T00:00:00Z";
  }
};

}  // namespace

TEST_CASE("run_analyze writes a complete, well-formed bundle") {
  Pipeline p("bundle");
  auto result = run_analyze(p.options);

  CHECK(std::filesystem::exists(result.bundle_dir / "manifest.json"));
  CHECK(std::filesystem::exists(result.bundle_dir / "report.jsonl"));
  CHECK(std::filesystem::exists(result.bundle_dir / "matrices.json"));
  CHECK(std::filesystem::exists(result.bundle_dir / "summary.txt"));

  // Every record parses; scalar records carry counts or SE alongside.
  std::ifstream jsonl(result.bundle_dir / "report.jsonl");
  std::string line;
  bool saw_arbitrariness = false;
  bool saw_agreement = false;
  bool saw_self_dd = false;
  bool saw_principle_prefs = false;
  while (std::getline(jsonl, line)) {
    auto j = nlohmann::json::parse(line);
    std::string record = j.at("record").get<std::string>();
    if (record == "arbitrariness") {
      saw_arbitrariness = true;
      CHECK(j.contains("numerator"));
      CHECK(j.contains("denominator"));
      if (!j.at("value").is_null()) CHECK(j.contains("standard_error"));
    }
    if (record == "agreement") {
      saw_agreement = true;
      CHECK(j.at("counts").size() == 3);
      CHECK(j.contains("total"));
    }
    if (record == "discrepancy" &&
        j.at("annotator_a") == j.at("annotator_b")) {
      saw_self_dd = true;
      CHECK(j.at("value").get<double>() == 0.0);
    }
    if (record == "principle_preferences") {
      saw_principle_prefs = true;
      std::int64_t denom = j.at("denominator").get<std::int64_t>();
      for (const auto& [pid, counts] : j.at("principles").items()) {
        (void)pid;
        std::int64_t total = counts.at("agree").get<std::int64_t>() +
                             counts.at("disagree").get<std::int64_t>() +
                             counts.at("indifferent").get<std::int64_t>();
        CHECK(total == denom);
      }
    }
  }
  CHECK(saw_arbitrariness);
  CHECK(saw_agreement);
  CHECK(saw_self_dd);
  CHECK(saw_principle_prefs);

  // Supremacy cells with zero support serialize as null, never 0.0.
  nlohmann::json matrices;
  std::ifstream mf(result.bundle_dir / "matrices.json");
  mf >> matrices;
  const auto& sup = matrices.at("supremacy").at("synthetic");
  const auto& wins = sup.at("wins");
  const auto& support = sup.at("support");
  bool saw_null_diagonal = false;
  for (std::size_t i = 0; i < wins.size(); ++i) {
    for (std::size_t j = 0; j < wins.size(); ++j) {
      if (support.at(i).at(j).get<std::int64_t>() == 0) {
        CHECK(wins.at(i).at(j).is_null());
        if (i == j) saw_null_diagonal = true;
      } else {
        CHECK_FALSE(wins.at(i).at(j).is_null());
      }
    }
  }
  CHECK(saw_null_diagonal);

  // The summary renders value-with-SE rows.
  std::string summary = slurp(result.bundle_dir / "summary.txt");
  std::regex row(R"(\d+\.\d% \(± \d+\.\d%\))");
  CHECK(std::regex_search(summary, row));
  CHECK(summary.find("consensus") != std::string::npos);
}

TEST_CASE("equal manifests produce byte-identical bundles") {
  Pipeline p("determinism");
  auto first = run_analyze(p.options);
  auto bytes_manifest = slurp(first.bundle_dir / "manifest.json");
  auto bytes_report = slurp(first.bundle_dir / "report.jsonl");
  auto bytes_matrices = slurp(first.bundle_dir / "matrices.json");
  auto bytes_summary = slurp(first.bundle_dir / "summary.txt");

  auto second = run_analyze(p.options);
  CHECK(first.bundle_dir == second.bundle_dir);  // keyed by manifest hash
  CHECK(slurp(second.bundle_dir / "manifest.json") == bytes_manifest);
  CHECK(slurp(second.bundle_dir / "report.jsonl") == bytes_report);
  CHECK(slurp(second.bundle_dir / "matrices.json") == bytes_matrices);
  CHECK(slurp(second.bundle_dir / "summary.txt") == bytes_summary);

  // A different seed is a different manifest, hence a different bundle.
  auto changed = p.options;
  changed.seed = 8;
  auto third = run_analyze(changed);
  CHECK(third.bundle_dir != first.bundle_dir);
}

TEST_CASE("render_report prints the table shapes") {
  Pipeline p("render");
  auto result = run_analyze(p.options);
  std::string text = render_report(result.bundle_dir);
  CHECK(text.find("Discretion arbitrariness") != std::string::npos);
  CHECK(text.find("Discretion discrepancy") != std::string::npos);
  CHECK(text.find("Principle supremacy") != std::string::npos);
  std::regex row(R"(\d+\.\d% \(± \d+\.\d%\))");
  CHECK(std::regex_search(text, row));
  CHECK(text.find(" - ") != std::string::npos);  // empty supremacy cells
}

TEST_CASE("warnings flag an annotator that is also the oracle") {
  Pipeline p("oracle_bias");
  // Rewrite the cache header so the oracle model id collides with the
  // annotator id.
  auto cache = load_judgment_cache(p.options.cache_path);
  cache.model_id = "synthetic";
  save_judgment_cache(cache, p.options.cache_path);

  auto result = run_analyze(p.options);
  REQUIRE(result.warnings.size() == 1);
  CHECK(result.warnings[0].find("oracle") != std::string::npos);
  std::string summary = slurp(result.bundle_dir / "summary.txt");
  CHECK(summary.find("warning:") != std::string::npos);
}

TEST_CASE("missing cache is an actionable error") {
  Pipeline p("missing_cache");
  p.options.cache_path = (p.dir.path / "nonexistent.jsonl").string();
  CHECK_THROWS_AS(run_analyze(p.options), DataError);
}

TEST_CASE("simulate: fixed seed reproduces the dataset bit for bit") {
  SimulateConfig config;
  config.true_weights = {0.5, -0.5};
  config.conflicts_per_pair = 50;
  config.seed = 123;
  auto a = simulate_dataset(config);
  auto b = simulate_dataset(config);
  CHECK(a.items.size() == b.items.size());
  for (std::size_t i = 0; i < a.items.size(); ++i)
    CHECK(a.items[i] == b.items[i]);
  CHECK(a.judgments == b.judgments);
  CHECK(a.labels.labels == b.labels.labels);

  config.seed = 124;
  auto c = simulate_dataset(config);
  CHECK(c.labels.labels != a.labels.labels);
}

TEST_CASE("simulate: equal true weights drive empirical supremacy to 0.5") {
  SimulateConfig config;
  config.true_weights = {0.0, 0.0};
  config.conflicts_per_pair = 5000;
  config.seed = 9;
  auto data = simulate_dataset(config);
  auto sup = supremacy_matrix(data.labels, data.judgments);
  auto p = sup.at(0, 1).proportion();
  REQUIRE(p.has_value());
  CHECK(*p == doctest::Approx(0.5).epsilon(0.06));  // tolerance 0.03 absolute
  CHECK(std::abs(*p - 0.5) < 0.03);
}
