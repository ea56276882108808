#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "discretion/ingest.hpp"

using namespace discretion;

namespace {

// Scratch file in the build tree, removed on destruction.
struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& name)
      : path(std::filesystem::temp_directory_path() /
             ("discretion_test_" + name)) {
    std::filesystem::remove(path);
  }
  ~TempFile() { std::filesystem::remove(path); }

  void write(const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    out << content;
  }
};

}  // namespace

TEST_CASE("hh records split into prompt and response tails, label +1") {
  TempFile f("hh.jsonl");
  f.write(
      R"({"chosen": "\n\nHuman: How do I fix it?\n\nAssistant: Try A.", "rejected": "\n\nHuman: How do I fix it?\n\nAssistant: Try B."})"
      "\n");
  DatasetDescriptor desc{DatasetFormat::HHChosenRejected, f.path.string(), {}};
  auto data = load_dataset(desc);
  REQUIRE(data.items.size() == 1);
  const auto& item = data.items[0];
  CHECK(item.prompt == "\n\nHuman: How do I fix it?\n\nAssistant:");
  CHECK(item.response0 == "Try B.");  // rejected
  CHECK(item.response1 == "Try A.");  // chosen
  REQUIRE(data.labels.size() == 1);
  CHECK(data.labels[0].annotator_id == "general");
  CHECK(data.labels[0].labels.at(item.item_id).value() == +1);
}

TEST_CASE("hh multi-turn transcripts split at the last shared assistant "
          "turn") {
  TempFile f("hh_multi.jsonl");
  f.write(
      R"({"chosen": "\n\nHuman: Hi\n\nAssistant: Hello\n\nHuman: Help?\n\nAssistant: Sure thing", "rejected": "\n\nHuman: Hi\n\nAssistant: Hello\n\nHuman: Help?\n\nAssistant: No"})"
      "\n");
  DatasetDescriptor desc{DatasetFormat::HHChosenRejected, f.path.string(), {}};
  auto data = load_dataset(desc);
  REQUIRE(data.items.size() == 1);
  CHECK(data.items[0].prompt ==
        "\n\nHuman: Hi\n\nAssistant: Hello\n\nHuman: Help?\n\nAssistant:");
  CHECK(data.items[0].response1 == "Sure thing");
  CHECK(data.items[0].response0 == "No");
}

TEST_CASE("pku dual record maps both response indices") {
  TempFile f("pku.jsonl");
  f.write(
      R"({"prompt": "q1", "response_0": "r0", "response_1": "r1", "better_response_id": 1, "safer_response_id": 0})"
      "\n");
  DatasetDescriptor desc{DatasetFormat::PKUDual, f.path.string(), {}};
  auto data = load_dataset(desc);
  REQUIRE(data.items.size() == 1);
  REQUIRE(data.labels.size() == 2);
  const auto& id = data.items[0].item_id;
  CHECK(data.labels[0].annotator_id == "helpfulness");
  CHECK(data.labels[0].labels.at(id).value() == +1);
  CHECK(data.labels[1].annotator_id == "safety");
  CHECK(data.labels[1].labels.at(id).value() == -1);
}

TEST_CASE("pku single: out-of-range index means no label, not an error") {
  TempFile f("pku1.jsonl");
  f.write(
      R"({"prompt": "q1", "response_0": "r0", "response_1": "r1", "better_response_id": 0})"
      "\n"
      R"({"prompt": "q2", "response_0": "r0", "response_1": "r1", "better_response_id": -1})"
      "\n");
  DatasetDescriptor desc{DatasetFormat::PKUSingle, f.path.string(), {}};
  auto data = load_dataset(desc);
  REQUIRE(data.items.size() == 2);
  CHECK(data.labels[0].labels.size() == 1);
  CHECK(data.labels[0].labels.at(data.items[0].item_id).value() == -1);
}

TEST_CASE("generic records honor explicit ids and label maps") {
  TempFile f("generic.jsonl");
  f.write(
      R"({"id": "x1", "prompt": "p", "response0": "a", "response1": "b", "labels": {"human": 1, "rm": -1, "llm": 0}})"
      "\n");
  DatasetDescriptor desc{DatasetFormat::Generic, f.path.string(), {}};
  auto data = load_dataset(desc);
  REQUIRE(data.items.size() == 1);
  CHECK(data.items[0].item_id == "x1");
  REQUIRE(data.labels.size() == 3);
  for (const auto& ann : data.labels) {
    CHECK(ann.labels.count("x1") == 1);
  }
}

TEST_CASE("three-line fixture reloads with identical ids") {
  TempFile f("stable.jsonl");
  f.write(
      R"({"prompt": "p1", "response0": "a", "response1": "b", "labels": {}})"
      "\n"
      R"({"prompt": "p2", "response0": "c", "response1": "d", "labels": {}})"
      "\n"
      R"({"prompt": "p3", "response0": "e", "response1": "f", "labels": {}})"
      "\n");
  DatasetDescriptor desc{DatasetFormat::Generic, f.path.string(), {}};
  auto first = load_dataset(desc);
  auto second = load_dataset(desc);
  REQUIRE(first.items.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(first.items[i].item_id == second.items[i].item_id);
}

TEST_CASE("malformed lines name the line number") {
  TempFile f("broken.jsonl");
  f.write(
      R"({"prompt": "p1", "response0": "a", "response1": "b"})"
      "\n"
      "this is not json\n");
  DatasetDescriptor desc{DatasetFormat::Generic, f.path.string(), {}};
  try {
    load_dataset(desc);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
}

TEST_CASE("generic round-trip preserves every field") {
  TempFile src("roundtrip_src.jsonl");
  src.write(
      R"({"id": "k1", "prompt": "p é", "response0": "a\nmultiline", "response1": "b", "labels": {"human": 1}})"
      "\n"
      R"({"id": "k2", "prompt": "q", "response0": "c", "response1": "d", "labels": {"human": -1, "rm": 0}})"
      "\n");
  DatasetDescriptor desc{DatasetFormat::Generic, src.path.string(), {}};
  auto data = load_dataset(desc);

  TempFile dst("roundtrip_dst.jsonl");
  save_generic(data, dst.path.string());
  DatasetDescriptor desc2{DatasetFormat::Generic, dst.path.string(), {}};
  auto reloaded = load_dataset(desc2);

  REQUIRE(reloaded.items.size() == data.items.size());
  for (std::size_t i = 0; i < data.items.size(); ++i)
    CHECK(reloaded.items[i] == data.items[i]);
  REQUIRE(reloaded.labels.size() == data.labels.size());
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    CHECK(reloaded.labels[i].annotator_id == data.labels[i].annotator_id);
    CHECK(reloaded.labels[i].labels == data.labels[i].labels);
  }
}

TEST_CASE("merge_swapped covers the four outcomes") {
  // Both orders picked response0: first order slot A, second order slot B.
  auto consistent = merge_swapped(RawChoice::ResponseA, RawChoice::ResponseB);
  CHECK(consistent.flag == SwapMergeFlag::Consistent);
  CHECK(consistent.judgment.value() == -1);
  CHECK_FALSE(consistent.excluded());

  // Slot A both times: different underlying responses.
  auto biased = merge_swapped(RawChoice::ResponseA, RawChoice::ResponseA);
  CHECK(biased.flag == SwapMergeFlag::PositionalBias);
  CHECK(biased.judgment.value() == 0);
  CHECK(biased.excluded());

  auto both_na = merge_swapped(RawChoice::NA, RawChoice::NA);
  CHECK(both_na.flag == SwapMergeFlag::BothNA);
  CHECK(both_na.judgment.value() == 0);

  auto mixed = merge_swapped(RawChoice::NA, RawChoice::ResponseB);
  CHECK(mixed.flag == SwapMergeFlag::MixedNA);
  CHECK(mixed.judgment.value() == 0);

  // Consistent preference for response1.
  auto for_r1 = merge_swapped(RawChoice::ResponseB, RawChoice::ResponseA);
  CHECK(for_r1.flag == SwapMergeFlag::Consistent);
  CHECK(for_r1.judgment.value() == +1);

  CHECK_THROWS_AS(merge_swapped("A", "Q"), DataError);
  try {
    merge_swapped("maybe", "A");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("maybe") != std::string::npos);
  }
}

TEST_CASE("judgment cache round-trips cells, flags and provenance") {
  JudgmentCache cache;
  cache.model_id = "test-model";
  cache.template_version = "v1";
  cache.temperature = 0.0;
  cache.cells[{"i1", "c1"}] = {TernaryPreference::prefers_response1(),
                               SwapMergeFlag::Consistent, "B", "A"};
  cache.cells[{"i1", "c2"}] = {TernaryPreference::indifferent(),
                               SwapMergeFlag::PositionalBias, "A", "A"};
  cache.cells[{"i2", "c1"}] = {TernaryPreference::indifferent(),
                               SwapMergeFlag::BothNA, "NA", "NA"};
  cache.cells[{"i2", "c2"}] = {TernaryPreference::prefers_response0(),
                               SwapMergeFlag::Consistent, "A", "B"};

  TempFile f("cache.jsonl");
  save_judgment_cache(cache, f.path.string());
  auto loaded = load_judgment_cache(f.path.string());
  CHECK(loaded.model_id == cache.model_id);
  CHECK(loaded.template_version == cache.template_version);
  CHECK(loaded.temperature == cache.temperature);
  CHECK(loaded.cells == cache.cells);

  auto matrix = cache.to_judgment_matrix({"c1", "c2"}, {"i1", "i2"});
  auto matrix2 = loaded.to_judgment_matrix({"c1", "c2"}, {"i1", "i2"});
  CHECK(matrix == matrix2);
  CHECK(matrix.is_excluded("i1", "c2"));
  CHECK(matrix.row("i1")->at(1).value() == 0);

  CHECK(cache.positional_bias_rate() == doctest::Approx(0.25));
}

TEST_CASE("cache version mismatch is an error") {
  TempFile f("cache_v99.jsonl");
  f.write(
      R"({"cache_version": 99, "model_id": "m", "template_version": "v"})"
      "\n");
  CHECK_THROWS_AS(load_judgment_cache(f.path.string()), DataError);

  TempFile headerless("cache_nohdr.jsonl");
  headerless.write(
      R"({"item_id": "i", "principle_id": "c", "judgment": 0, "flag": "both_na", "raw_first": "NA", "raw_second": "NA"})"
      "\n");
  CHECK_THROWS_AS(load_judgment_cache(headerless.path.string()), DataError);
}

TEST_CASE("cache writer appends resumable lines and rejects foreign "
          "metadata") {
  TempFile f("cache_writer.jsonl");
  {
    JudgmentCacheWriter writer(f.path.string(), "m1", "v1");
    writer.append("i1", "c1",
                  {TernaryPreference::prefers_response1(),
                   SwapMergeFlag::Consistent, "B", "A"});
  }
  {
    // Reopen and extend: same metadata is accepted.
    JudgmentCacheWriter writer(f.path.string(), "m1", "v1");
    writer.append("i2", "c1",
                  {TernaryPreference::indifferent(), SwapMergeFlag::BothNA,
                   "NA", "NA"});
  }
  auto cache = load_judgment_cache(f.path.string());
  CHECK(cache.cells.size() == 2);

  CHECK_THROWS_AS(JudgmentCacheWriter(f.path.string(), "other-model", "v1"),
                  DataError);
  CHECK_THROWS_AS(JudgmentCacheWriter(f.path.string(), "m1", "v2"),
                  DataError);
}

TEST_CASE("incomplete rows are skipped and reported when building the "
          "matrix") {
  JudgmentCache cache;
  cache.model_id = "m";
  cache.template_version = "v1";
  cache.cells[{"i1", "c1"}] = {TernaryPreference::prefers_response1(),
                               SwapMergeFlag::Consistent, "B", "A"};
  cache.cells[{"i1", "c2"}] = {TernaryPreference::indifferent(),
                               SwapMergeFlag::BothNA, "NA", "NA"};
  cache.cells[{"i2", "c1"}] = {TernaryPreference::prefers_response0(),
                               SwapMergeFlag::Consistent, "A", "B"};

  std::vector<std::pair<std::string, std::string>> missing;
  auto matrix = cache.to_judgment_matrix({"c1", "c2"}, {"i1", "i2"}, &missing);
  CHECK(matrix.num_items() == 1);
  REQUIRE(missing.size() == 1);
  CHECK(missing[0] == std::make_pair(std::string("i2"), std::string("c2")));
}
