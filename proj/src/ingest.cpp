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

#include "discretion/ingest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace discretion {

namespace {

constexpr const char* kAssistantMarker = "\n\nAssistant:";

std::string line_error(const std::string& path, int line_no,
                       const std::string& what) {
  return path + ":" + std::to_string(line_no) + ": " + what;
}

// HH records carry full transcripts; the shared conversation up to the
// last assistant turn is the prompt, the divergent tails are the
// responses.
void split_hh_record(const std::string& chosen, const std::string& rejected,
                     std::string* prompt, std::string* chosen_response,
                     std::string* rejected_response) {
  std::size_t common = 0;
  std::size_t limit = std::min(chosen.size(), rejected.size());
  while (common < limit && chosen[common] == rejected[common]) ++common;
  std::string_view prefix(chosen.data(), common);
  std::size_t marker = prefix.rfind(kAssistantMarker);
  if (marker == std::string_view::npos)
    throw DataError("no assistant turn shared by chosen and rejected");
  std::size_t boundary = marker + std::string_view(kAssistantMarker).size();
  *prompt = chosen.substr(0, boundary);
  auto tail = [boundary](const std::string& s) {
    std::string t = s.substr(boundary);
    if (!t.empty() && t.front() == ' ') t.erase(t.begin());
    return t;
  };
  *chosen_response = tail(chosen);
  *rejected_response = tail(rejected);
  if (chosen_response->empty() || rejected_response->empty())
    throw DataError("empty response after the last assistant turn");
}

std::optional<TernaryPreference> label_from_response_index(
    const nlohmann::json& j, const char* field) {
  if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
  if (!j.at(field).is_number_integer()) return std::nullopt;
  int idx = j.at(field).get<int>();
  if (idx == 0) return TernaryPreference::prefers_response0();
  if (idx == 1) return TernaryPreference::prefers_response1();
  return std::nullopt;  // PKU marks invalid rows with out-of-range ids
}

}  // namespace

DatasetFormat dataset_format_from_string(const std::string& name) {
  if (name == "hh") return DatasetFormat::HHChosenRejected;
  if (name == "pku-single") return DatasetFormat::PKUSingle;
  if (name == "pku-dual") return DatasetFormat::PKUDual;
  if (name == "generic") return DatasetFormat::Generic;
  throw DataError("unknown dataset format '" + name +
                  "' (expected hh, pku-single, pku-dual or generic)");
}

const char* to_string(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::HHChosenRejected:
      return "hh";
    case DatasetFormat::PKUSingle:
      return "pku-single";
    case DatasetFormat::PKUDual:
      return "pku-dual";
    case DatasetFormat::Generic:
      return "generic";
  }
  return "unknown";
}

LoadedDataset load_dataset(const DatasetDescriptor& desc) {
  std::ifstream in(desc.path);
  if (!in) throw DataError("cannot open dataset file '" + desc.path + "'");

  std::vector<std::string> dims = desc.label_dimensions;
  if (dims.empty()) {
    switch (desc.format) {
      case DatasetFormat::HHChosenRejected:
      case DatasetFormat::PKUSingle:
        dims = {"general"};
        break;
      case DatasetFormat::PKUDual:
        dims = {"helpfulness", "safety"};
        break;
      case DatasetFormat::Generic:
        break;  // discovered from the records
    }
  }

  LoadedDataset out;
  std::map<std::string, std::size_t> annotator_index;
  auto labels_for = [&](const std::string& annotator_id) -> AnnotatorLabels& {
    auto it = annotator_index.find(annotator_id);
    if (it == annotator_index.end()) {
      out.labels.push_back(AnnotatorLabels{annotator_id, {}});
      it = annotator_index.emplace(annotator_id, out.labels.size() - 1).first;
    }
    return out.labels[it->second];
  };
  for (const auto& d : dims) labels_for(d);

  std::set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(line_error(desc.path, line_no, e.what()));
    }
    try {
      PreferenceItem item;
      switch (desc.format) {
        case DatasetFormat::HHChosenRejected: {
          std::string chosen = j.at("chosen").get<std::string>();
          std::string rejected = j.at("rejected").get<std::string>();
          std::string prompt, chosen_resp, rejected_resp;
          split_hh_record(chosen, rejected, &prompt, &chosen_resp,
                          &rejected_resp);
          // chosen := response1 so the human label is a constant +1.
          item = make_item(prompt, rejected_resp, chosen_resp);
          labels_for(dims[0]).labels[item.item_id] =
              TernaryPreference::prefers_response1();
          break;
        }
        case DatasetFormat::PKUSingle: {
          item = make_item(j.at("prompt").get<std::string>(),
                           j.at("response_0").get<std::string>(),
                           j.at("response_1").get<std::string>());
          if (auto l = label_from_response_index(j, "better_response_id"))
            labels_for(dims[0]).labels[item.item_id] = *l;
          break;
        }
        case DatasetFormat::PKUDual: {
          item = make_item(j.at("prompt").get<std::string>(),
                           j.at("response_0").get<std::string>(),
                           j.at("response_1").get<std::string>());
          if (auto l = label_from_response_index(j, "better_response_id"))
            labels_for(dims[0]).labels[item.item_id] = *l;
          if (auto l = label_from_response_index(j, "safer_response_id"))
            labels_for(dims[1]).labels[item.item_id] = *l;
          break;
        }
        case DatasetFormat::Generic: {
          std::optional<std::string> id;
          if (j.contains("id") && !j.at("id").is_null())
            id = j.at("id").get<std::string>();
          item = make_item(j.at("prompt").get<std::string>(),
                           j.at("response0").get<std::string>(),
                           j.at("response1").get<std::string>(), id);
          if (j.contains("labels")) {
            for (const auto& [annotator, value] : j.at("labels").items()) {
              if (!value.is_number_integer())
                throw DataError("label for '" + annotator +
                                "' must be an integer");
              labels_for(annotator).labels[item.item_id] =
                  TernaryPreference::from_int(value.get<int>());
            }
          }
          break;
        }
      }
      if (!seen_ids.insert(item.item_id).second)
        throw DataError("duplicate item id '" + item.item_id + "'");
      out.items.push_back(std::move(item));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(line_error(desc.path, line_no, e.what()));
    } catch (const DataError& e) {
      throw DataError(line_error(desc.path, line_no, e.what()));
    }
  }
  return out;
}

void save_generic(const LoadedDataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write dataset file '" + path + "'");
  for (const auto& item : data.items) {
    nlohmann::json j;
    j["id"] = item.item_id;
    j["prompt"] = item.prompt;
    j["response0"] = item.response0;
    j["response1"] = item.response1;
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& ann : data.labels) {
      auto it = ann.labels.find(item.item_id);
      if (it != ann.labels.end()) labels[ann.annotator_id] = it->second.value();
    }
    j["labels"] = labels;
    out << j.dump() << "\n";
  }
}

RawChoice raw_choice_from_string(const std::string& raw) {
  if (raw == "A") return RawChoice::ResponseA;
  if (raw == "B") return RawChoice::ResponseB;
  if (raw == "NA") return RawChoice::NA;
  throw DataError("unparseable raw choice '" + raw + "'");
}

const char* to_string(RawChoice c) {
  switch (c) {
    case RawChoice::ResponseA:
      return "A";
    case RawChoice::ResponseB:
      return "B";
    case RawChoice::NA:
      return "NA";
  }
  return "?";
}

SwapMergeFlag swap_merge_flag_from_string(const std::string& s) {
  if (s == "consistent") return SwapMergeFlag::Consistent;
  if (s == "positional_bias") return SwapMergeFlag::PositionalBias;
  if (s == "both_na") return SwapMergeFlag::BothNA;
  if (s == "mixed_na") return SwapMergeFlag::MixedNA;
  throw DataError("unknown swap-merge flag '" + s + "'");
}

const char* to_string(SwapMergeFlag f) {
  switch (f) {
    case SwapMergeFlag::Consistent:
      return "consistent";
    case SwapMergeFlag::PositionalBias:
      return "positional_bias";
    case SwapMergeFlag::BothNA:
      return "both_na";
    case SwapMergeFlag::MixedNA:
      return "mixed_na";
  }
  return "?";
}

SwapMergeOutcome merge_swapped(RawChoice first_order,
                               RawChoice second_order_swapped) {
  // Map slots to the underlying preference sign. First order: slot A held
  // response0. Second order: slot A held response1.
  auto sign_first = [](RawChoice c) -> std::optional<int> {
    if (c == RawChoice::ResponseA) return -1;
    if (c == RawChoice::ResponseB) return +1;
    return std::nullopt;
  };
  auto sign_second = [](RawChoice c) -> std::optional<int> {
    if (c == RawChoice::ResponseA) return +1;
    if (c == RawChoice::ResponseB) return -1;
    return std::nullopt;
  };
  auto s1 = sign_first(first_order);
  auto s2 = sign_second(second_order_swapped);

  SwapMergeOutcome out;
  if (!s1.has_value() && !s2.has_value()) {
    out.flag = SwapMergeFlag::BothNA;
  } else if (!s1.has_value() || !s2.has_value()) {
    out.flag = SwapMergeFlag::MixedNA;
  } else if (*s1 == *s2) {
    out.flag = SwapMergeFlag::Consistent;
    out.judgment = TernaryPreference::from_int(*s1);
  } else {
    out.flag = SwapMergeFlag::PositionalBias;
  }
  return out;
}

SwapMergeOutcome merge_swapped(const std::string& first_order,
                               const std::string& second_order_swapped) {
  return merge_swapped(raw_choice_from_string(first_order),
                       raw_choice_from_string(second_order_swapped));
}

JudgmentMatrix JudgmentCache::to_judgment_matrix(
    const std::vector<std::string>& principle_ids,
    const std::vector<std::string>& item_ids,
    std::vector<std::pair<std::string, std::string>>* missing_cells) const {
  JudgmentMatrix matrix(principle_ids);
  for (const auto& item_id : item_ids) {
    std::vector<TernaryPreference> row;
    std::vector<std::string> excluded_here;
    row.reserve(principle_ids.size());
    bool complete = true;
    for (const auto& pid : principle_ids) {
      auto it = cells.find({item_id, pid});
      if (it == cells.end()) {
        if (missing_cells) missing_cells->push_back({item_id, pid});
        complete = false;
        continue;
      }
      row.push_back(it->second.judgment);
      if (it->second.flag == SwapMergeFlag::PositionalBias)
        excluded_here.push_back(pid);
    }
    if (!complete) continue;
    matrix.set_row(item_id, std::move(row));
    for (const auto& pid : excluded_here) matrix.mark_excluded(item_id, pid);
  }
  return matrix;
}

double JudgmentCache::positional_bias_rate() const {
  if (cells.empty()) return 0.0;
  std::int64_t biased = 0;
  for (const auto& [key, entry] : cells) {
    (void)key;
    if (entry.flag == SwapMergeFlag::PositionalBias) ++biased;
  }
  return static_cast<double>(biased) / static_cast<double>(cells.size());
}

JudgmentCache load_judgment_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open judgment cache '" + path + "'");
  JudgmentCache cache;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(line_error(path, line_no, e.what()));
    }
    try {
      if (!header_seen) {
        int version = j.at("cache_version").get<int>();
        if (version != JudgmentCache::kVersion)
          throw DataError("cache version " + std::to_string(version) +
                          " does not match supported version " +
                          std::to_string(JudgmentCache::kVersion));
        cache.model_id = j.at("model_id").get<std::string>();
        cache.template_version = j.at("template_version").get<std::string>();
        cache.temperature = j.value("temperature", 0.0);
        header_seen = true;
        continue;
      }
      JudgmentCacheEntry entry;
      entry.judgment =
          TernaryPreference::from_int(j.at("judgment").get<int>());
      entry.flag = swap_merge_flag_from_string(j.at("flag").get<std::string>());
      entry.raw_first = j.at("raw_first").get<std::string>();
      entry.raw_second = j.at("raw_second").get<std::string>();
      std::string item_id = j.at("item_id").get<std::string>();
      std::string principle_id = j.at("principle_id").get<std::string>();
      // Later lines win so a resumed run can overwrite earlier cells.
      cache.cells[{item_id, principle_id}] = std::move(entry);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(line_error(path, line_no, e.what()));
    }
  }
  if (!header_seen)
    throw DataError("judgment cache '" + path + "' has no header line");
  return cache;
}

namespace {

nlohmann::json cache_header_json(const std::string& model_id,
                                 const std::string& template_version,
                                 double temperature) {
  nlohmann::json j;
  j["cache_version"] = JudgmentCache::kVersion;
  j["model_id"] = model_id;
  j["template_version"] = template_version;
  j["temperature"] = temperature;
  return j;
}

nlohmann::json cache_entry_json(const std::string& item_id,
                                const std::string& principle_id,
                                const JudgmentCacheEntry& entry) {
  nlohmann::json j;
  j["item_id"] = item_id;
  j["principle_id"] = principle_id;
  j["judgment"] = entry.judgment.value();
  j["flag"] = to_string(entry.flag);
  j["raw_first"] = entry.raw_first;
  j["raw_second"] = entry.raw_second;
  return j;
}

}  // namespace

void save_judgment_cache(const JudgmentCache& cache, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write judgment cache '" + path + "'");
  out << cache_header_json(cache.model_id, cache.template_version,
                           cache.temperature)
             .dump()
      << "\n";
  for (const auto& [key, entry] : cache.cells) {
    out << cache_entry_json(key.first, key.second, entry).dump() << "\n";
  }
}

JudgmentCacheWriter::JudgmentCacheWriter(const std::string& path,
                                         const std::string& model_id,
                                         const std::string& template_version,
                                         double temperature)
    : path_(path) {
  std::ifstream probe(path);
  if (probe && probe.peek() != std::ifstream::traits_type::eof()) {
    JudgmentCache existing = load_judgment_cache(path);
    if (existing.model_id != model_id ||
        existing.template_version != template_version) {
      throw DataError("judgment cache '" + path + "' was built with model '" +
                      existing.model_id + "' template '" +
                      existing.template_version +
                      "'; refusing to mix with model '" + model_id +
                      "' template '" + template_version + "'");
    }
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write judgment cache '" + path + "'");
  out << cache_header_json(model_id, template_version, temperature).dump()
      << "\n";
}

void JudgmentCacheWriter::append(const std::string& item_id,
                                 const std::string& principle_id,
                                 const JudgmentCacheEntry& entry) {
  std::ofstream out(path_, std::ios::app);
  if (!out) throw DataError("cannot append to judgment cache '" + path_ + "'");
  out << cache_entry_json(item_id, principle_id, entry).dump() << "\n";
  out.flush();
}

}  // namespace discretion
