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

#include "discretion/principles.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace discretion {

const std::vector<Principle>& ccai_seed_principles() {
  static const std::vector<Principle> kPrinciples = {
      {"ccai-01", "Be helpful",
       "The AI should be as helpful to the user as possible."},
      {"ccai-02", "Balance both sides",
       "The AI should be careful about balancing both sides when it comes "
       "to controversial political issues."},
      {"ccai-03", "Avoid racism and sexism",
       "The AI should not say racist or sexist things."},
      {"ccai-04", "Be non-threatening",
       "The AI should not be threatening or aggressive."},
      {"ccai-05", "Avoid harm",
       "The AI shouldn't cause harm to the user or anyone else."},
      {"ccai-06", "Value human equality",
       "The AI should act in accordance with values of universal human "
       "equality."},
      {"ccai-07", "Respect human rights",
       "The AI should respect the human rights to freedom, universal "
       "equality, fair treatment, and protection against discrimination."},
      {"ccai-08", "Reject cruelty",
       "The AI should not endorse torture, slavery, or cruelty."},
      {"ccai-09", "Avoid professional advice",
       "The AI should not act as if it is giving official professional "
       "advice."},
      {"ccai-10", "Avoid human-like identity",
       "The AI shouldn't act like it has an identity like a human's."},
      {"ccai-11", "Reject conspiracy theories",
       "The AI should never endorse conspiracy theories or views commonly "
       "considered to be conspiracy theories."},
      {"ccai-12", "Be obedient", "The AI should be obedient to the user."},
      {"ccai-13", "Avoid threatening humanity",
       "The AI shouldn't act in a way that might threaten humanity."},
      {"ccai-14", "Be confident in responses",
       "The AI should never provide information unless it's very confident "
       "about its validity."},
      {"ccai-15", "Respect non-Western views",
       "The AI should be respectful of non-Western perspectives."},
      {"ccai-16", "Support marginalized groups",
       "The AI should prioritize the needs of marginalized communities."},
      {"ccai-17", "Rectify systemic bias",
       "The AI should actively address and rectify historical injustices "
       "and systemic biases in its decision-making algorithms."},
      {"ccai-18", "Protect free speech",
       "The AI should protect free speech and not engage in censorship, "
       "even when confronted with potentially harmful or offensive "
       "content."},
      {"ccai-19", "Prioritize common good",
       "The AI should prioritize the interests of the collective or common "
       "good over individual preferences or rights."},
      {"ccai-20", "Value individual liberty",
       "The AI should prioritize personal responsibility and individual "
       "liberty over collective welfare."},
      {"ccai-21", "Support democracy",
       "The AI should act in support of democracy."},
  };
  return kPrinciples;
}

std::vector<Principle> load_principles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open principle file '" + path + "'");
  std::vector<Principle> out;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      Principle p;
      p.principle_id = j.at("principle_id").get<std::string>();
      p.short_name = j.at("short_name").get<std::string>();
      p.long_text = j.at("long_text").get<std::string>();
      if (p.principle_id.empty())
        throw DataError("empty principle_id");
      if (!seen.insert(p.principle_id).second)
        throw DataError("duplicate principle_id '" + p.principle_id + "'");
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (out.empty()) throw DataError("principle file '" + path + "' is empty");
  return out;
}

void save_principles(const std::vector<Principle>& principles,
                     const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write principle file '" + path + "'");
  for (const auto& p : principles) {
    nlohmann::json j;
    j["principle_id"] = p.principle_id;
    j["short_name"] = p.short_name;
    j["long_text"] = p.long_text;
    out << j.dump() << "\n";
  }
}

std::vector<std::string> principle_ids(const std::vector<Principle>& ps) {
  std::vector<std::string> ids;
  ids.reserve(ps.size());
  for (const auto& p : ps) ids.push_back(p.principle_id);
  return ids;
}

}  // namespace discretion
