// Copyright 2026 The attackmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "attackmap/ground_truth.hpp"

#include <json.hpp>

#include "attackmap/error.hpp"
#include "attackmap/text.hpp"

namespace attackmap {

void GroundTruth::validate() const {
  for (const auto& set : {&positives, &negatives}) {
    for (const auto& [c, t] : *set) {
      if (!is_capec_id(c) || !is_technique_id(t)) {
        fail(ErrorKind::kIntegrity, "ground-truth pair (" + c + ", " + t +
                                        ") is not a (CAPEC id, technique id) pair");
      }
    }
  }
  for (const auto& p : positives) {
    if (negatives.contains(p)) {
      fail(ErrorKind::kIntegrity,
           "pair (" + p.first + ", " + p.second + ") is labeled both positive and negative");
    }
  }
}

void GroundTruth::validate_against(const Catalog& catalog) const {
  validate();
  for (const auto& set : {&positives, &negatives}) {
    for (const auto& [c, t] : *set) {
      if (catalog.find(c) == nullptr) fail(ErrorKind::kIntegrity, "ground truth names unknown " + c);
      if (catalog.find(t) == nullptr) fail(ErrorKind::kIntegrity, "ground truth names unknown " + t);
    }
  }
}

std::string GroundTruth::digest() const {
  std::string canonical;
  for (const auto& [c, t] : positives) canonical += "+ " + c + " " + t + "\n";
  for (const auto& [c, t] : negatives) canonical += "- " + c + " " + t + "\n";
  return hex64(fnv1a64(canonical));
}

GroundTruth load_ground_truth(std::string_view json_text) {
  GroundTruth gt;
  try {
    auto j = nlohmann::json::parse(json_text);
    for (const auto& [key, value] : j.items()) {
      if (key != "positives" && key != "negatives") {
        fail(ErrorKind::kParse, "unknown key '" + key + "' in ground truth");
      }
    }
    auto read = [&](const char* key, std::set<IdPair>& into) {
      if (!j.contains(key)) return;
      for (const auto& item : j[key]) {
        IdPair p{item.at("capec").get<std::string>(), item.at("technique").get<std::string>()};
        if (item.contains("note")) gt.notes[p] = item["note"].get<std::string>();
        into.insert(std::move(p));
      }
    };
    read("positives", gt.positives);
    read("negatives", gt.negatives);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, std::string("bad ground truth JSON: ") + e.what());
  }
  gt.validate();
  return gt;
}

std::string save_ground_truth(const GroundTruth& gt) {
  nlohmann::ordered_json j;
  auto write = [&](const char* key, const std::set<IdPair>& pairs) {
    auto& arr = j[key] = nlohmann::ordered_json::array();
    for (const auto& p : pairs) {
      nlohmann::ordered_json item{{"capec", p.first}, {"technique", p.second}};
      if (auto it = gt.notes.find(p); it != gt.notes.end()) item["note"] = it->second;
      arr.push_back(std::move(item));
    }
  };
  write("positives", gt.positives);
  write("negatives", gt.negatives);
  return j.dump(2) + "\n";
}

}  // namespace attackmap
