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

#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "attackmap/catalog.hpp"

namespace attackmap {

// (capec_id, technique_id), independent of mapping direction.
using IdPair = std::pair<std::string, std::string>;

struct GroundTruth {
  std::set<IdPair> positives;  // G
  std::set<IdPair> negatives;  // explicitly non-corresponding pairs
  std::map<IdPair, std::string> notes;

  // G and the negatives are disjoint and every pair is (CAPEC id, technique id).
  void validate() const;
  // Additionally requires every id to exist in `catalog`.
  void validate_against(const Catalog& catalog) const;
  // Hex digest over the canonical pair listing; notes excluded.
  std::string digest() const;
};

// {"positives":[{"capec":"CAPEC-125","technique":"T0814","note":"..."}],"negatives":[...]}
GroundTruth load_ground_truth(std::string_view json_text);
std::string save_ground_truth(const GroundTruth& gt);

}  // namespace attackmap
