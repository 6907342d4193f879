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

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "attackmap/ground_truth.hpp"
#include "attackmap/knn.hpp"

namespace attackmap {

// Non-negative fraction kept exact until display. Equality is by value.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Ratio& o) const { return num * o.den == o.num * den; }
};

// Edges of `m` as (capec_id, technique_id) pairs, whatever the direction.
std::set<IdPair> oriented_pairs(const MappingSet& m);

// The metric functions throw Error(kUndefinedMetric) when their denominator
// is empty. Sources and targets follow m.direction: for ATT&CK -> CAPEC
// mappings the techniques play the source role.
Ratio recall(const MappingSet& m, const GroundTruth& gt);
Ratio precision(const MappingSet& m, const GroundTruth& gt);
Ratio coverage(const MappingSet& m, const GroundTruth& gt);
Ratio fmr(const MappingSet& m, const GroundTruth& gt);

// Harmonic mean; 0 when p + r = 0.
double f_score(double p, double r);

struct MetricsRow {
  std::string model_id;
  Method method = Method::kNearestNeighbor;
  Direction direction = Direction::kCapecToAttack;
  std::size_t k = 1;
  std::optional<Ratio> recall;
  std::optional<Ratio> precision;
  std::optional<Ratio> f_score;
  std::optional<Ratio> coverage;
  std::optional<Ratio> fmr;
};

// All five metrics; an undefined metric stays nullopt rather than 0. The
// F-score is kept exact as 2|M∩G| / (|G| + |precision denominator|), which
// equals the harmonic mean whenever both inputs are defined and is 0 when
// nothing was retrieved; it is undefined only when recall is.
MetricsRow evaluate(const MappingSet& m, const GroundTruth& gt);

}  // namespace attackmap
