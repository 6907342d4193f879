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

#include "attackmap/metrics.hpp"

#include <algorithm>

#include "attackmap/error.hpp"

namespace attackmap {

namespace {

struct Counts {
  std::int64_t hits = 0;             // |M ∩ G|
  std::int64_t positives = 0;        // |G|
  std::int64_t considered = 0;       // retrieved pairs whose source appears in G
  std::int64_t covered = 0;          // ground-truth sources with a true positive
  std::int64_t gt_sources = 0;       // |C_G|
  std::int64_t false_hits = 0;       // |M ∩ negatives|
  std::int64_t negatives = 0;
};

const std::string& source_of(const IdPair& p, Direction d) {
  return d == Direction::kCapecToAttack ? p.first : p.second;
}

Counts count(const MappingSet& m, const GroundTruth& gt) {
  Counts c;
  const auto pairs = oriented_pairs(m);
  std::set<std::string> gt_sources;
  for (const auto& p : gt.positives) gt_sources.insert(source_of(p, m.direction));
  std::set<std::string> covered;
  for (const auto& p : pairs) {
    const bool hit = gt.positives.contains(p);
    if (hit) {
      ++c.hits;
      covered.insert(source_of(p, m.direction));
    }
    if (gt_sources.contains(source_of(p, m.direction))) ++c.considered;
    if (gt.negatives.contains(p)) ++c.false_hits;
  }
  c.positives = static_cast<std::int64_t>(gt.positives.size());
  c.gt_sources = static_cast<std::int64_t>(gt_sources.size());
  c.covered = static_cast<std::int64_t>(covered.size());
  c.negatives = static_cast<std::int64_t>(gt.negatives.size());
  return c;
}

Ratio ratio_or_throw(std::int64_t num, std::int64_t den, const char* metric) {
  if (den == 0) {
    fail(ErrorKind::kUndefinedMetric, std::string(metric) + " is undefined (empty denominator)");
  }
  return {num, den};
}

std::optional<Ratio> ratio_or_none(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return Ratio{num, den};
}

}  // namespace

std::set<IdPair> oriented_pairs(const MappingSet& m) {
  std::set<IdPair> out;
  for (const auto& e : m.edges) {
    if (m.direction == Direction::kCapecToAttack) out.emplace(e.source_id, e.target_id);
    else out.emplace(e.target_id, e.source_id);
  }
  return out;
}

Ratio recall(const MappingSet& m, const GroundTruth& gt) {
  auto c = count(m, gt);
  return ratio_or_throw(c.hits, c.positives, "recall");
}

Ratio precision(const MappingSet& m, const GroundTruth& gt) {
  auto c = count(m, gt);
  return ratio_or_throw(c.hits, c.considered, "precision");
}

Ratio coverage(const MappingSet& m, const GroundTruth& gt) {
  auto c = count(m, gt);
  return ratio_or_throw(c.covered, c.gt_sources, "coverage");
}

Ratio fmr(const MappingSet& m, const GroundTruth& gt) {
  auto c = count(m, gt);
  return ratio_or_throw(c.false_hits, c.negatives, "false mapping ratio");
}

double f_score(double p, double r) {
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

MetricsRow evaluate(const MappingSet& m, const GroundTruth& gt) {
  auto c = count(m, gt);
  MetricsRow row;
  row.model_id = m.model_id;
  row.method = m.method;
  row.direction = m.direction;
  row.k = m.k;
  row.recall = ratio_or_none(c.hits, c.positives);
  row.precision = ratio_or_none(c.hits, c.considered);
  row.coverage = ratio_or_none(c.covered, c.gt_sources);
  row.fmr = ratio_or_none(c.false_hits, c.negatives);
  if (row.recall) row.f_score = Ratio{2 * c.hits, c.positives + c.considered};
  return row;
}

}  // namespace attackmap
