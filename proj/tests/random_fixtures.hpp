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

// Seeded random instances shared by the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "attackmap/embedding.hpp"
#include "attackmap/ground_truth.hpp"
#include "attackmap/knn.hpp"

namespace fixtures {

struct KnnInstance {
  std::vector<attackmap::EmbeddingRecord> sources;  // CAPEC-like ids
  std::vector<attackmap::EmbeddingRecord> targets;  // technique-like ids
};

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g;
  std::vector<double> v(dim);
  for (auto& x : v) x = g(rng);
  return v;
}

// Distinct ids with scattered numbers, shuffled, so canonical order differs
// from both insertion and byte order. Some targets share a vector to force
// exact score ties.
inline KnnInstance random_knn_instance(std::mt19937_64& rng, std::size_t max_sources,
                                       std::size_t max_targets, std::size_t max_dim) {
  std::size_t ns = 1 + rng() % max_sources;
  std::size_t nt = 1 + rng() % max_targets;
  std::size_t dim = 2 + rng() % (max_dim - 1);
  auto ids = [&](const std::string& prefix, std::size_t n) {
    std::set<std::size_t> nums;
    while (nums.size() < n) nums.insert(rng() % (n * 20 + 10));
    std::vector<std::string> out;
    for (auto x : nums) out.push_back(prefix + std::to_string(x));
    std::shuffle(out.begin(), out.end(), rng);
    return out;
  };
  KnnInstance inst;
  for (const auto& id : ids("CAPEC-", ns)) {
    auto v = random_vector(rng, dim);
    inst.sources.push_back({id, "rand", 0, attackmap::normalize(std::span<const double>(v)), false});
  }
  std::vector<attackmap::EmbeddingVector> pool;
  for (const auto& id : ids("T", nt)) {
    attackmap::EmbeddingVector v;
    if (!pool.empty() && rng() % 4 == 0) {
      v = pool[rng() % pool.size()];
    } else {
      auto raw = random_vector(rng, dim);
      v = attackmap::normalize(std::span<const double>(raw));
    }
    pool.push_back(v);
    inst.targets.push_back({id, "rand", 0, v, false});
  }
  return inst;
}

// Synthetic labeled universe for metric tests.
struct MetricInstance {
  std::vector<std::string> capecs;
  std::vector<std::string> techniques;
  attackmap::GroundTruth gt;
  attackmap::MappingSet mapping;
  std::set<std::pair<std::string, std::string>> pairs;  // (capec, technique)
};

inline MetricInstance random_metric_instance(std::mt19937_64& rng, std::size_t n_capec,
                                             std::size_t n_tech, attackmap::Direction direction) {
  MetricInstance inst;
  for (std::size_t i = 0; i < n_capec; ++i) inst.capecs.push_back("CAPEC-" + std::to_string(i + 1));
  for (std::size_t i = 0; i < n_tech; ++i) inst.techniques.push_back("T" + std::to_string(800 + i));
  std::uniform_real_distribution<double> u(0, 1);
  const double p_pos = u(rng) * 0.3;
  const double p_neg = u(rng) * 0.4;
  const double p_map = u(rng) * 0.5;
  for (const auto& c : inst.capecs) {
    for (const auto& t : inst.techniques) {
      double r = u(rng);
      if (r < p_pos) inst.gt.positives.insert({c, t});
      else if (r < p_pos + p_neg) inst.gt.negatives.insert({c, t});
    }
  }
  inst.mapping.direction = direction;
  inst.mapping.model_id = "rand";
  inst.mapping.method = attackmap::Method::kNearestNeighbor;
  const bool fwd = direction == attackmap::Direction::kCapecToAttack;
  const auto& sources = fwd ? inst.capecs : inst.techniques;
  const auto& targets = fwd ? inst.techniques : inst.capecs;
  std::size_t max_rank = 0;
  for (const auto& s : sources) {
    int rank = 0;
    for (const auto& t : targets) {
      if (u(rng) >= p_map) continue;
      inst.mapping.edges.push_back({s, t, ++rank, 1.0 - 0.01 * rank, attackmap::Method::kNearestNeighbor, {}});
      inst.pairs.insert(fwd ? std::make_pair(s, t) : std::make_pair(t, s));
    }
    max_rank = std::max<std::size_t>(max_rank, rank);
  }
  inst.mapping.k = std::max<std::size_t>(1, max_rank);
  return inst;
}

}  // namespace fixtures
