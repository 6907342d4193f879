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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attackmap/embedding.hpp"
#include "attackmap/knn_kernels.hpp"

namespace attackmap {

enum class Direction { kCapecToAttack, kAttackToCapec };
enum class Method { kNearestNeighbor, kRag };

std::string_view direction_name(Direction d);  // "capec-to-attack" | "attack-to-capec"
std::string_view method_name(Method m);        // "nn" | "rag"
Direction parse_direction(std::string_view text);
Method parse_method(std::string_view text);

// Inner product of two equal-length vectors (64-bit accumulation). Throws
// Error(kInvalidArgument) on a dimension mismatch.
double similarity(const EmbeddingVector& a, const EmbeddingVector& b);

struct ScoredId {
  std::string entry_id;
  double score = 0.0;

  bool operator==(const ScoredId&) const = default;
};

// The min(k, |corpus|) most similar corpus entries, by score descending then
// id ascending.
std::vector<ScoredId> top_k(const EmbeddingRecord& query, std::span<const EmbeddingRecord> corpus,
                            std::size_t k);

struct MappingEdge {
  std::string source_id;
  std::string target_id;
  int rank = 1;
  double score = 0.0;
  Method method = Method::kNearestNeighbor;
  std::optional<std::string> rationale;

  bool operator==(const MappingEdge&) const = default;
};

struct MappingSet {
  Direction direction = Direction::kCapecToAttack;
  std::string model_id;
  std::size_t k = 1;
  Method method = Method::kNearestNeighbor;
  std::vector<MappingEdge> edges;  // grouped by source in canonical order, then rank

  bool operator==(const MappingSet&) const = default;

  // Throws Error(kIntegrity) when ranks, scores or cardinalities are off.
  void validate() const;
};

enum class Execution { kSerial, kParallel };

// Ranked candidates for every source, computed once for the largest k so
// smaller k are prefixes. Sources appear in canonical id order.
struct NeighborTable {
  std::string model_id;
  std::vector<std::string> source_ids;
  std::vector<std::vector<ScoredId>> neighbors;
  std::size_t target_count = 0;
};

NeighborTable nearest_neighbors(std::span<const EmbeddingRecord> sources,
                                std::span<const EmbeddingRecord> targets, std::size_t k,
                                Execution execution = Execution::kParallel);

// NN mapping over the first k neighbours of every source in `table`.
MappingSet mapping_from_table(const NeighborTable& table, std::size_t k, Direction direction);

MappingSet nn_mapping(std::span<const EmbeddingRecord> sources,
                      std::span<const EmbeddingRecord> targets, std::size_t k, Direction direction,
                      Execution execution = Execution::kParallel);

// {"direction","model_id","k","method","edges":[{"source","target","rank","score","rationale"?}]}
std::string mapping_to_json(const MappingSet& mapping);
MappingSet mapping_from_json(std::string_view text);
// source,target,rank,score,method,rationale
std::string mapping_to_csv(const MappingSet& mapping);

}  // namespace attackmap
