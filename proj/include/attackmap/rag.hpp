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

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "attackmap/catalog.hpp"
#include "attackmap/knn.hpp"
#include "attackmap/llm_backend.hpp"

namespace attackmap {

inline constexpr std::string_view kDefaultPromptTemplate = "select-v1";
inline constexpr std::size_t kMaxRationaleChars = 500;

struct RagConfig {
  std::size_t k = 5;
  LlmBackendConfig backend;
  int max_retries = 2;
  double temperature = 0.0;
  bool deterministic = true;  // requires temperature == 0
  std::string prompt_template_id{kDefaultPromptTemplate};
  std::size_t max_in_flight = 2;

  void validate() const;
};

struct RagCandidate {
  const CatalogEntry* entry = nullptr;
  double score = 0.0;
  int rank = 1;
};

struct Selection {
  std::string target_id;
  std::string confidence;  // high | medium | low
  std::string rationale;

  bool operator==(const Selection&) const = default;
};

struct RagDecision {
  std::string source_id;
  std::vector<Selection> selections;
  std::string raw_response;  // last response received
  int attempts = 0;
  bool failed = false;  // every attempt failed validation
  std::string failure_reason;
};

// "technique_id" when mapping CAPEC -> ATT&CK, "capec_id" the other way.
std::string_view selection_id_key(Direction direction);

// {"mappings":[{<id_key>: enum(candidates), "confidence": enum, "rationale": string<=500}]}
// with at most k items.
nlohmann::ordered_json selection_schema(std::span<const std::string> candidate_ids, std::size_t k,
                                        Direction direction);

std::string_view system_prompt(std::string_view template_id);

// Deterministic user prompt: task, source description string, ranked
// candidate blocks, selection instructions and the output schema. Throws
// Error(kInvalidArgument) for an empty candidate list or unknown template.
std::string build_prompt(const CatalogEntry& source, std::span<const RagCandidate> candidates,
                         Direction direction, std::size_t k,
                         std::string_view template_id = kDefaultPromptTemplate);

// Checks untrusted model output. Throws Error(kMalformedOutput) for JSON or
// schema violations, Error(kHallucination) for ids outside `candidates` and
// Error(kDuplication) for repeated ids.
std::vector<Selection> validate_output(std::string_view text, const std::set<std::string>& candidates,
                                       std::size_t k, Direction direction);

// Prompts the backend until validate_output accepts, at most 1 + max_retries
// times. Exhaustion yields an empty, failed decision. Backend transport
// errors propagate as Error(kBackend).
RagDecision rag_refine(const CatalogEntry& source, std::span<const RagCandidate> candidates,
                       Direction direction, const RagConfig& config, LlmBackend& backend);

struct RagSourceFailure {
  std::string source_id;
  std::string reason;
};

struct RagMappingResult {
  MappingSet mapping;
  std::vector<RagDecision> decisions;      // canonical source order
  std::vector<RagSourceFailure> failures;  // sources skipped on backend errors
};

// Refines the first config.k neighbours of every source in `table`. Sources
// with an empty selection contribute no edges; RAG edges keep their NN score
// and are re-ranked 1..n in NN order.
RagMappingResult rag_mapping(const NeighborTable& table, const Catalog& catalog,
                             Direction direction, const RagConfig& config, LlmBackend& backend);

RagMappingResult rag_mapping(std::span<const EmbeddingRecord> sources,
                             std::span<const EmbeddingRecord> targets, const Catalog& catalog,
                             Direction direction, const RagConfig& config, LlmBackend& backend);

}  // namespace attackmap
