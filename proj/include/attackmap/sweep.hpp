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
#include <string>
#include <vector>

#include "attackmap/catalog.hpp"
#include "attackmap/ground_truth.hpp"
#include "attackmap/rag.hpp"
#include "attackmap/report.hpp"

namespace attackmap {

struct SweepAxes {
  std::vector<std::string> models;
  std::vector<std::size_t> ks;
  std::vector<Method> methods;
  std::vector<Direction> directions;

  // Throws Error(kConfig) for empty axes or k < 1.
  void validate() const;
};

struct SweepInputs {
  const Catalog* catalog = nullptr;
  // Records for patterns and techniques together, keyed by model id.
  const std::map<std::string, std::vector<EmbeddingRecord>>* embeddings = nullptr;
  const GroundTruth* ground_truth = nullptr;
  SweepAxes axes;
  RagConfig rag;                   // rag.k is overridden per cell
  LlmBackend* backend = nullptr;   // RAG cells are skipped without one
  std::string generated_at;
};

struct SweepResult {
  EvaluationReport report;
  std::vector<MappingSet> mappings;  // one per computed cell, grid order
};

// Evaluates every (model, k, method, direction) cell in that nesting order.
// Neighbour tables are computed once per (model, direction) at the largest
// k. A model without complete embeddings has its cells skipped with a reason.
SweepResult sweep(const SweepInputs& inputs);

}  // namespace attackmap
