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

#include "attackmap/sweep.hpp"

#include <algorithm>
#include <optional>

#include "attackmap/error.hpp"

namespace attackmap {

void SweepAxes::validate() const {
  if (models.empty()) fail(ErrorKind::kConfig, "sweep needs at least one model");
  if (ks.empty()) fail(ErrorKind::kConfig, "sweep needs at least one k");
  if (methods.empty()) fail(ErrorKind::kConfig, "sweep needs at least one method");
  if (directions.empty()) fail(ErrorKind::kConfig, "sweep needs at least one direction");
  for (std::size_t k : ks) {
    if (k < 1) fail(ErrorKind::kConfig, "k must be >= 1");
  }
}

namespace {

struct ModelVectors {
  std::vector<EmbeddingRecord> patterns;
  std::vector<EmbeddingRecord> techniques;
  std::string missing;  // non-empty when the model cannot be evaluated
};

ModelVectors split_records(const Catalog& catalog, const std::vector<EmbeddingRecord>* records,
                           const std::string& model) {
  ModelVectors mv;
  if (records == nullptr || records->empty()) {
    mv.missing = "no embeddings for model " + model;
    return mv;
  }
  std::map<std::string, const EmbeddingRecord*> by_id;
  for (const auto& r : *records) by_id[r.entry_id] = &r;
  std::size_t absent = 0;
  std::string first_absent;
  auto collect = [&](const std::vector<CatalogEntry>& entries, std::vector<EmbeddingRecord>& out) {
    for (const auto& e : entries) {
      auto it = by_id.find(e.id);
      if (it == by_id.end()) {
        if (absent++ == 0) first_absent = e.id;
        continue;
      }
      out.push_back(*it->second);
    }
  };
  collect(catalog.patterns, mv.patterns);
  collect(catalog.techniques, mv.techniques);
  if (absent > 0) {
    mv.missing = "embeddings for model " + model + " miss " + std::to_string(absent) +
                 " catalog entries (first: " + first_absent + ")";
  }
  return mv;
}

}  // namespace

SweepResult sweep(const SweepInputs& in) {
  if (in.catalog == nullptr || in.embeddings == nullptr || in.ground_truth == nullptr) {
    fail(ErrorKind::kInvalidArgument, "sweep inputs incomplete");
  }
  in.axes.validate();
  const std::size_t k_max = *std::max_element(in.axes.ks.begin(), in.axes.ks.end());

  SweepResult result;
  result.report.ground_truth_digest = in.ground_truth->digest();
  result.report.generated_at = in.generated_at;

  for (const auto& model : in.axes.models) {
    auto it = in.embeddings->find(model);
    ModelVectors mv =
        split_records(*in.catalog, it == in.embeddings->end() ? nullptr : &it->second, model);

    std::map<Direction, NeighborTable> tables;
    std::map<Direction, std::string> table_errors;
    if (mv.missing.empty()) {
      for (Direction d : in.axes.directions) {
        const auto& sources = d == Direction::kCapecToAttack ? mv.patterns : mv.techniques;
        const auto& targets = d == Direction::kCapecToAttack ? mv.techniques : mv.patterns;
        try {
          tables.emplace(d, nearest_neighbors(sources, targets, k_max));
        } catch (const Error& e) {
          table_errors[d] = e.what();
        }
      }
    }

    for (std::size_t k : in.axes.ks) {
      for (Method method : in.axes.methods) {
        for (Direction d : in.axes.directions) {
          auto skip = [&](std::string reason) {
            result.report.skipped.push_back({model, k, method, d, std::move(reason)});
          };
          if (!mv.missing.empty()) {
            skip(mv.missing);
            continue;
          }
          if (auto te = table_errors.find(d); te != table_errors.end()) {
            skip(te->second);
            continue;
          }
          const NeighborTable& table = tables.at(d);
          std::optional<MappingSet> mapping;
          if (method == Method::kNearestNeighbor) {
            mapping = mapping_from_table(table, k, d);
          } else {
            if (in.backend == nullptr) {
              skip("no LLM backend configured");
              continue;
            }
            RagConfig cfg = in.rag;
            cfg.k = k;
            try {
              auto rag = rag_mapping(table, *in.catalog, d, cfg, *in.backend);
              for (const auto& f : rag.failures) {
                result.report.source_failures.push_back({model, k, d, f.source_id, f.reason});
              }
              mapping = std::move(rag.mapping);
            } catch (const Error& e) {
              skip(e.what());
              continue;
            }
          }
          result.report.rows.push_back(evaluate(*mapping, *in.ground_truth));
          result.mappings.push_back(std::move(*mapping));
        }
      }
    }
  }
  result.report.validate();
  return result;
}

}  // namespace attackmap
