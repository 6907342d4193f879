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

#include <string>
#include <vector>

#include "attackmap/embedding.hpp"

namespace attackmap {

// On-disk store: `<dir>/<model_id>.manifest.json` lists model, dimension,
// count, and per-record id / content hash / truncation flag; `<model_id>.f32`
// holds the vectors as little-endian 32-bit floats in manifest order.
class VectorStore {
 public:
  explicit VectorStore(std::string dir);

  // All records must carry `model_id` and have length `dim`.
  void store(const std::string& model_id, std::size_t dim,
             const std::vector<EmbeddingRecord>& records) const;

  // Throws Error(kNotFound) when the model was never stored and
  // Error(kIntegrity) when manifest and binary disagree.
  std::vector<EmbeddingRecord> load(const std::string& model_id) const;

  bool contains(const std::string& model_id) const;

  std::string manifest_path(const std::string& model_id) const;
  std::string vectors_path(const std::string& model_id) const;

 private:
  std::string dir_;
};

}  // namespace attackmap
