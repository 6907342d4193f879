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
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>

#include "attackmap/embedding.hpp"

namespace attackmap {

// Content-addressed embedding cache keyed by (model_id, content_hash). A hit
// also requires the same input budget, since that decides the text that was
// actually embedded. Persisted as `<dir>/<model_id>.cache.json` with float
// bit patterns in hex so reloads are bit-exact. An empty `dir` keeps the cache
// in memory only. Thread-safe.
class EmbeddingCache {
 public:
  struct Entry {
    EmbeddingVector vector;
    bool truncated = false;
  };

  explicit EmbeddingCache(std::string dir = {});

  std::optional<Entry> lookup(const std::string& model_id, std::uint64_t hash,
                              std::size_t max_input_chars);
  void insert(const std::string& model_id, std::uint64_t hash, std::size_t max_input_chars,
              Entry entry);

  // Writes every model touched since the last flush (write-temp-then-rename).
  void flush();

  std::size_t size(const std::string& model_id);

 private:
  using Key = std::tuple<std::uint64_t, std::size_t>;
  struct ModelCache {
    std::map<Key, Entry> entries;
    bool dirty = false;
  };
  ModelCache& model(const std::string& model_id);  // caller holds mutex_

  std::string dir_;
  std::mutex mutex_;
  std::map<std::string, ModelCache> models_;
};

}  // namespace attackmap
