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

#include <atomic>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "attackmap/catalog.hpp"
#include "attackmap/embedding.hpp"
#include "attackmap/embedding_cache.hpp"

namespace attackmap {

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual const ProviderConfig& config() const = 0;

  // Raw vectors for one batch, in input order. Implementations must be safe
  // to call from several threads at once.
  virtual std::vector<std::vector<float>> embed_batch(std::span<const std::string> inputs) = 0;
};

class HashTestProvider final : public EmbeddingProvider {
 public:
  explicit HashTestProvider(ProviderConfig config);
  const ProviderConfig& config() const override { return config_; }
  std::vector<std::vector<float>> embed_batch(std::span<const std::string> inputs) override;

 private:
  ProviderConfig config_;
};

// JSON-over-HTTP provider.
//   kNeutral: POST {"model", "inputs": [..]} -> {"vectors": [[..], ..]}
//   kOpenAI:  POST {"model", "input": [..]}  -> {"data": [{"index", "embedding"}]}
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(ProviderConfig config);
  const ProviderConfig& config() const override { return config_; }
  std::vector<std::vector<float>> embed_batch(std::span<const std::string> inputs) override;

 private:
  ProviderConfig config_;
};

// Offline mode permits only the hash-test provider.
std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config, bool offline);

// Turns description strings into unit-norm records, consulting the cache by
// (model_id, content_hash) before any provider call. Missing vectors are
// requested in batches of config().batch_size with at most max_in_flight
// batches outstanding; output order always matches input order.
class Embedder {
 public:
  Embedder(std::shared_ptr<EmbeddingProvider> provider, std::shared_ptr<EmbeddingCache> cache);

  std::vector<EmbeddingRecord> embed_documents(std::span<const DescriptionString> docs);

  // Number of embed_batch calls issued so far.
  std::size_t batches_sent() const { return batches_sent_.load(); }

 private:
  std::shared_ptr<EmbeddingProvider> provider_;
  std::shared_ptr<EmbeddingCache> cache_;
  std::atomic<std::size_t> batches_sent_{0};
};

}  // namespace attackmap
