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

#include "attackmap/embedding_provider.hpp"

#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "attackmap/error.hpp"
#include "attackmap/http_client.hpp"
#include "attackmap/text.hpp"

namespace attackmap {

HashTestProvider::HashTestProvider(ProviderConfig config) : config_(std::move(config)) {
  validate_provider_config(config_);
}

std::vector<std::vector<float>> HashTestProvider::embed_batch(std::span<const std::string> inputs) {
  std::vector<std::vector<float>> out;
  out.reserve(inputs.size());
  for (const auto& text : inputs) {
    EmbeddingVector v = hash_embed_text(config_.seed, config_.dimensionality, text);
    out.emplace_back(v.values().begin(), v.values().end());
  }
  return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(ProviderConfig config) : config_(std::move(config)) {
  validate_provider_config(config_);
}

std::vector<std::vector<float>> HttpEmbeddingProvider::embed_batch(
    std::span<const std::string> inputs) {
  nlohmann::ordered_json req;
  req["model"] = config_.model_id;
  req[config_.api_shape == ApiShape::kOpenAI ? "input" : "inputs"] = inputs;
  auto headers = http::auth_headers(config_.auth_env, ErrorKind::kProvider);
  auto res = http::post_json_with_retry(*config_.endpoint, req.dump(), headers, config_.timeout,
                                        config_.retry, ErrorKind::kProvider,
                                        "embedding request to " + *config_.endpoint);
  std::vector<std::vector<float>> out;
  try {
    auto j = nlohmann::json::parse(res.body);
    if (config_.api_shape == ApiShape::kOpenAI) {
      const auto& data = j.at("data");
      out.resize(data.size());
      for (const auto& item : data) {
        auto idx = item.value("index", std::size_t{0});
        if (idx >= out.size()) fail(ErrorKind::kIntegrity, "embedding response index out of range");
        out[idx] = item.at("embedding").get<std::vector<float>>();
      }
    } else {
      out = j.at("vectors").get<std::vector<std::vector<float>>>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kProvider, std::string("unreadable embedding response: ") + e.what());
  }
  return out;
}

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config, bool offline) {
  if (config.kind == ProviderKind::kHashTest) return std::make_unique<HashTestProvider>(config);
  if (offline) {
    fail(ErrorKind::kConfig,
         "provider " + config.model_id + " needs the network; offline mode allows only hash-test");
  }
  return std::make_unique<HttpEmbeddingProvider>(config);
}

Embedder::Embedder(std::shared_ptr<EmbeddingProvider> provider,
                   std::shared_ptr<EmbeddingCache> cache)
    : provider_(std::move(provider)),
      cache_(cache ? std::move(cache) : std::make_shared<EmbeddingCache>()) {}

std::vector<EmbeddingRecord> Embedder::embed_documents(std::span<const DescriptionString> docs) {
  const ProviderConfig& cfg = provider_->config();
  std::vector<EmbeddingRecord> records(docs.size());
  std::vector<std::string> pending_inputs;
  std::vector<std::size_t> pending_index;

  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& doc = docs[i];
    auto& rec = records[i];
    rec.entry_id = doc.entry_id;
    rec.model_id = cfg.model_id;
    rec.content_hash = content_hash(doc.text);
    std::string_view input = utf8_prefix(doc.text, cfg.max_input_chars);
    rec.truncated = input.size() < doc.text.size();
    if (auto hit = cache_->lookup(cfg.model_id, rec.content_hash, cfg.max_input_chars)) {
      rec.vector = hit->vector;
      continue;
    }
    pending_inputs.emplace_back(input);
    pending_index.push_back(i);
  }

  const std::size_t n_batches = (pending_inputs.size() + cfg.batch_size - 1) / cfg.batch_size;
  std::vector<std::vector<std::vector<float>>> results(n_batches);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= n_batches) return;
      {
        std::lock_guard lock(error_mutex);
        if (error) return;
      }
      std::size_t begin = b * cfg.batch_size;
      std::size_t end = std::min(begin + cfg.batch_size, pending_inputs.size());
      try {
        batches_sent_.fetch_add(1);
        results[b] = provider_->embed_batch(
            std::span<const std::string>(pending_inputs).subspan(begin, end - begin));
        if (results[b].size() != end - begin) {
          fail(ErrorKind::kIntegrity, "provider returned " + std::to_string(results[b].size()) +
                                          " vectors for " + std::to_string(end - begin) + " inputs");
        }
      } catch (const Error& e) {
        std::lock_guard lock(error_mutex);
        if (!error) {
          error = std::make_exception_ptr(
              Error(e.kind(), "batch " + std::to_string(b) + " (documents " +
                                  std::to_string(begin) + ".." + std::to_string(end - 1) +
                                  "): " + e.what()));
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };

  const std::size_t n_threads = std::min(cfg.max_in_flight, n_batches);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  for (std::size_t b = 0; b < n_batches; ++b) {
    for (std::size_t j = 0; j < results[b].size(); ++j) {
      std::size_t idx = pending_index[b * cfg.batch_size + j];
      auto& raw = results[b][j];
      if (raw.size() != cfg.dimensionality) {
        fail(ErrorKind::kIntegrity, "model " + cfg.model_id + " returned a vector of length " +
                                        std::to_string(raw.size()) + ", expected " +
                                        std::to_string(cfg.dimensionality));
      }
      auto& rec = records[idx];
      rec.vector = normalize(std::span<const float>(raw));
      cache_->insert(cfg.model_id, rec.content_hash, cfg.max_input_chars,
                     {rec.vector, rec.truncated});
    }
  }
  cache_->flush();
  return records;
}

}  // namespace attackmap
