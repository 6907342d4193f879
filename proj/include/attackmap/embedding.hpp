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

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attackmap/catalog.hpp"

namespace attackmap {

// Unit-norm vector of 32-bit floats. Only constructible through normalize()
// or from_unit(), so every instance satisfies the norm invariant.
class EmbeddingVector {
 public:
  static constexpr double kNormTolerance = 1e-4;

  EmbeddingVector() = default;

  // Adopts values that are already unit-norm (within kNormTolerance) and
  // finite; throws Error(kIntegrity) otherwise.
  static EmbeddingVector from_unit(std::vector<float> values);

  std::span<const float> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  bool operator==(const EmbeddingVector&) const = default;

 private:
  explicit EmbeddingVector(std::vector<float> values) : values_(std::move(values)) {}
  friend EmbeddingVector normalize(std::span<const double> raw);
  std::vector<float> values_;
};

// v / ||v||. Inputs already unit-norm to float precision are returned
// unchanged, so normalize is idempotent bit-for-bit.
EmbeddingVector normalize(std::span<const double> raw);
EmbeddingVector normalize(std::span<const float> raw);

std::uint64_t content_hash(std::string_view text);

// Deterministic offline embedder: a unit vector derived from a counter-based
// generator keyed by (seed, content_hash(text)). Platform independent.
EmbeddingVector hash_embed(std::uint64_t seed, std::size_t dim, const DescriptionString& doc);
EmbeddingVector hash_embed_text(std::uint64_t seed, std::size_t dim, std::string_view text);

struct EmbeddingRecord {
  std::string entry_id;
  std::string model_id;
  std::uint64_t content_hash = 0;  // hash of the full description string
  EmbeddingVector vector;
  bool truncated = false;

  bool operator==(const EmbeddingRecord&) const = default;
};

enum class ProviderKind { kHashTest, kRemote };
enum class ApiShape { kNeutral, kOpenAI };

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{1000};  // doubles after each failure
};

struct ProviderConfig {
  std::string model_id;
  std::size_t dimensionality = 0;
  std::optional<std::string> endpoint;
  std::size_t max_input_chars = 0;
  std::size_t batch_size = 16;
  std::string auth_env;  // name of the env var holding the credential
  ProviderKind kind = ProviderKind::kRemote;
  ApiShape api_shape = ApiShape::kNeutral;
  std::uint64_t seed = 0;  // hash-test only
  std::size_t max_in_flight = 4;
  RetryPolicy retry;
  std::chrono::seconds timeout{60};
};

// Dimensionality of the registered models; nullopt for unknown ids and for
// "hash-test", whose dimensionality is configurable.
std::optional<std::size_t> registered_dimensionality(std::string_view model_id);

// Registered defaults: dimensionality, and a character budget of 3.5 chars
// per token of the model's input limit.
ProviderConfig default_provider_config(std::string_view model_id);

// Throws Error(kConfig) on violated invariants.
void validate_provider_config(const ProviderConfig& config);

}  // namespace attackmap
