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

#include "attackmap/embedding.hpp"

#include <cmath>

#include "attackmap/error.hpp"
#include "attackmap/text.hpp"

namespace attackmap {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct ModelInfo {
  std::string_view id;
  std::size_t dim;
  std::size_t token_limit;
};

constexpr ModelInfo kModels[] = {
    {"ada-002", 1536, 8191},
    {"e5", 1024, 512},
    {"instructor", 768, 512},
    {"sent-transf", 384, 256},
};

std::size_t chars_for_tokens(std::size_t tokens) { return tokens * 7 / 2; }

}  // namespace

EmbeddingVector EmbeddingVector::from_unit(std::vector<float> values) {
  double sum = 0.0;
  for (float v : values) {
    if (!std::isfinite(v)) fail(ErrorKind::kIntegrity, "embedding contains a non-finite value");
    sum += static_cast<double>(v) * v;
  }
  if (values.empty() || std::abs(std::sqrt(sum) - 1.0) > kNormTolerance) {
    fail(ErrorKind::kIntegrity, "embedding is not unit-norm (norm " +
                                    std::to_string(std::sqrt(sum)) + ")");
  }
  return EmbeddingVector(std::move(values));
}

EmbeddingVector normalize(std::span<const double> raw) {
  double sum = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v)) fail(ErrorKind::kInvalidArgument, "cannot normalize a non-finite vector");
    sum += v * v;
  }
  if (sum == 0.0) fail(ErrorKind::kInvalidArgument, "cannot normalize a zero vector");
  double norm = std::sqrt(sum);
  std::vector<float> out(raw.size());
  if (std::abs(norm - 1.0) <= 1e-6) {
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = static_cast<float>(raw[i]);
  } else {
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = static_cast<float>(raw[i] / norm);
  }
  return EmbeddingVector(std::move(out));
}

EmbeddingVector normalize(std::span<const float> raw) {
  std::vector<double> wide(raw.begin(), raw.end());
  return normalize(std::span<const double>(wide));
}

std::uint64_t content_hash(std::string_view text) { return fnv1a64(text); }

EmbeddingVector hash_embed_text(std::uint64_t seed, std::size_t dim, std::string_view text) {
  if (dim < 2) fail(ErrorKind::kInvalidArgument, "hash_embed needs dim >= 2");
  const std::uint64_t key = mix64(seed ^ kGolden) ^ content_hash(text);
  std::vector<double> raw(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    std::uint64_t x = mix64(key + (static_cast<std::uint64_t>(i) + 1) * kGolden);
    // 53 random bits -> exact double in [-1, 1)
    raw[i] = std::ldexp(static_cast<double>(x >> 11), -52) - 1.0;
  }
  bool all_zero = true;
  for (double v : raw) all_zero = all_zero && v == 0.0;
  if (all_zero) raw[0] = 1.0;
  return normalize(std::span<const double>(raw));
}

EmbeddingVector hash_embed(std::uint64_t seed, std::size_t dim, const DescriptionString& doc) {
  return hash_embed_text(seed, dim, doc.text);
}

std::optional<std::size_t> registered_dimensionality(std::string_view model_id) {
  for (const auto& m : kModels) {
    if (m.id == model_id) return m.dim;
  }
  return std::nullopt;
}

ProviderConfig default_provider_config(std::string_view model_id) {
  ProviderConfig c;
  c.model_id = std::string(model_id);
  if (model_id == "hash-test") {
    c.kind = ProviderKind::kHashTest;
    c.dimensionality = 64;
    c.max_input_chars = 8192;
    return c;
  }
  for (const auto& m : kModels) {
    if (m.id == model_id) {
      c.dimensionality = m.dim;
      c.max_input_chars = chars_for_tokens(m.token_limit);
      return c;
    }
  }
  fail(ErrorKind::kConfig, "unknown embedding model '" + std::string(model_id) + "'");
}

void validate_provider_config(const ProviderConfig& c) {
  if (c.model_id.empty()) fail(ErrorKind::kConfig, "provider without model_id");
  if (c.model_id.find_first_of("/\\") != std::string::npos || c.model_id == "." ||
      c.model_id == "..") {
    fail(ErrorKind::kConfig, "model_id '" + c.model_id + "' is not a valid file stem");
  }
  if (c.dimensionality == 0 || c.max_input_chars == 0 || c.batch_size == 0 ||
      c.max_in_flight == 0) {
    fail(ErrorKind::kConfig, "provider " + c.model_id +
                                 ": dimensionality, max_input_chars, batch_size and "
                                 "max_in_flight must be positive");
  }
  if (c.kind == ProviderKind::kHashTest) {
    if (c.model_id != "hash-test") {
      fail(ErrorKind::kConfig, "hash-test provider must use model_id 'hash-test'");
    }
    if (c.dimensionality < 2) fail(ErrorKind::kConfig, "hash-test needs dimensionality >= 2");
    return;
  }
  auto dim = registered_dimensionality(c.model_id);
  if (!dim) fail(ErrorKind::kConfig, "unregistered embedding model '" + c.model_id + "'");
  if (*dim != c.dimensionality) {
    fail(ErrorKind::kConfig, "model " + c.model_id + " has dimensionality " +
                                 std::to_string(*dim) + ", config says " +
                                 std::to_string(c.dimensionality));
  }
  if (!c.endpoint || c.endpoint->empty()) {
    fail(ErrorKind::kConfig, "remote provider " + c.model_id + " needs an endpoint");
  }
  if (c.retry.max_attempts < 1) fail(ErrorKind::kConfig, "retry.max_attempts must be >= 1");
}

}  // namespace attackmap
