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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "attackmap/embedding.hpp"
#include "attackmap/embedding_cache.hpp"
#include "attackmap/embedding_provider.hpp"
#include "attackmap/error.hpp"
#include "attackmap/http_client.hpp"
#include "attackmap/text.hpp"
#include "attackmap/vector_store.hpp"
#include "test_server.hpp"

namespace attackmap {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("attackmap_embedding_" + name);
  fs::remove_all(dir);
  return dir;
}

double norm(const EmbeddingVector& v) {
  double s = 0;
  for (float x : v.values()) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no attackmap::Error thrown";
  return ErrorKind::kIo;
}

std::vector<DescriptionString> docs(std::size_t n) {
  std::vector<DescriptionString> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"T" + std::to_string(i), "Name: n" + std::to_string(i) + "\nID: T" +
                                                std::to_string(i) + "\nDescription: d"});
  }
  return out;
}

TEST(Normalize, UnitNormAndIdempotent) {
  std::vector<double> raw = {3.0, 4.0};
  auto v = normalize(raw);
  EXPECT_FLOAT_EQ(v.values()[0], 0.6f);
  EXPECT_FLOAT_EQ(v.values()[1], 0.8f);
  std::vector<float> again(v.values().begin(), v.values().end());
  EXPECT_EQ(normalize(std::span<const float>(again)), v);
  EXPECT_EQ(kind_of([] { std::vector<double> z = {0.0, 0.0}; normalize(z); }),
            ErrorKind::kInvalidArgument);
  EXPECT_EQ(kind_of([] { std::vector<double> z = {NAN, 1.0}; normalize(z); }),
            ErrorKind::kInvalidArgument);
  EXPECT_EQ(kind_of([] { EmbeddingVector::from_unit({1.0f, 1.0f}); }), ErrorKind::kIntegrity);
}

TEST(HashEmbed, DeterministicUnitNorm) {
  auto a = hash_embed_text(7, 64, "hello");
  auto b = hash_embed_text(7, 64, "hello");
  auto c = hash_embed_text(8, 64, "hello");
  auto d = hash_embed_text(7, 64, "hello!");
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_NE(a, d);
  EXPECT_EQ(a.size(), 64u);
  EXPECT_NEAR(norm(a), 1.0, 1e-6);
  EXPECT_THROW(hash_embed_text(7, 1, "x"), Error);
}

TEST(HashEmbed, FrozenValues) {
  // Values from an independent reimplementation of the generator.
  auto v = hash_embed_text(0, 4, "abc");
  const std::vector<float> expected = {0x1.9337ap-2f, -0x1.9ebdfp-3f, -0x1.49d4c8p-2f,
                                       -0x1.ac6d7p-1f};
  EXPECT_EQ(std::vector<float>(v.values().begin(), v.values().end()), expected);
  EXPECT_EQ(content_hash("abc"), fnv1a64("abc"));
}

TEST(ProviderConfig, RegisteredModels) {
  EXPECT_EQ(registered_dimensionality("ada-002"), 1536u);
  EXPECT_EQ(registered_dimensionality("e5"), 1024u);
  EXPECT_EQ(registered_dimensionality("instructor"), 768u);
  EXPECT_EQ(registered_dimensionality("sent-transf"), 384u);
  EXPECT_FALSE(registered_dimensionality("hash-test").has_value());
  EXPECT_FALSE(registered_dimensionality("nope").has_value());
  EXPECT_EQ(default_provider_config("ada-002").max_input_chars, 8191u * 7 / 2);
  EXPECT_EQ(default_provider_config("e5").max_input_chars, 512u * 7 / 2);
  EXPECT_EQ(default_provider_config("hash-test").dimensionality, 64u);
  EXPECT_EQ(kind_of([] { default_provider_config("nope"); }), ErrorKind::kConfig);

  ProviderConfig c = default_provider_config("e5");
  c.endpoint = "http://x";
  EXPECT_NO_THROW(validate_provider_config(c));
  c.dimensionality = 1536;
  EXPECT_EQ(kind_of([&] { validate_provider_config(c); }), ErrorKind::kConfig);
  c = default_provider_config("e5");
  EXPECT_EQ(kind_of([&] { validate_provider_config(c); }), ErrorKind::kConfig);  // no endpoint
}

TEST(Embedder, OneRecordPerDocInOrder) {
  ProviderConfig c = default_provider_config("hash-test");
  c.batch_size = 3;
  Embedder e(std::make_shared<HashTestProvider>(c), nullptr);
  auto d = docs(10);
  auto recs = e.embed_documents(d);
  ASSERT_EQ(recs.size(), 10u);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i].entry_id, d[i].entry_id);
    EXPECT_EQ(recs[i].model_id, "hash-test");
    EXPECT_EQ(recs[i].content_hash, content_hash(d[i].text));
    EXPECT_EQ(recs[i].vector, hash_embed_text(0, 64, d[i].text));
    EXPECT_FALSE(recs[i].truncated);
  }
  EXPECT_EQ(e.batches_sent(), 4u);
}

TEST(Embedder, SecondCallServedFromCache) {
  ProviderConfig c = default_provider_config("hash-test");
  auto cache = std::make_shared<EmbeddingCache>();
  Embedder e(std::make_shared<HashTestProvider>(c), cache);
  auto d = docs(1);
  auto first = e.embed_documents(d);
  auto sent = e.batches_sent();
  auto second = e.embed_documents(d);
  EXPECT_EQ(e.batches_sent(), sent);
  EXPECT_EQ(first, second);
}

TEST(Embedder, TruncatesAtCharacterBudget) {
  ProviderConfig c = default_provider_config("hash-test");
  c.max_input_chars = 10;
  Embedder e(std::make_shared<HashTestProvider>(c), nullptr);
  std::vector<DescriptionString> d = {{"T1", "0123456789abcdef"}, {"T2", "short"}};
  auto recs = e.embed_documents(d);
  EXPECT_TRUE(recs[0].truncated);
  EXPECT_FALSE(recs[1].truncated);
  EXPECT_EQ(recs[0].vector, hash_embed_text(0, 64, "0123456789"));
  EXPECT_EQ(recs[0].content_hash, content_hash("0123456789abcdef"));
}

TEST(Cache, PersistsBitExact) {
  auto dir = scratch("cache");
  ProviderConfig c = default_provider_config("hash-test");
  std::vector<EmbeddingRecord> first;
  {
    auto cache = std::make_shared<EmbeddingCache>(dir.string());
    Embedder e(std::make_shared<HashTestProvider>(c), cache);
    first = e.embed_documents(docs(5));
  }
  EXPECT_TRUE(fs::exists(dir / "hash-test.cache.json"));
  auto cache = std::make_shared<EmbeddingCache>(dir.string());
  EXPECT_EQ(cache->size("hash-test"), 5u);
  // A provider that must never be called.
  struct Refuse final : EmbeddingProvider {
    ProviderConfig cfg = default_provider_config("hash-test");
    const ProviderConfig& config() const override { return cfg; }
    std::vector<std::vector<float>> embed_batch(std::span<const std::string>) override {
      fail(ErrorKind::kProvider, "called");
    }
  };
  Embedder e(std::make_shared<Refuse>(), cache);
  EXPECT_EQ(e.embed_documents(docs(5)), first);
  EXPECT_EQ(e.batches_sent(), 0u);
  fs::remove_all(dir);
}

TEST(VectorStore, RoundTripAndIntegrity) {
  auto dir = scratch("store");
  ProviderConfig c = default_provider_config("hash-test");
  Embedder e(std::make_shared<HashTestProvider>(c), nullptr);
  auto recs = e.embed_documents(docs(7));
  VectorStore store(dir.string());
  EXPECT_FALSE(store.contains("hash-test"));
  EXPECT_EQ(kind_of([&] { store.load("hash-test"); }), ErrorKind::kNotFound);
  store.store("hash-test", 64, recs);
  EXPECT_TRUE(store.contains("hash-test"));
  EXPECT_EQ(store.load("hash-test"), recs);
  EXPECT_EQ(fs::file_size(store.vectors_path("hash-test")), 7u * 64 * 4);

  fs::resize_file(store.vectors_path("hash-test"), 7u * 64 * 4 - 4);
  EXPECT_EQ(kind_of([&] { store.load("hash-test"); }), ErrorKind::kIntegrity);
  EXPECT_THROW(store.store("hash-test", 32, recs), Error);
  fs::remove_all(dir);
}

TEST(MakeProvider, OfflineRejectsRemote) {
  ProviderConfig c = default_provider_config("ada-002");
  c.endpoint = "http://127.0.0.1:1/embed";
  EXPECT_EQ(kind_of([&] { make_provider(c, true); }), ErrorKind::kConfig);
  EXPECT_NO_THROW(make_provider(default_provider_config("hash-test"), true));
}

// --- HTTP wire formats --------------------------------------------------------

ProviderConfig remote(const std::string& url, std::size_t dim, ApiShape shape) {
  ProviderConfig c = default_provider_config("sent-transf");
  c.endpoint = url;
  c.dimensionality = dim;
  c.api_shape = shape;
  c.retry.base_delay = std::chrono::milliseconds(0);
  c.timeout = std::chrono::seconds(5);
  return c;
}

std::vector<float> raw_vector(std::size_t dim, float seed) {
  std::vector<float> v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = seed + static_cast<float>(i);
  return v;
}

TEST(HttpProvider, NeutralShape) {
  nlohmann::json seen;
  testing_support::LocalServer server("/embed", [&](const auto& req, auto& res) {
    seen = nlohmann::json::parse(req.body);
    seen["auth"] = req.get_header_value("Authorization");
    nlohmann::json out;
    for (std::size_t i = 0; i < seen["inputs"].size(); ++i) out["vectors"].push_back(raw_vector(384, i));
    res.set_content(out.dump(), "application/json");
  });
  setenv("ATTACKMAP_TEST_KEY", "sekret", 1);
  ProviderConfig c = remote(server.url("/embed"), 384, ApiShape::kNeutral);
  c.auth_env = "ATTACKMAP_TEST_KEY";
  Embedder e(make_provider(c, false), nullptr);
  auto recs = e.embed_documents(docs(2));
  EXPECT_EQ(seen["model"], "sent-transf");
  EXPECT_EQ(seen["inputs"].size(), 2u);
  EXPECT_EQ(seen["auth"], "Bearer sekret");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].vector.size(), 384u);
  EXPECT_NEAR(norm(recs[1].vector), 1.0, 1e-6);

  unsetenv("ATTACKMAP_TEST_KEY");
  EXPECT_EQ(kind_of([&] { Embedder(make_provider(c, false), nullptr).embed_documents(docs(1)); }),
            ErrorKind::kProvider);
}

TEST(HttpProvider, OpenAIShapeReordersByIndex) {
  testing_support::LocalServer server("/v1/embeddings", [&](const auto& req, auto& res) {
    auto in = nlohmann::json::parse(req.body);
    nlohmann::json out;
    out["data"] = nlohmann::json::array();
    for (std::size_t i = in["input"].size(); i-- > 0;) {
      out["data"].push_back({{"index", i}, {"embedding", raw_vector(1536, i)}});
    }
    res.set_content(out.dump(), "application/json");
  });
  ProviderConfig c = remote(server.url("/v1/embeddings"), 1536, ApiShape::kOpenAI);
  c.model_id = "ada-002";
  auto recs = Embedder(make_provider(c, false), nullptr).embed_documents(docs(3));
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].vector.size(), 1536u);
  EXPECT_EQ(recs[0].vector, normalize(std::span<const float>(raw_vector(1536, 0))));
}

TEST(HttpProvider, RetriesServerErrors) {
  std::atomic<int> calls{0};
  testing_support::LocalServer server("/embed", [&](const auto& req, auto& res) {
    if (calls.fetch_add(1) < 2) {
      res.status = 503;
      return;
    }
    auto in = nlohmann::json::parse(req.body);
    nlohmann::json out;
    for (std::size_t i = 0; i < in["inputs"].size(); ++i) out["vectors"].push_back(raw_vector(384, 1));
    res.set_content(out.dump(), "application/json");
  });
  auto recs = Embedder(make_provider(remote(server.url("/embed"), 384, ApiShape::kNeutral), false),
                       nullptr)
                  .embed_documents(docs(1));
  EXPECT_EQ(calls.load(), 3);
  EXPECT_EQ(recs.size(), 1u);
}

TEST(HttpProvider, ExhaustedRetriesNameTheBatch) {
  std::atomic<int> calls{0};
  testing_support::LocalServer server("/embed", [&](const auto&, auto& res) {
    calls.fetch_add(1);
    res.status = 500;
  });
  ProviderConfig c = remote(server.url("/embed"), 384, ApiShape::kNeutral);
  c.batch_size = 4;
  c.max_in_flight = 1;
  try {
    Embedder(make_provider(c, false), nullptr).embed_documents(docs(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kProvider);
    EXPECT_NE(std::string(e.what()).find("batch 0"), std::string::npos) << e.what();
  }
  EXPECT_EQ(calls.load(), 3);
}

TEST(HttpProvider, ClientErrorsAreNotRetried) {
  std::atomic<int> calls{0};
  testing_support::LocalServer server("/embed", [&](const auto&, auto& res) {
    calls.fetch_add(1);
    res.status = 400;
  });
  EXPECT_EQ(kind_of([&] {
              Embedder(make_provider(remote(server.url("/embed"), 384, ApiShape::kNeutral), false),
                       nullptr)
                  .embed_documents(docs(1));
            }),
            ErrorKind::kProvider);
  EXPECT_EQ(calls.load(), 1);
}

TEST(HttpProvider, DimensionMismatchIsIntegrityError) {
  testing_support::LocalServer server("/embed", [&](const auto& req, auto& res) {
    auto in = nlohmann::json::parse(req.body);
    nlohmann::json out;
    for (std::size_t i = 0; i < in["inputs"].size(); ++i) out["vectors"].push_back(raw_vector(100, 1));
    res.set_content(out.dump(), "application/json");
  });
  EXPECT_EQ(kind_of([&] {
              Embedder(make_provider(remote(server.url("/embed"), 384, ApiShape::kNeutral), false),
                       nullptr)
                  .embed_documents(docs(2));
            }),
            ErrorKind::kIntegrity);
}

TEST(HttpClient, ParseUrl) {
  auto u = http::parse_url("https://api.example.com/v1/embeddings");
  EXPECT_EQ(u.scheme, "https");
  EXPECT_EQ(u.host, "api.example.com");
  EXPECT_EQ(u.port, 443);
  EXPECT_EQ(u.path, "/v1/embeddings");
  auto v = http::parse_url("http://127.0.0.1:8080");
  EXPECT_EQ(v.port, 8080);
  EXPECT_EQ(v.path, "/");
  EXPECT_THROW(http::parse_url("ftp://x"), Error);
}

}  // namespace
}  // namespace attackmap
