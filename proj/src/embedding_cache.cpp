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

#include "attackmap/embedding_cache.hpp"

#include <bit>
#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "attackmap/error.hpp"
#include "attackmap/text.hpp"

namespace attackmap {

namespace {

std::string floats_to_hex(std::span<const float> values) {
  std::string out;
  out.reserve(values.size() * 8);
  char buf[9];
  for (float v : values) {
    std::snprintf(buf, sizeof buf, "%08x", std::bit_cast<std::uint32_t>(v));
    out += buf;
  }
  return out;
}

std::vector<float> hex_to_floats(std::string_view hex) {
  if (hex.size() % 8 != 0) fail(ErrorKind::kIntegrity, "cache vector has a partial float");
  std::vector<float> out(hex.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto bits = static_cast<std::uint32_t>(parse_hex64(hex.substr(i * 8, 8)));
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

}  // namespace

EmbeddingCache::EmbeddingCache(std::string dir) : dir_(std::move(dir)) {}

EmbeddingCache::ModelCache& EmbeddingCache::model(const std::string& model_id) {
  auto it = models_.find(model_id);
  if (it != models_.end()) return it->second;
  ModelCache mc;
  if (!dir_.empty()) {
    auto path = std::filesystem::path(dir_) / (model_id + ".cache.json");
    if (std::filesystem::exists(path)) {
      try {
        auto j = nlohmann::json::parse(read_file(path.string()));
        for (const auto& e : j.at("entries")) {
          Key key{parse_hex64(e.at("hash").get<std::string>()),
                  e.at("max_input_chars").get<std::size_t>()};
          mc.entries.emplace(
              key, Entry{EmbeddingVector::from_unit(hex_to_floats(e.at("bits").get<std::string>())),
                         e.at("truncated").get<bool>()});
        }
      } catch (const nlohmann::json::exception& ex) {
        fail(ErrorKind::kIntegrity, "corrupt embedding cache " + path.string() + ": " + ex.what());
      }
    }
  }
  return models_.emplace(model_id, std::move(mc)).first->second;
}

std::optional<EmbeddingCache::Entry> EmbeddingCache::lookup(const std::string& model_id,
                                                            std::uint64_t hash,
                                                            std::size_t max_input_chars) {
  std::lock_guard lock(mutex_);
  auto& mc = model(model_id);
  auto it = mc.entries.find({hash, max_input_chars});
  if (it == mc.entries.end()) return std::nullopt;
  return it->second;
}

void EmbeddingCache::insert(const std::string& model_id, std::uint64_t hash,
                            std::size_t max_input_chars, Entry entry) {
  std::lock_guard lock(mutex_);
  auto& mc = model(model_id);
  mc.entries.insert_or_assign({hash, max_input_chars}, std::move(entry));
  mc.dirty = true;
}

std::size_t EmbeddingCache::size(const std::string& model_id) {
  std::lock_guard lock(mutex_);
  return model(model_id).entries.size();
}

void EmbeddingCache::flush() {
  std::lock_guard lock(mutex_);
  if (dir_.empty()) return;
  for (auto& [model_id, mc] : models_) {
    if (!mc.dirty) continue;
    nlohmann::ordered_json j;
    j["model_id"] = model_id;
    auto& entries = j["entries"] = nlohmann::ordered_json::array();
    for (const auto& [key, entry] : mc.entries) {
      nlohmann::ordered_json e;
      e["hash"] = hex64(std::get<0>(key));
      e["max_input_chars"] = std::get<1>(key);
      e["truncated"] = entry.truncated;
      e["bits"] = floats_to_hex(entry.vector.values());
      entries.push_back(std::move(e));
    }
    write_file_atomic((std::filesystem::path(dir_) / (model_id + ".cache.json")).string(),
                      j.dump() + "\n");
    mc.dirty = false;
  }
}

}  // namespace attackmap
