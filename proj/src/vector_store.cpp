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

#include "attackmap/vector_store.hpp"

#include <bit>
#include <filesystem>

#include <json.hpp>

#include "attackmap/error.hpp"
#include "attackmap/text.hpp"

namespace attackmap {

namespace fs = std::filesystem;

VectorStore::VectorStore(std::string dir) : dir_(std::move(dir)) {}

std::string VectorStore::manifest_path(const std::string& model_id) const {
  return (fs::path(dir_) / (model_id + ".manifest.json")).string();
}

std::string VectorStore::vectors_path(const std::string& model_id) const {
  return (fs::path(dir_) / (model_id + ".f32")).string();
}

bool VectorStore::contains(const std::string& model_id) const {
  return fs::exists(manifest_path(model_id)) && fs::exists(vectors_path(model_id));
}

void VectorStore::store(const std::string& model_id, std::size_t dim,
                        const std::vector<EmbeddingRecord>& records) const {
  nlohmann::ordered_json manifest;
  manifest["format"] = "attackmap-vectors";
  manifest["version"] = 1;
  manifest["model_id"] = model_id;
  manifest["dim"] = dim;
  manifest["count"] = records.size();
  auto& entries = manifest["entries"] = nlohmann::ordered_json::array();

  std::string binary;
  binary.reserve(records.size() * dim * 4);
  for (const auto& r : records) {
    if (r.model_id != model_id) {
      fail(ErrorKind::kInvalidArgument,
           "record " + r.entry_id + " belongs to model " + r.model_id + ", not " + model_id);
    }
    if (r.vector.size() != dim) {
      fail(ErrorKind::kInvalidArgument, "record " + r.entry_id + " has length " +
                                            std::to_string(r.vector.size()) + ", store dim is " +
                                            std::to_string(dim));
    }
    nlohmann::ordered_json e;
    e["id"] = r.entry_id;
    e["content_hash"] = hex64(r.content_hash);
    e["truncated"] = r.truncated;
    entries.push_back(std::move(e));
    for (float v : r.vector.values()) {
      auto bits = std::bit_cast<std::uint32_t>(v);
      for (int b = 0; b < 4; ++b) binary.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
    }
  }
  write_file_atomic(vectors_path(model_id), binary);
  write_file_atomic(manifest_path(model_id), manifest.dump(2) + "\n");
}

std::vector<EmbeddingRecord> VectorStore::load(const std::string& model_id) const {
  if (!contains(model_id)) {
    fail(ErrorKind::kNotFound, "no stored vectors for model '" + model_id + "' in " + dir_);
  }
  std::vector<EmbeddingRecord> records;
  std::size_t dim = 0;
  try {
    auto manifest = nlohmann::json::parse(read_file(manifest_path(model_id)));
    if (manifest.at("model_id").get<std::string>() != model_id) {
      fail(ErrorKind::kIntegrity, "manifest " + manifest_path(model_id) + " names another model");
    }
    dim = manifest.at("dim").get<std::size_t>();
    auto count = manifest.at("count").get<std::size_t>();
    const auto& entries = manifest.at("entries");
    if (entries.size() != count) {
      fail(ErrorKind::kIntegrity, "manifest count " + std::to_string(count) + " but " +
                                      std::to_string(entries.size()) + " entries");
    }
    for (const auto& e : entries) {
      EmbeddingRecord r;
      r.entry_id = e.at("id").get<std::string>();
      r.model_id = model_id;
      r.content_hash = parse_hex64(e.at("content_hash").get<std::string>());
      r.truncated = e.at("truncated").get<bool>();
      records.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kIntegrity, "bad manifest " + manifest_path(model_id) + ": " + e.what());
  }

  std::string binary = read_file(vectors_path(model_id));
  if (binary.size() != records.size() * dim * 4) {
    fail(ErrorKind::kIntegrity, vectors_path(model_id) + " holds " +
                                    std::to_string(binary.size()) + " bytes, manifest implies " +
                                    std::to_string(records.size() * dim * 4));
  }
  std::size_t offset = 0;
  for (auto& r : records) {
    std::vector<float> values(dim);
    for (auto& v : values) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(binary[offset++])) << (8 * b);
      }
      v = std::bit_cast<float>(bits);
    }
    r.vector = EmbeddingVector::from_unit(std::move(values));
  }
  return records;
}

}  // namespace attackmap
