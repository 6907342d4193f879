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

// The bundled mini fixture, parsed and embedded with the hash-test model.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "attackmap/catalog.hpp"
#include "attackmap/embedding_provider.hpp"
#include "attackmap/ground_truth.hpp"
#include "attackmap/text.hpp"

namespace fixtures {

struct Mini {
  attackmap::Catalog catalog;
  attackmap::GroundTruth gt;
  std::vector<attackmap::EmbeddingRecord> patterns;
  std::vector<attackmap::EmbeddingRecord> techniques;
  std::string mock_script;  // path

  const std::vector<attackmap::EmbeddingRecord>& sources(attackmap::Direction d) const {
    return d == attackmap::Direction::kCapecToAttack ? patterns : techniques;
  }
  const std::vector<attackmap::EmbeddingRecord>& targets(attackmap::Direction d) const {
    return d == attackmap::Direction::kCapecToAttack ? techniques : patterns;
  }
};

inline Mini load_mini(std::uint64_t seed = 7) {
  using namespace attackmap;
  const std::string dir = ATTACKMAP_DATA_DIR;
  Mini m;
  auto p = parse_capec(read_file(dir + "/capec_mini.xml"), CapecFormat::kXmlCatalog);
  auto t = parse_attack_ics(read_file(dir + "/attack_ics_mini.json"));
  m.catalog = make_catalog(p.entries, t.entries, p.snapshot_date.value_or(""));
  m.gt = load_ground_truth(read_file(dir + "/ground_truth.json"));
  m.mock_script = dir + "/mock_responses.json";

  ProviderConfig c = default_provider_config("hash-test");
  c.seed = seed;
  Embedder e(std::make_shared<HashTestProvider>(c), nullptr);
  auto embed = [&](const std::vector<CatalogEntry>& entries) {
    std::vector<DescriptionString> docs;
    for (const auto& x : entries) docs.push_back(build_description_string(x));
    return e.embed_documents(docs);
  };
  m.patterns = embed(m.catalog.patterns);
  m.techniques = embed(m.catalog.techniques);
  return m;
}

}  // namespace fixtures
