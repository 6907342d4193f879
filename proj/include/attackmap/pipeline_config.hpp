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
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "attackmap/catalog.hpp"
#include "attackmap/embedding.hpp"
#include "attackmap/rag.hpp"
#include "attackmap/sweep.hpp"

namespace attackmap {

// Relative paths in the file are resolved against the config file's folder.
struct PipelinePaths {
  std::string capec;
  CapecFormat capec_format = CapecFormat::kXmlCatalog;
  std::string attack;
  std::string ground_truth;
  std::string store_dir;
  std::string cache_dir;  // empty: in-memory cache only
  std::string output_dir;

  std::string catalog_file() const;  // <store_dir>/catalog.jsonl
};

struct PipelineConfig {
  PipelinePaths paths;
  bool include_deprecated = false;
  std::optional<std::string> snapshot_date;  // overrides the source header
  std::vector<ProviderConfig> providers;
  std::optional<RagConfig> rag;
  SweepAxes sweep;
  std::uint64_t seed = 0;
  bool offline = false;

  // Throws Error(kConfig) for an unconfigured model.
  const ProviderConfig& provider(std::string_view model_id) const;

  // Sets the global seed; hash-test providers without their own seed follow.
  void apply_seed(std::uint64_t seed);

  // Throws Error(kConfig) on violated invariants.
  void validate() const;

  std::set<std::size_t> explicit_seed_providers;
};

// Unknown keys anywhere in the file are rejected with Error(kConfig).
PipelineConfig parse_pipeline_config(std::string_view toml_text,
                                     const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::string& path);

}  // namespace attackmap
