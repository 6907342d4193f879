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
#include <ostream>
#include <string>

#include <json.hpp>

#include "attackmap/pipeline_config.hpp"

namespace attackmap {

// Each command validates the config, writes its outputs atomically, prints a
// human-readable line to `out` and returns a machine-readable summary. Errors
// are thrown as attackmap::Error.
nlohmann::ordered_json cmd_ingest(const PipelineConfig& config, std::ostream& out);
nlohmann::ordered_json cmd_embed(const PipelineConfig& config, const std::string& model_id,
                                 std::ostream& out);
nlohmann::ordered_json cmd_map(const PipelineConfig& config, const std::string& model_id,
                               std::size_t k, Method method, Direction direction,
                               std::ostream& out);
// Status "failed" when any requested cell was skipped.
nlohmann::ordered_json cmd_evaluate(const PipelineConfig& config, std::ostream& out);
nlohmann::ordered_json cmd_report(const PipelineConfig& config, std::ostream& out);

// <output_dir>/mapping_<model>_k<k>_<method>_<direction>.<ext>
std::string mapping_file_stem(const std::string& model_id, std::size_t k, Method method,
                              Direction direction);

// SOURCE_DATE_EPOCH as an ISO-8601 UTC timestamp when set, else `fallback`.
std::string report_timestamp(const std::string& fallback);

}  // namespace attackmap
