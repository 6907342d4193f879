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

#include <string>
#include <string_view>
#include <vector>

#include "attackmap/metrics.hpp"

namespace attackmap {

// A grid cell that could not be computed.
struct SkippedCell {
  std::string model_id;
  std::size_t k = 1;
  Method method = Method::kNearestNeighbor;
  Direction direction = Direction::kCapecToAttack;
  std::string reason;

  bool operator==(const SkippedCell&) const = default;
};

// A RAG source that was skipped after a backend error.
struct SourceFailure {
  std::string model_id;
  std::size_t k = 1;
  Direction direction = Direction::kCapecToAttack;
  std::string source_id;
  std::string reason;

  bool operator==(const SourceFailure&) const = default;
};

struct EvaluationReport {
  std::vector<MetricsRow> rows;  // grid order
  std::vector<SkippedCell> skipped;
  std::vector<SourceFailure> source_failures;
  std::string ground_truth_digest;
  std::string generated_at;

  // Throws Error(kIntegrity) on duplicate (model, method, direction, k) rows.
  void validate() const;
};

enum class ReportFormat { kMarkdown, kCsv };

// 4-decimal value without the leading zero (".1176", "1.0000"); U+2014 when
// undefined.
std::string format_metric(const std::optional<Ratio>& value);

// Markdown: one table per direction, one line per (model, k) with the NN
// block followed by the RAG block. CSV: one line per row, unrounded.
// Throws Error(kInvalidArgument) for a report without rows.
std::string render_report(const EvaluationReport& report, ReportFormat format);

// Lossless JSON form, used to re-render without recomputation.
std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(std::string_view text);

}  // namespace attackmap
