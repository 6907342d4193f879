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
#include <span>
#include <string>
#include <vector>

#include "attackmap/embedding.hpp"

// Dense similarity and top-k selection kernels. Each kernel has a serial
// reference and an OpenMP version parallel over query rows; both evaluate the
// same per-element arithmetic in the same order, so their outputs are
// bit-identical.
namespace attackmap::kernels {

// Row-major float matrix, one embedding per row.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(data).subspan(i * cols, cols);
  }
};

Matrix pack(std::span<const EmbeddingRecord> records);

// sum_i a[i]*b[i], accumulated left to right in double precision.
double dot(std::span<const float> a, std::span<const float> b);

struct ScoreMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data).subspan(r * cols, cols);
  }
};

ScoreMatrix similarity_matrix_serial(const Matrix& queries, const Matrix& corpus);
ScoreMatrix similarity_matrix_parallel(const Matrix& queries, const Matrix& corpus);

// For each row, the column indices of the min(k, cols) best entries ordered by
// score descending, then by corpus id ascending (id_less).
using TopKIndices = std::vector<std::vector<std::uint32_t>>;

TopKIndices top_k_rows_serial(const ScoreMatrix& scores, std::span<const std::string> corpus_ids,
                              std::size_t k);
TopKIndices top_k_rows_parallel(const ScoreMatrix& scores, std::span<const std::string> corpus_ids,
                                std::size_t k);

}  // namespace attackmap::kernels
