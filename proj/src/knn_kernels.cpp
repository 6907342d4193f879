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

#include "attackmap/knn_kernels.hpp"

#include <algorithm>
#include <numeric>

#include "attackmap/error.hpp"
#include "attackmap/text.hpp"

namespace attackmap::kernels {

Matrix pack(std::span<const EmbeddingRecord> records) {
  Matrix m;
  m.rows = records.size();
  m.cols = records.empty() ? 0 : records.front().vector.size();
  m.data.reserve(m.rows * m.cols);
  for (const auto& r : records) {
    if (r.vector.size() != m.cols) {
      fail(ErrorKind::kInvalidArgument, "record " + r.entry_id + " has dimension " +
                                            std::to_string(r.vector.size()) + ", expected " +
                                            std::to_string(m.cols));
    }
    auto v = r.vector.values();
    m.data.insert(m.data.end(), v.begin(), v.end());
  }
  return m;
}

double dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

namespace {

void check_shapes(const Matrix& q, const Matrix& c) {
  if (q.rows > 0 && c.rows > 0 && q.cols != c.cols) {
    fail(ErrorKind::kInvalidArgument, "query dimension " + std::to_string(q.cols) +
                                          " differs from corpus dimension " + std::to_string(c.cols));
  }
}

void score_row(const Matrix& q, const Matrix& c, ScoreMatrix& out, std::size_t i) {
  auto qi = q.row(i);
  double* dst = out.data.data() + i * out.cols;
  for (std::size_t j = 0; j < c.rows; ++j) dst[j] = dot(qi, c.row(j));
}

void select_row(const ScoreMatrix& s, std::span<const std::string> ids, std::size_t k,
                std::size_t r, std::vector<std::uint32_t>& out) {
  std::vector<std::uint32_t> idx(s.cols);
  std::iota(idx.begin(), idx.end(), 0u);
  auto row = s.row(r);
  auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (row[a] != row[b]) return row[a] > row[b];
    return id_less(ids[a], ids[b]);
  };
  std::size_t take = std::min(k, s.cols);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(), better);
  idx.resize(take);
  out = std::move(idx);
}

void check_topk_args(const ScoreMatrix& s, std::span<const std::string> ids, std::size_t k) {
  if (k < 1) fail(ErrorKind::kInvalidArgument, "k must be >= 1");
  if (ids.size() != s.cols) fail(ErrorKind::kInvalidArgument, "corpus id count != score columns");
}

}  // namespace

ScoreMatrix similarity_matrix_serial(const Matrix& queries, const Matrix& corpus) {
  check_shapes(queries, corpus);
  ScoreMatrix out{queries.rows, corpus.rows, std::vector<double>(queries.rows * corpus.rows)};
  for (std::size_t i = 0; i < queries.rows; ++i) score_row(queries, corpus, out, i);
  return out;
}

ScoreMatrix similarity_matrix_parallel(const Matrix& queries, const Matrix& corpus) {
  check_shapes(queries, corpus);
  ScoreMatrix out{queries.rows, corpus.rows, std::vector<double>(queries.rows * corpus.rows)};
  const auto n = static_cast<std::ptrdiff_t>(queries.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    score_row(queries, corpus, out, static_cast<std::size_t>(i));
  }
  return out;
}

TopKIndices top_k_rows_serial(const ScoreMatrix& scores, std::span<const std::string> corpus_ids,
                              std::size_t k) {
  check_topk_args(scores, corpus_ids, k);
  TopKIndices out(scores.rows);
  for (std::size_t r = 0; r < scores.rows; ++r) select_row(scores, corpus_ids, k, r, out[r]);
  return out;
}

TopKIndices top_k_rows_parallel(const ScoreMatrix& scores, std::span<const std::string> corpus_ids,
                                std::size_t k) {
  check_topk_args(scores, corpus_ids, k);
  TopKIndices out(scores.rows);
  const auto n = static_cast<std::ptrdiff_t>(scores.rows);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    select_row(scores, corpus_ids, k, static_cast<std::size_t>(r), out[static_cast<std::size_t>(r)]);
  }
  return out;
}

}  // namespace attackmap::kernels
