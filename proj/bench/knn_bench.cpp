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

// Serial vs OpenMP kNN kernels. Args: {queries, corpus, dim}.

#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "attackmap/embedding.hpp"
#include "attackmap/knn.hpp"
#include "attackmap/knn_kernels.hpp"

namespace {

using namespace attackmap;

std::vector<EmbeddingRecord> records(const std::string& prefix, std::size_t n, std::size_t dim,
                                     std::uint64_t seed) {
  std::vector<EmbeddingRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string id = prefix + std::to_string(i);
    out.push_back({id, "bench", 0, hash_embed_text(seed, dim, id), false});
  }
  return out;
}

struct Fixture {
  kernels::Matrix q;
  kernels::Matrix c;
  std::vector<std::string> ids;

  explicit Fixture(const benchmark::State& state) {
    auto qs = records("CAPEC-", state.range(0), state.range(2), 1);
    auto cs = records("T", state.range(1), state.range(2), 2);
    q = kernels::pack(qs);
    c = kernels::pack(cs);
    for (const auto& r : cs) ids.push_back(r.entry_id);
  }
};

void BM_SimilaritySerial(benchmark::State& state) {
  Fixture f(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::similarity_matrix_serial(f.q, f.c));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_SimilarityParallel(benchmark::State& state) {
  Fixture f(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::similarity_matrix_parallel(f.q, f.c));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_TopKSerial(benchmark::State& state) {
  Fixture f(state);
  auto scores = kernels::similarity_matrix_serial(f.q, f.c);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::top_k_rows_serial(scores, f.ids, 5));
}

void BM_TopKParallel(benchmark::State& state) {
  Fixture f(state);
  auto scores = kernels::similarity_matrix_serial(f.q, f.c);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::top_k_rows_parallel(scores, f.ids, 5));
}

void BM_NearestNeighbors(benchmark::State& state) {
  auto qs = records("CAPEC-", state.range(0), state.range(2), 1);
  auto cs = records("T", state.range(1), state.range(2), 2);
  const auto exec = state.range(3) != 0 ? Execution::kParallel : Execution::kSerial;
  for (auto _ : state) benchmark::DoNotOptimize(nearest_neighbors(qs, cs, 5, exec));
}

// 559 x 83 is the full catalog shape at ada-002 width.
#define KNN_ARGS Args({559, 83, 1536})->Args({2000, 500, 384})->Args({200, 50, 64})

BENCHMARK(BM_SimilaritySerial)->KNN_ARGS;
BENCHMARK(BM_SimilarityParallel)->KNN_ARGS;
BENCHMARK(BM_TopKSerial)->KNN_ARGS;
BENCHMARK(BM_TopKParallel)->KNN_ARGS;
BENCHMARK(BM_NearestNeighbors)->Args({559, 83, 1536, 0})->Args({559, 83, 1536, 1});

}  // namespace

BENCHMARK_MAIN();
