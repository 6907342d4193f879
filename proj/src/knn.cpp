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

#include "attackmap/knn.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include <json.hpp>

#include "attackmap/csv_reader.hpp"
#include "attackmap/error.hpp"
#include "attackmap/text.hpp"

namespace attackmap {

std::string_view direction_name(Direction d) {
  return d == Direction::kCapecToAttack ? "capec-to-attack" : "attack-to-capec";
}

std::string_view method_name(Method m) { return m == Method::kNearestNeighbor ? "nn" : "rag"; }

Direction parse_direction(std::string_view text) {
  if (text == "capec-to-attack") return Direction::kCapecToAttack;
  if (text == "attack-to-capec") return Direction::kAttackToCapec;
  fail(ErrorKind::kInvalidArgument, "unknown direction '" + std::string(text) + "'");
}

Method parse_method(std::string_view text) {
  if (text == "nn") return Method::kNearestNeighbor;
  if (text == "rag") return Method::kRag;
  fail(ErrorKind::kInvalidArgument, "unknown method '" + std::string(text) + "'");
}

double similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::kInvalidArgument, "similarity of vectors with dimensions " +
                                          std::to_string(a.size()) + " and " +
                                          std::to_string(b.size()));
  }
  return kernels::dot(a.values(), b.values());
}

std::vector<ScoredId> top_k(const EmbeddingRecord& query, std::span<const EmbeddingRecord> corpus,
                            std::size_t k) {
  if (k < 1) fail(ErrorKind::kInvalidArgument, "k must be >= 1");
  if (corpus.empty()) fail(ErrorKind::kInvalidArgument, "top_k over an empty corpus");
  std::vector<double> scores(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) scores[i] = similarity(query.vector, corpus[i].vector);
  std::vector<std::size_t> idx(corpus.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::size_t take = std::min(k, corpus.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return id_less(corpus[a].entry_id, corpus[b].entry_id);
                    });
  std::vector<ScoredId> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({corpus[idx[i]].entry_id, scores[idx[i]]});
  return out;
}

namespace {

void check_unique_ids(std::span<const EmbeddingRecord> records, const char* what) {
  std::set<std::string_view> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.entry_id).second) {
      fail(ErrorKind::kInvalidArgument, std::string("duplicate ") + what + " id " + r.entry_id);
    }
  }
}

}  // namespace

NeighborTable nearest_neighbors(std::span<const EmbeddingRecord> sources,
                                std::span<const EmbeddingRecord> targets, std::size_t k,
                                Execution execution) {
  if (k < 1) fail(ErrorKind::kInvalidArgument, "k must be >= 1");
  if (sources.empty() || targets.empty()) {
    fail(ErrorKind::kInvalidArgument, "nearest-neighbour mapping needs non-empty sources and targets");
  }
  const std::string& model = sources.front().model_id;
  for (auto list : {sources, targets}) {
    for (const auto& r : list) {
      if (r.model_id != model) {
        fail(ErrorKind::kInvalidArgument, "model mismatch: " + r.entry_id + " embedded with " +
                                              r.model_id + ", expected " + model);
      }
    }
  }
  check_unique_ids(sources, "source");
  check_unique_ids(targets, "target");

  kernels::Matrix q = kernels::pack(sources);
  kernels::Matrix c = kernels::pack(targets);
  std::vector<std::string> target_ids;
  target_ids.reserve(targets.size());
  for (const auto& t : targets) target_ids.push_back(t.entry_id);

  const bool parallel = execution == Execution::kParallel;
  kernels::ScoreMatrix scores =
      parallel ? kernels::similarity_matrix_parallel(q, c) : kernels::similarity_matrix_serial(q, c);
  kernels::TopKIndices best = parallel ? kernels::top_k_rows_parallel(scores, target_ids, k)
                                       : kernels::top_k_rows_serial(scores, target_ids, k);

  std::vector<std::size_t> order(sources.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return id_less(sources[a].entry_id, sources[b].entry_id);
  });

  NeighborTable table;
  table.model_id = model;
  table.target_count = targets.size();
  for (std::size_t s : order) {
    table.source_ids.push_back(sources[s].entry_id);
    std::vector<ScoredId> row;
    row.reserve(best[s].size());
    for (auto j : best[s]) row.push_back({target_ids[j], scores.at(s, j)});
    table.neighbors.push_back(std::move(row));
  }
  return table;
}

MappingSet mapping_from_table(const NeighborTable& table, std::size_t k, Direction direction) {
  if (k < 1) fail(ErrorKind::kInvalidArgument, "k must be >= 1");
  MappingSet m;
  m.direction = direction;
  m.model_id = table.model_id;
  m.k = k;
  m.method = Method::kNearestNeighbor;
  for (std::size_t s = 0; s < table.source_ids.size(); ++s) {
    const auto& row = table.neighbors[s];
    std::size_t expect = std::min(k, table.target_count);
    if (row.size() < expect) {
      fail(ErrorKind::kInvalidArgument, "neighbour table was built for a smaller k than " +
                                            std::to_string(k));
    }
    for (std::size_t r = 0; r < expect; ++r) {
      m.edges.push_back({table.source_ids[s], row[r].entry_id, static_cast<int>(r + 1),
                         row[r].score, Method::kNearestNeighbor, std::nullopt});
    }
  }
  return m;
}

MappingSet nn_mapping(std::span<const EmbeddingRecord> sources,
                      std::span<const EmbeddingRecord> targets, std::size_t k, Direction direction,
                      Execution execution) {
  return mapping_from_table(nearest_neighbors(sources, targets, k, execution), k, direction);
}

void MappingSet::validate() const {
  if (k < 1) fail(ErrorKind::kIntegrity, "mapping with k < 1");
  std::set<std::pair<std::string, std::string>> pairs;
  std::map<std::string, std::vector<const MappingEdge*>> by_source;
  for (const auto& e : edges) {
    if (e.method != method) fail(ErrorKind::kIntegrity, "edge method differs from mapping method");
    if (!pairs.emplace(e.source_id, e.target_id).second) {
      fail(ErrorKind::kIntegrity, "duplicate edge " + e.source_id + " -> " + e.target_id);
    }
    if (e.rationale && method != Method::kRag) {
      fail(ErrorKind::kIntegrity, "rationale on a non-RAG edge");
    }
    by_source[e.source_id].push_back(&e);
  }
  for (const auto& [source, group] : by_source) {
    if (group.size() > k) {
      fail(ErrorKind::kIntegrity, "source " + source + " has more than k edges");
    }
    std::vector<const MappingEdge*> sorted = group;
    std::sort(sorted.begin(), sorted.end(),
              [](const MappingEdge* a, const MappingEdge* b) { return a->rank < b->rank; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i]->rank != static_cast<int>(i + 1)) {
        fail(ErrorKind::kIntegrity, "source " + source + " ranks are not 1..n");
      }
      if (i > 0 && sorted[i]->score > sorted[i - 1]->score) {
        fail(ErrorKind::kIntegrity, "source " + source + " scores increase with rank");
      }
    }
  }
}

std::string mapping_to_json(const MappingSet& m) {
  nlohmann::ordered_json j;
  j["direction"] = direction_name(m.direction);
  j["model_id"] = m.model_id;
  j["k"] = m.k;
  j["method"] = method_name(m.method);
  auto& edges = j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : m.edges) {
    nlohmann::ordered_json je;
    je["source"] = e.source_id;
    je["target"] = e.target_id;
    je["rank"] = e.rank;
    je["score"] = e.score;
    if (e.rationale) je["rationale"] = *e.rationale;
    edges.push_back(std::move(je));
  }
  return j.dump(2) + "\n";
}

MappingSet mapping_from_json(std::string_view text) {
  MappingSet m;
  try {
    auto j = nlohmann::json::parse(text);
    m.direction = parse_direction(j.at("direction").get<std::string>());
    m.model_id = j.at("model_id").get<std::string>();
    m.k = j.at("k").get<std::size_t>();
    m.method = parse_method(j.at("method").get<std::string>());
    for (const auto& je : j.at("edges")) {
      MappingEdge e;
      e.source_id = je.at("source").get<std::string>();
      e.target_id = je.at("target").get<std::string>();
      e.rank = je.at("rank").get<int>();
      e.score = je.at("score").get<double>();
      e.method = m.method;
      if (je.contains("rationale")) e.rationale = je["rationale"].get<std::string>();
      m.edges.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, std::string("bad mapping JSON: ") + e.what());
  }
  m.validate();
  return m;
}

std::string mapping_to_csv(const MappingSet& m) {
  std::string out = "source,target,rank,score,method,rationale\n";
  char score[32];
  for (const auto& e : m.edges) {
    std::snprintf(score, sizeof score, "%.17g", e.score);
    out += csv::escape(e.source_id) + "," + csv::escape(e.target_id) + "," +
           std::to_string(e.rank) + "," + score + "," + std::string(method_name(e.method)) + "," +
           csv::escape(e.rationale.value_or("")) + "\n";
  }
  return out;
}

}  // namespace attackmap
