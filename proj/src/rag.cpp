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

#include "attackmap/rag.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "attackmap/error.hpp"
#include "attackmap/grammar.hpp"
#include "attackmap/text.hpp"

namespace attackmap {

namespace {

constexpr std::string_view kSystemPromptV1 =
    "You are a cyber threat intelligence analyst who aligns entries of the MITRE CAPEC "
    "attack pattern catalog with techniques of the MITRE ATT&CK for ICS matrix. You answer "
    "only with JSON that follows the schema you are given.";

std::string_view source_label(Direction d) {
  return d == Direction::kCapecToAttack ? "CAPEC attack pattern" : "ATT&CK ICS technique";
}

std::string_view candidate_label(Direction d) {
  return d == Direction::kCapecToAttack ? "ATT&CK ICS techniques" : "CAPEC attack patterns";
}

const std::vector<std::string>& confidence_levels() {
  static const std::vector<std::string> kLevels = {"high", "medium", "low"};
  return kLevels;
}

}  // namespace

void RagConfig::validate() const {
  if (k < 1) fail(ErrorKind::kConfig, "rag.k must be >= 1");
  if (max_retries < 0) fail(ErrorKind::kConfig, "rag.max_retries must be >= 0");
  if (temperature < 0) fail(ErrorKind::kConfig, "rag.temperature must be >= 0");
  if (deterministic && temperature != 0.0) {
    fail(ErrorKind::kConfig, "deterministic RAG runs require temperature = 0");
  }
  if (max_in_flight < 1) fail(ErrorKind::kConfig, "rag.max_in_flight must be >= 1");
  system_prompt(prompt_template_id);
  backend.validate();
}

std::string_view selection_id_key(Direction direction) {
  return direction == Direction::kCapecToAttack ? "technique_id" : "capec_id";
}

nlohmann::ordered_json selection_schema(std::span<const std::string> candidate_ids, std::size_t k,
                                        Direction direction) {
  using oj = nlohmann::ordered_json;
  oj item;
  item["type"] = "object";
  oj props;
  props[std::string(selection_id_key(direction))] = {{"type", "string"},
                                                     {"enum", oj(candidate_ids)}};
  props["confidence"] = {{"type", "string"}, {"enum", oj(confidence_levels())}};
  props["rationale"] = {{"type", "string"}, {"maxLength", kMaxRationaleChars}};
  item["properties"] = std::move(props);
  item["required"] = {std::string(selection_id_key(direction)), "confidence", "rationale"};
  item["additionalProperties"] = false;

  oj schema;
  schema["type"] = "object";
  schema["properties"]["mappings"] = {{"type", "array"}, {"maxItems", k}, {"items", item}};
  schema["required"] = {"mappings"};
  schema["additionalProperties"] = false;
  return schema;
}

std::string_view system_prompt(std::string_view template_id) {
  if (template_id == "select-v1") return kSystemPromptV1;
  fail(ErrorKind::kInvalidArgument, "unknown prompt template '" + std::string(template_id) + "'");
}

std::string build_prompt(const CatalogEntry& source, std::span<const RagCandidate> candidates,
                         Direction direction, std::size_t k, std::string_view template_id) {
  system_prompt(template_id);
  if (candidates.empty()) fail(ErrorKind::kInvalidArgument, "RAG prompt needs at least one candidate");
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].rank <= candidates[i - 1].rank) {
      fail(ErrorKind::kInvalidArgument, "RAG candidates must be sorted by rank");
    }
  }
  std::vector<std::string> ids;
  for (const auto& c : candidates) ids.push_back(c.entry->id);
  const std::string key(selection_id_key(direction));

  std::string p;
  p += "Decide which of the candidate ";
  p += candidate_label(direction);
  p += " describe the same adversarial behavior as the source ";
  p += source_label(direction);
  p += ".\n\n## Source ";
  p += source_label(direction);
  p += "\n\n";
  p += build_description_string(source).text;
  p += "\n\n## Candidate ";
  p += candidate_label(direction);
  p += " (ranked by embedding similarity, rank 1 is closest)\n";
  for (const auto& c : candidates) {
    p += "\n### Rank " + std::to_string(c.rank) + ": " + c.entry->id + "\n";
    p += build_description_string(*c.entry).text;
    p += "\n";
  }
  p += "\n## Instructions\n\n";
  p += "- Select a candidate only if it describes the same adversarial behavior as the source, "
       "not merely a related topic.\n";
  p += "- The ranking is a retrieval hint. Judge every candidate on its description.\n";
  p += "- Selecting none of the candidates is a valid answer.\n";
  p += "- Use only the ids listed above in the \"" + key + "\" field, each at most once.\n";
  p += "- Give a confidence of high, medium or low and a rationale of at most " +
       std::to_string(kMaxRationaleChars) + " characters for every selection.\n";
  p += "\nRespond with one JSON object and nothing else. It must validate against this JSON "
       "schema:\n";
  p += selection_schema(ids, k, direction).dump();
  p += "\n";
  return p;
}

std::vector<Selection> validate_output(std::string_view text, const std::set<std::string>& candidates,
                                       std::size_t k, Direction direction) {
  const std::string key(selection_id_key(direction));
  auto malformed = [](const std::string& why) { fail(ErrorKind::kMalformedOutput, why); };

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    malformed(std::string("output is not JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.size() != 1 || !doc.contains("mappings")) {
    malformed("output must be an object with exactly the key \"mappings\"");
  }
  const auto& list = doc["mappings"];
  if (!list.is_array()) malformed("\"mappings\" must be an array");

  std::vector<Selection> out;
  for (const auto& item : list) {
    if (!item.is_object() || item.size() != 3 || !item.contains(key) ||
        !item.contains("confidence") || !item.contains("rationale")) {
      malformed("each mapping must have exactly the keys " + key + ", confidence, rationale");
    }
    if (!item[key].is_string() || !item["confidence"].is_string() || !item["rationale"].is_string()) {
      malformed("mapping fields must be strings");
    }
    Selection s{item[key].get<std::string>(), item["confidence"].get<std::string>(),
                item["rationale"].get<std::string>()};
    const auto& levels = confidence_levels();
    if (std::find(levels.begin(), levels.end(), s.confidence) == levels.end()) {
      malformed("confidence '" + s.confidence + "' is not high, medium or low");
    }
    if (utf8_length(s.rationale) > kMaxRationaleChars) malformed("rationale exceeds 500 characters");
    out.push_back(std::move(s));
  }
  if (out.size() > k) {
    malformed(std::to_string(out.size()) + " selections exceed k = " + std::to_string(k));
  }
  std::set<std::string> seen;
  for (const auto& s : out) {
    if (!candidates.contains(s.target_id)) {
      fail(ErrorKind::kHallucination, "selected id " + s.target_id + " is not a candidate");
    }
  }
  for (const auto& s : out) {
    if (!seen.insert(s.target_id).second) {
      fail(ErrorKind::kDuplication, "id " + s.target_id + " selected more than once");
    }
  }
  return out;
}

RagDecision rag_refine(const CatalogEntry& source, std::span<const RagCandidate> candidates,
                       Direction direction, const RagConfig& config, LlmBackend& backend) {
  if (candidates.empty()) fail(ErrorKind::kInvalidArgument, "rag_refine needs candidates");
  LlmRequest request;
  request.model = config.backend.model_name;
  request.temperature = config.temperature;
  request.messages = {
      {"system", std::string(system_prompt(config.prompt_template_id))},
      {"user", build_prompt(source, candidates, direction, config.k, config.prompt_template_id)}};
  request.source_id = source.id;
  request.source_name = source.name;
  request.id_key = selection_id_key(direction);

  std::set<std::string> ids;
  std::vector<std::string> id_list;
  for (const auto& c : candidates) {
    ids.insert(c.entry->id);
    id_list.push_back(c.entry->id);
    request.candidates.push_back({c.entry->id, c.entry->name});
  }
  if (backend.supports_grammar()) {
    request.grammar = grammar::schema_to_grammar(selection_schema(id_list, config.k, direction)).to_gbnf();
  }

  RagDecision decision;
  decision.source_id = source.id;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    decision.attempts = attempt + 1;
    decision.raw_response = backend.complete(request);
    try {
      decision.selections = validate_output(decision.raw_response, ids, config.k, direction);
      decision.failed = false;
      decision.failure_reason.clear();
      return decision;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kMalformedOutput && e.kind() != ErrorKind::kHallucination &&
          e.kind() != ErrorKind::kDuplication) {
        throw;
      }
      decision.failed = true;
      decision.failure_reason = std::string(error_kind_name(e.kind())) + ": " + e.what();
    }
  }
  decision.selections.clear();
  return decision;
}

RagMappingResult rag_mapping(const NeighborTable& table, const Catalog& catalog,
                             Direction direction, const RagConfig& config, LlmBackend& backend) {
  config.validate();
  const std::size_t n = table.source_ids.size();
  std::vector<std::optional<RagDecision>> decisions(n);
  std::vector<std::string> errors(n);

  auto process = [&](std::size_t s) {
    const CatalogEntry* source = catalog.find(table.source_ids[s]);
    if (source == nullptr) {
      errors[s] = "source " + table.source_ids[s] + " missing from catalog";
      return;
    }
    std::vector<RagCandidate> candidates;
    const auto& row = table.neighbors[s];
    for (std::size_t r = 0; r < std::min(config.k, row.size()); ++r) {
      const CatalogEntry* target = catalog.find(row[r].entry_id);
      if (target == nullptr) {
        errors[s] = "candidate " + row[r].entry_id + " missing from catalog";
        return;
      }
      candidates.push_back({target, row[r].score, static_cast<int>(r + 1)});
    }
    try {
      decisions[s] = rag_refine(*source, candidates, direction, config, backend);
    } catch (const Error& e) {
      errors[s] = std::string(error_kind_name(e.kind())) + ": " + e.what();
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t s = next.fetch_add(1); s < n; s = next.fetch_add(1)) process(s);
  };
  std::size_t n_threads = std::min(config.max_in_flight, n);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  }

  RagMappingResult result;
  result.mapping.direction = direction;
  result.mapping.model_id = table.model_id;
  result.mapping.k = config.k;
  result.mapping.method = Method::kRag;
  for (std::size_t s = 0; s < n; ++s) {
    if (!decisions[s]) {
      result.failures.push_back({table.source_ids[s], errors[s]});
      continue;
    }
    const RagDecision& d = *decisions[s];
    const auto& row = table.neighbors[s];
    int rank = 0;
    for (std::size_t r = 0; r < std::min(config.k, row.size()); ++r) {
      auto it = std::find_if(d.selections.begin(), d.selections.end(),
                             [&](const Selection& sel) { return sel.target_id == row[r].entry_id; });
      if (it == d.selections.end()) continue;
      result.mapping.edges.push_back({table.source_ids[s], row[r].entry_id, ++rank, row[r].score,
                                      Method::kRag, it->rationale});
    }
    result.decisions.push_back(d);
  }
  return result;
}

RagMappingResult rag_mapping(std::span<const EmbeddingRecord> sources,
                             std::span<const EmbeddingRecord> targets, const Catalog& catalog,
                             Direction direction, const RagConfig& config, LlmBackend& backend) {
  return rag_mapping(nearest_neighbors(sources, targets, config.k), catalog, direction, config,
                     backend);
}

}  // namespace attackmap
