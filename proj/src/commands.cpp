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

#include "attackmap/commands.hpp"

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>

#include "attackmap/embedding_cache.hpp"
#include "attackmap/embedding_provider.hpp"
#include "attackmap/error.hpp"
#include "attackmap/ground_truth.hpp"
#include "attackmap/report.hpp"
#include "attackmap/sweep.hpp"
#include "attackmap/text.hpp"
#include "attackmap/vector_store.hpp"

namespace attackmap {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

ojson summary(std::string_view command, std::string_view status = "ok") {
  ojson j;
  j["command"] = command;
  j["status"] = status;
  return j;
}

Catalog load_ingested(const PipelineConfig& config) {
  const std::string path = config.paths.catalog_file();
  if (!fs::exists(path)) fail(ErrorKind::kNotFound, "no catalog at " + path + "; run ingest first");
  return load_catalog(read_file(path));
}

std::vector<EmbeddingRecord> load_vectors(const PipelineConfig& config, const std::string& model) {
  return VectorStore(config.paths.store_dir).load(model);
}

std::vector<EmbeddingRecord> select(const std::vector<EmbeddingRecord>& records,
                                    const std::vector<CatalogEntry>& entries,
                                    const std::string& model) {
  std::map<std::string, const EmbeddingRecord*> by_id;
  for (const auto& r : records) by_id[r.entry_id] = &r;
  std::vector<EmbeddingRecord> out;
  for (const auto& e : entries) {
    auto it = by_id.find(e.id);
    if (it == by_id.end()) {
      fail(ErrorKind::kNotFound, "no " + model + " embedding for " + e.id + "; rerun embed");
    }
    out.push_back(*it->second);
  }
  return out;
}

std::string utc_iso(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string mapping_file_stem(const std::string& model_id, std::size_t k, Method method,
                              Direction direction) {
  return "mapping_" + model_id + "_k" + std::to_string(k) + "_" + std::string(method_name(method)) +
         "_" + std::string(direction_name(direction));
}

std::string report_timestamp(const std::string& fallback) {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
    char* end = nullptr;
    long long v = std::strtoll(epoch, &end, 10);
    if (end != nullptr && *end == '\0' && v >= 0) return utc_iso(static_cast<std::time_t>(v));
  }
  return fallback;
}

ojson cmd_ingest(const PipelineConfig& config, std::ostream& out) {
  config.validate();
  ParseOptions options{config.include_deprecated};
  ParseResult capec = parse_capec(read_file(config.paths.capec), config.paths.capec_format, options);
  ParseResult attack = parse_attack_ics(read_file(config.paths.attack), options);
  for (const auto* r : {&capec, &attack}) {
    for (const auto& issue : r->issues) {
      std::cerr << "warning: line " << issue.line << (issue.id.empty() ? "" : " " + issue.id)
                << ": " << issue.message << "\n";
    }
  }
  std::string date = config.snapshot_date.value_or(
      capec.snapshot_date.value_or(attack.snapshot_date.value_or("unknown")));
  Catalog catalog = make_catalog(std::move(capec.entries), std::move(attack.entries), date);
  const std::string path = config.paths.catalog_file();
  write_file_atomic(path, save_catalog(catalog));

  out << catalog.patterns.size() << " attack patterns, " << catalog.techniques.size()
      << " techniques\n";
  ojson s = summary("ingest");
  s["patterns"] = catalog.patterns.size();
  s["techniques"] = catalog.techniques.size();
  s["issues"] = capec.issues.size() + attack.issues.size();
  s["snapshot_date"] = catalog.snapshot_date;
  s["catalog"] = path;
  return s;
}

ojson cmd_embed(const PipelineConfig& config, const std::string& model_id, std::ostream& out) {
  config.validate();
  const ProviderConfig& pc = config.provider(model_id);
  Catalog catalog = load_ingested(config);

  std::vector<DescriptionString> docs;
  for (const auto* list : {&catalog.patterns, &catalog.techniques}) {
    for (const auto& e : *list) docs.push_back(build_description_string(e));
  }
  auto cache = std::make_shared<EmbeddingCache>(config.paths.cache_dir);
  std::shared_ptr<EmbeddingProvider> provider = make_provider(pc, config.offline);
  Embedder embedder(provider, cache);
  std::vector<EmbeddingRecord> records = embedder.embed_documents(docs);
  VectorStore(config.paths.store_dir).store(model_id, pc.dimensionality, records);

  std::size_t truncated = 0;
  for (const auto& r : records) truncated += r.truncated ? 1 : 0;
  out << "embedded " << records.size() << " entries with " << model_id << " (" << truncated
      << " truncated, " << embedder.batches_sent() << " provider batches)\n";
  ojson s = summary("embed");
  s["model"] = model_id;
  s["records"] = records.size();
  s["dim"] = pc.dimensionality;
  s["truncated"] = truncated;
  s["provider_batches"] = embedder.batches_sent();
  return s;
}

ojson cmd_map(const PipelineConfig& config, const std::string& model_id, std::size_t k,
              Method method, Direction direction, std::ostream& out) {
  config.validate();
  if (k < 1) fail(ErrorKind::kInvalidArgument, "k must be >= 1");
  config.provider(model_id);
  Catalog catalog = load_ingested(config);
  auto records = load_vectors(config, model_id);
  auto patterns = select(records, catalog.patterns, model_id);
  auto techniques = select(records, catalog.techniques, model_id);
  const auto& sources = direction == Direction::kCapecToAttack ? patterns : techniques;
  const auto& targets = direction == Direction::kCapecToAttack ? techniques : patterns;

  NeighborTable table = nearest_neighbors(sources, targets, k);
  MappingSet mapping;
  std::vector<RagSourceFailure> failures;
  if (method == Method::kNearestNeighbor) {
    mapping = mapping_from_table(table, k, direction);
  } else {
    if (!config.rag) fail(ErrorKind::kConfig, "rag method requested without a [rag] section");
    auto backend = make_backend(config.rag->backend, config.offline);
    RagConfig rc = *config.rag;
    rc.k = k;
    RagMappingResult result = rag_mapping(table, catalog, direction, rc, *backend);
    mapping = std::move(result.mapping);
    failures = std::move(result.failures);
    for (const auto& f : failures) {
      std::cerr << "warning: RAG skipped " << f.source_id << ": " << f.reason << "\n";
    }
  }

  const std::string stem = mapping_file_stem(model_id, k, method, direction);
  const fs::path dir(config.paths.output_dir);
  write_file_atomic((dir / (stem + ".json")).string(), mapping_to_json(mapping));
  write_file_atomic((dir / (stem + ".csv")).string(), mapping_to_csv(mapping));

  out << mapping.edges.size() << " edges (" << model_id << ", 1-to-" << k << ", "
      << method_name(method) << ", " << direction_name(direction) << ")\n";
  ojson s = summary("map");
  s["model"] = model_id;
  s["k"] = k;
  s["method"] = method_name(method);
  s["direction"] = direction_name(direction);
  s["edges"] = mapping.edges.size();
  s["source_failures"] = failures.size();
  s["output"] = (dir / (stem + ".json")).string();
  return s;
}

ojson cmd_evaluate(const PipelineConfig& config, std::ostream& out) {
  config.validate();
  if (config.paths.ground_truth.empty()) fail(ErrorKind::kConfig, "paths.ground_truth is required");
  Catalog catalog = load_ingested(config);
  GroundTruth gt = load_ground_truth(read_file(config.paths.ground_truth));
  gt.validate_against(catalog);

  std::map<std::string, std::vector<EmbeddingRecord>> embeddings;
  VectorStore store(config.paths.store_dir);
  for (const auto& model : config.sweep.models) {
    if (store.contains(model)) embeddings[model] = store.load(model);
  }

  std::unique_ptr<LlmBackend> backend;
  if (config.rag) backend = make_backend(config.rag->backend, config.offline);

  SweepInputs in;
  in.catalog = &catalog;
  in.embeddings = &embeddings;
  in.ground_truth = &gt;
  in.axes = config.sweep;
  if (config.rag) in.rag = *config.rag;
  in.backend = backend.get();
  in.generated_at = report_timestamp(catalog.snapshot_date);
  SweepResult result = sweep(in);

  const fs::path dir(config.paths.output_dir);
  for (const auto& m : result.mappings) {
    const std::string stem = mapping_file_stem(m.model_id, m.k, m.method, m.direction);
    write_file_atomic((dir / "mappings" / (stem + ".json")).string(), mapping_to_json(m));
  }
  const std::string report_json = report_to_json(result.report);
  write_file_atomic((dir / "report.json").string(), report_json);
  if (!result.report.rows.empty()) {
    write_file_atomic((dir / "report.md").string(),
                      render_report(result.report, ReportFormat::kMarkdown));
    write_file_atomic((dir / "report.csv").string(), render_report(result.report, ReportFormat::kCsv));
  }
  for (const auto& s : result.report.skipped) {
    std::cerr << "error: cell " << s.model_id << " k=" << s.k << " " << method_name(s.method) << " "
              << direction_name(s.direction) << " skipped: " << s.reason << "\n";
  }

  const bool ok = result.report.skipped.empty();
  out << result.report.rows.size() << " cells evaluated, " << result.report.skipped.size()
      << " skipped\n";
  ojson s = summary("evaluate", ok ? "ok" : "failed");
  s["rows"] = result.report.rows.size();
  s["skipped"] = result.report.skipped.size();
  s["source_failures"] = result.report.source_failures.size();
  s["ground_truth_digest"] = result.report.ground_truth_digest;
  s["report_digest"] = hex64(fnv1a64(report_json));
  s["report"] = (dir / "report.md").string();
  return s;
}

ojson cmd_report(const PipelineConfig& config, std::ostream& out) {
  const fs::path dir(config.paths.output_dir);
  const std::string report_json = read_file((dir / "report.json").string());
  EvaluationReport report = report_from_json(report_json);
  write_file_atomic((dir / "report.md").string(), render_report(report, ReportFormat::kMarkdown));
  write_file_atomic((dir / "report.csv").string(), render_report(report, ReportFormat::kCsv));
  out << "rendered " << report.rows.size() << " rows to " << (dir / "report.md").string() << "\n";
  ojson s = summary("report");
  s["rows"] = report.rows.size();
  s["report_digest"] = hex64(fnv1a64(report_json));
  return s;
}

}  // namespace attackmap
