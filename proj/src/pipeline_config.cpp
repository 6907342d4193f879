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

#include "attackmap/pipeline_config.hpp"

#include <algorithm>

#include "attackmap/error.hpp"
#include "attackmap/text.hpp"
#include "attackmap/toml_lite.hpp"

namespace attackmap {

namespace {

using json = nlohmann::ordered_json;

void allow_keys(const json& table, std::string_view where, std::initializer_list<std::string_view> keys) {
  if (!table.is_object()) fail(ErrorKind::kConfig, std::string(where) + " must be a table");
  for (const auto& [key, value] : table.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      fail(ErrorKind::kConfig, "unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
T get(const json& table, std::string_view where, const char* key) {
  try {
    return table.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::kConfig, std::string(where) + "." + key + " is missing or has the wrong type");
  }
}

template <typename T>
std::optional<T> get_opt(const json& table, std::string_view where, const char* key) {
  if (!table.contains(key)) return std::nullopt;
  return get<T>(table, where, key);
}

std::size_t get_positive(const json& table, std::string_view where, const char* key,
                         std::size_t fallback) {
  auto v = get_opt<std::int64_t>(table, where, key);
  if (!v) return fallback;
  if (*v < 1) fail(ErrorKind::kConfig, std::string(where) + "." + key + " must be >= 1");
  return static_cast<std::size_t>(*v);
}

std::string resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal().string();
}

RetryPolicy read_retry(const json& t, std::string_view where, RetryPolicy r) {
  if (auto v = get_opt<std::int64_t>(t, where, "max_attempts")) r.max_attempts = static_cast<int>(*v);
  if (auto v = get_opt<std::int64_t>(t, where, "retry_base_delay_ms")) {
    if (*v < 0) fail(ErrorKind::kConfig, std::string(where) + ".retry_base_delay_ms must be >= 0");
    r.base_delay = std::chrono::milliseconds(*v);
  }
  return r;
}

ProviderConfig read_provider(const json& t, std::size_t index, bool& explicit_seed) {
  const std::string where = "providers[" + std::to_string(index) + "]";
  allow_keys(t, where,
             {"model_id", "kind", "dimensionality", "endpoint", "max_input_chars", "batch_size",
              "auth_env", "api_shape", "seed", "max_in_flight", "max_attempts",
              "retry_base_delay_ms", "timeout_s"});
  ProviderConfig c = default_provider_config(get<std::string>(t, where, "model_id"));
  if (auto kind = get_opt<std::string>(t, where, "kind")) {
    if (*kind == "hash-test") c.kind = ProviderKind::kHashTest;
    else if (*kind == "remote") c.kind = ProviderKind::kRemote;
    else fail(ErrorKind::kConfig, where + ".kind must be 'hash-test' or 'remote'");
  }
  c.dimensionality = get_positive(t, where, "dimensionality", c.dimensionality);
  c.endpoint = get_opt<std::string>(t, where, "endpoint");
  c.max_input_chars = get_positive(t, where, "max_input_chars", c.max_input_chars);
  c.batch_size = get_positive(t, where, "batch_size", c.batch_size);
  c.auth_env = get_opt<std::string>(t, where, "auth_env").value_or("");
  if (auto shape = get_opt<std::string>(t, where, "api_shape")) {
    if (*shape == "neutral") c.api_shape = ApiShape::kNeutral;
    else if (*shape == "openai") c.api_shape = ApiShape::kOpenAI;
    else fail(ErrorKind::kConfig, where + ".api_shape must be 'neutral' or 'openai'");
  }
  explicit_seed = t.contains("seed");
  if (explicit_seed) c.seed = get<std::uint64_t>(t, where, "seed");
  c.max_in_flight = get_positive(t, where, "max_in_flight", c.max_in_flight);
  c.retry = read_retry(t, where, c.retry);
  c.timeout = std::chrono::seconds(get_positive(t, where, "timeout_s", c.timeout.count()));
  validate_provider_config(c);
  return c;
}

RagConfig read_rag(const json& t, const std::filesystem::path& base) {
  allow_keys(t, "rag",
             {"max_retries", "temperature", "deterministic", "prompt_template", "max_in_flight",
              "backend"});
  RagConfig r;
  if (auto v = get_opt<std::int64_t>(t, "rag", "max_retries")) r.max_retries = static_cast<int>(*v);
  if (auto v = get_opt<double>(t, "rag", "temperature")) r.temperature = *v;
  if (auto v = get_opt<bool>(t, "rag", "deterministic")) r.deterministic = *v;
  if (auto v = get_opt<std::string>(t, "rag", "prompt_template")) r.prompt_template_id = *v;
  r.max_in_flight = get_positive(t, "rag", "max_in_flight", r.max_in_flight);
  if (!t.contains("backend")) fail(ErrorKind::kConfig, "[rag.backend] is required");
  const json& b = t["backend"];
  allow_keys(b, "rag.backend",
             {"kind", "endpoint", "model_name", "auth_env", "supports_grammar", "mock_script",
              "max_attempts", "retry_base_delay_ms", "timeout_s"});
  LlmBackendConfig& bc = r.backend;
  bc.kind = parse_backend_kind(get<std::string>(b, "rag.backend", "kind"));
  bc.endpoint = get_opt<std::string>(b, "rag.backend", "endpoint");
  if (auto v = get_opt<std::string>(b, "rag.backend", "model_name")) bc.model_name = *v;
  bc.auth_env = get_opt<std::string>(b, "rag.backend", "auth_env").value_or("");
  bc.supports_grammar = get_opt<bool>(b, "rag.backend", "supports_grammar")
                            .value_or(bc.kind == BackendKind::kGrammarHttp);
  bc.mock_script = resolve(base, get_opt<std::string>(b, "rag.backend", "mock_script").value_or(""));
  bc.retry = read_retry(b, "rag.backend", bc.retry);
  bc.timeout = std::chrono::seconds(get_positive(b, "rag.backend", "timeout_s", bc.timeout.count()));
  r.validate();
  return r;
}

}  // namespace

std::string PipelinePaths::catalog_file() const {
  return (std::filesystem::path(store_dir) / "catalog.jsonl").string();
}

const ProviderConfig& PipelineConfig::provider(std::string_view model_id) const {
  for (const auto& p : providers) {
    if (p.model_id == model_id) return p;
  }
  fail(ErrorKind::kConfig, "no [[providers]] entry for model '" + std::string(model_id) + "'");
}

void PipelineConfig::apply_seed(std::uint64_t s) {
  seed = s;
  for (std::size_t i = 0; i < providers.size(); ++i) {
    if (!explicit_seed_providers.contains(i)) providers[i].seed = s;
  }
}

void PipelineConfig::validate() const {
  if (paths.capec.empty() || paths.attack.empty()) {
    fail(ErrorKind::kConfig, "paths.capec and paths.attack are required");
  }
  if (paths.store_dir.empty() || paths.output_dir.empty()) {
    fail(ErrorKind::kConfig, "paths.store_dir and paths.output_dir are required");
  }
  sweep.validate();
  std::set<std::string> seen;
  for (const auto& p : providers) {
    validate_provider_config(p);
    if (!seen.insert(p.model_id).second) {
      fail(ErrorKind::kConfig, "model '" + p.model_id + "' configured twice");
    }
  }
  for (const auto& m : sweep.models) provider(m);
  if (std::find(sweep.methods.begin(), sweep.methods.end(), Method::kRag) != sweep.methods.end() &&
      !rag) {
    fail(ErrorKind::kConfig, "sweep.methods includes rag but there is no [rag] section");
  }
  if (rag) rag->validate();
  if (offline) {
    for (const auto& p : providers) {
      if (p.kind != ProviderKind::kHashTest) {
        fail(ErrorKind::kConfig, "offline mode forbids remote provider '" + p.model_id + "'");
      }
    }
    if (rag && rag->backend.kind != BackendKind::kScriptedMock) {
      fail(ErrorKind::kConfig, "offline mode allows only the scripted-mock LLM backend");
    }
  }
}

PipelineConfig parse_pipeline_config(std::string_view toml_text,
                                     const std::filesystem::path& base_dir) {
  const json root = toml::parse(toml_text);
  allow_keys(root, "config",
             {"seed", "offline", "paths", "catalog", "providers", "rag", "sweep"});
  PipelineConfig c;

  if (!root.contains("paths")) fail(ErrorKind::kConfig, "[paths] is required");
  const json& p = root["paths"];
  allow_keys(p, "paths",
             {"capec", "capec_format", "attack", "ground_truth", "store_dir", "cache_dir",
              "output_dir"});
  c.paths.capec = resolve(base_dir, get<std::string>(p, "paths", "capec"));
  if (auto f = get_opt<std::string>(p, "paths", "capec_format")) {
    if (*f == "xml") c.paths.capec_format = CapecFormat::kXmlCatalog;
    else if (*f == "csv") c.paths.capec_format = CapecFormat::kCsv;
    else fail(ErrorKind::kConfig, "paths.capec_format must be 'xml' or 'csv'");
  }
  c.paths.attack = resolve(base_dir, get<std::string>(p, "paths", "attack"));
  c.paths.ground_truth = resolve(base_dir, get_opt<std::string>(p, "paths", "ground_truth").value_or(""));
  c.paths.store_dir = resolve(base_dir, get<std::string>(p, "paths", "store_dir"));
  c.paths.cache_dir = resolve(base_dir, get_opt<std::string>(p, "paths", "cache_dir").value_or(""));
  c.paths.output_dir = resolve(base_dir, get<std::string>(p, "paths", "output_dir"));

  if (root.contains("catalog")) {
    const json& t = root["catalog"];
    allow_keys(t, "catalog", {"include_deprecated", "snapshot_date"});
    c.include_deprecated = get_opt<bool>(t, "catalog", "include_deprecated").value_or(false);
    c.snapshot_date = get_opt<std::string>(t, "catalog", "snapshot_date");
  }

  if (root.contains("providers")) {
    const json& list = root["providers"];
    if (!list.is_array()) fail(ErrorKind::kConfig, "providers must be an array of tables");
    for (std::size_t i = 0; i < list.size(); ++i) {
      bool explicit_seed = false;
      c.providers.push_back(read_provider(list[i], i, explicit_seed));
      if (explicit_seed) c.explicit_seed_providers.insert(i);
    }
  }

  if (root.contains("rag")) c.rag = read_rag(root["rag"], base_dir);

  if (!root.contains("sweep")) fail(ErrorKind::kConfig, "[sweep] is required");
  const json& s = root["sweep"];
  allow_keys(s, "sweep", {"models", "ks", "methods", "directions"});
  c.sweep.models = get<std::vector<std::string>>(s, "sweep", "models");
  for (auto k : get<std::vector<std::int64_t>>(s, "sweep", "ks")) {
    if (k < 1) fail(ErrorKind::kConfig, "sweep.ks entries must be >= 1");
    c.sweep.ks.push_back(static_cast<std::size_t>(k));
  }
  try {
    for (const auto& m : get<std::vector<std::string>>(s, "sweep", "methods")) {
      c.sweep.methods.push_back(parse_method(m));
    }
    for (const auto& d : get<std::vector<std::string>>(s, "sweep", "directions")) {
      c.sweep.directions.push_back(parse_direction(d));
    }
  } catch (const Error& e) {
    fail(ErrorKind::kConfig, e.what());
  }

  c.offline = get_opt<bool>(root, "config", "offline").value_or(false);
  c.apply_seed(get_opt<std::uint64_t>(root, "config", "seed").value_or(0));
  c.validate();
  return c;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  const std::string text = read_file(path);
  auto base = std::filesystem::absolute(path).parent_path();
  return parse_pipeline_config(text, base);
}

}  // namespace attackmap
