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

#include "attackmap/llm_backend.hpp"

#include <json.hpp>

#include "attackmap/error.hpp"
#include "attackmap/http_client.hpp"
#include "attackmap/text.hpp"

namespace attackmap {

std::string_view backend_kind_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::kHttpChat: return "http-chat";
    case BackendKind::kGrammarHttp: return "grammar-http";
    case BackendKind::kScriptedMock: return "scripted-mock";
  }
  return "unknown";
}

BackendKind parse_backend_kind(std::string_view text) {
  if (text == "http-chat") return BackendKind::kHttpChat;
  if (text == "grammar-http") return BackendKind::kGrammarHttp;
  if (text == "scripted-mock") return BackendKind::kScriptedMock;
  fail(ErrorKind::kConfig, "unknown LLM backend kind '" + std::string(text) + "'");
}

void LlmBackendConfig::validate() const {
  if (kind == BackendKind::kGrammarHttp && !supports_grammar) {
    fail(ErrorKind::kConfig, "grammar-http backend must have supports_grammar = true");
  }
  if (kind == BackendKind::kHttpChat && supports_grammar) {
    fail(ErrorKind::kConfig, "http-chat backend cannot take a grammar; use grammar-http");
  }
  if (kind != BackendKind::kScriptedMock && (!endpoint || endpoint->empty())) {
    fail(ErrorKind::kConfig, std::string(backend_kind_name(kind)) + " backend needs an endpoint");
  }
  if (kind == BackendKind::kScriptedMock && mock_script.empty()) {
    fail(ErrorKind::kConfig, "scripted-mock backend needs a mock_script file");
  }
  if (retry.max_attempts < 1) fail(ErrorKind::kConfig, "backend retry.max_attempts must be >= 1");
}

HttpChatBackend::HttpChatBackend(LlmBackendConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::string HttpChatBackend::complete(const LlmRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = request.model.empty() ? config_.model_name : request.model;
  auto& messages = body["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  body["temperature"] = request.temperature;
  if (supports_grammar() && request.grammar) body["grammar"] = *request.grammar;

  auto headers = http::auth_headers(config_.auth_env, ErrorKind::kBackend);
  auto res = http::post_json_with_retry(*config_.endpoint, body.dump(), headers, config_.timeout,
                                        config_.retry, ErrorKind::kBackend,
                                        "chat request to " + *config_.endpoint);
  try {
    return nlohmann::json::parse(res.body).at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kBackend, std::string("unreadable chat response: ") + e.what());
  }
}

ScriptedMockBackend::ScriptedMockBackend(Script script, bool grammar)
    : script_(std::move(script)), grammar_(grammar) {}

ScriptedMockBackend::Policy ScriptedMockBackend::parse_policy(std::string_view text) {
  if (text == "select-all") return Policy::kSelectAll;
  if (text == "select-none") return Policy::kSelectNone;
  if (text == "echo-rank1") return Policy::kEchoRank1;
  if (text == "keyword") return Policy::kKeyword;
  if (text == "hallucinate") return Policy::kHallucinate;
  if (text == "malformed") return Policy::kMalformed;
  fail(ErrorKind::kConfig, "unknown mock policy '" + std::string(text) + "'");
}

ScriptedMockBackend::Script ScriptedMockBackend::parse_script(std::string_view json_text) {
  Script s;
  try {
    auto j = nlohmann::json::parse(json_text);
    for (const auto& [key, value] : j.items()) {
      if (key != "policy" && key != "keywords" && key != "confidence" && key != "responses") {
        fail(ErrorKind::kConfig, "unknown key '" + key + "' in mock script");
      }
    }
    if (j.contains("policy")) s.policy = parse_policy(j["policy"].get<std::string>());
    if (j.contains("keywords")) s.keywords = j["keywords"].get<std::vector<std::string>>();
    if (j.contains("confidence")) s.confidence = j["confidence"].get<std::string>();
    if (j.contains("responses")) {
      for (const auto& [source, list] : j["responses"].items()) {
        for (const auto& r : list) s.responses[source].push_back(r.get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kConfig, std::string("bad mock script: ") + e.what());
  }
  return s;
}

bool ScriptedMockBackend::keyword_match(const std::vector<std::string>& keywords,
                                        std::string_view source_name,
                                        std::string_view candidate_name) {
  std::string s = to_lower_ascii(source_name);
  std::string c = to_lower_ascii(candidate_name);
  for (const auto& kw : keywords) {
    std::string k = to_lower_ascii(kw);
    if (!k.empty() && s.find(k) != std::string::npos && c.find(k) != std::string::npos) return true;
  }
  return false;
}

std::string ScriptedMockBackend::policy_response(const LlmRequest& request) const {
  nlohmann::ordered_json out;
  auto& mappings = out["mappings"] = nlohmann::ordered_json::array();
  auto select = [&](const std::string& id, const std::string& why) {
    nlohmann::ordered_json m;
    m[request.id_key] = id;
    m["confidence"] = script_.confidence;
    m["rationale"] = why;
    mappings.push_back(std::move(m));
  };
  switch (script_.policy) {
    case Policy::kSelectAll:
      for (const auto& c : request.candidates) select(c.id, "scripted: select-all");
      break;
    case Policy::kSelectNone:
      break;
    case Policy::kEchoRank1:
      if (!request.candidates.empty()) select(request.candidates.front().id, "scripted: rank 1");
      break;
    case Policy::kKeyword:
      for (const auto& c : request.candidates) {
        if (keyword_match(script_.keywords, request.source_name, c.name)) {
          select(c.id, "scripted: shared keyword");
        }
      }
      break;
    case Policy::kHallucinate:
      select("T99999", "scripted: invented id");
      break;
    case Policy::kMalformed:
      return "Sure! Here are the mappings: T0814";
  }
  return out.dump();
}

std::string ScriptedMockBackend::complete(const LlmRequest& request) {
  calls_.fetch_add(1);
  std::optional<std::string> canned;
  {
    std::lock_guard lock(mutex_);
    auto it = script_.responses.find(request.source_id);
    if (it != script_.responses.end() && !it->second.empty()) {
      canned = std::move(it->second.front());
      it->second.pop_front();
    }
  }
  if (canned) {
    if (*canned == kTransportError) {
      fail(ErrorKind::kBackend, "scripted transport failure for " + request.source_id);
    }
    return *canned;
  }
  return policy_response(request);
}

std::unique_ptr<LlmBackend> make_backend(const LlmBackendConfig& config, bool offline) {
  config.validate();
  if (config.kind == BackendKind::kScriptedMock) {
    return std::make_unique<ScriptedMockBackend>(
        ScriptedMockBackend::parse_script(read_file(config.mock_script)), config.supports_grammar);
  }
  if (offline) {
    fail(ErrorKind::kConfig, std::string(backend_kind_name(config.kind)) +
                                 " backend needs the network; offline mode allows only scripted-mock");
  }
  return std::make_unique<HttpChatBackend>(config);
}

}  // namespace attackmap
