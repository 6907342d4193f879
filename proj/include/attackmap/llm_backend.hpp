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

#include <atomic>
#include <chrono>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "attackmap/embedding.hpp"

namespace attackmap {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct CandidateInfo {
  std::string id;
  std::string name;
};

struct LlmRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::optional<std::string> grammar;  // GBNF, only for grammar-capable backends

  // Structured view of the prompt for scripted backends; never sent over HTTP.
  std::string source_id;
  std::string source_name;
  std::vector<CandidateInfo> candidates;
  std::string id_key;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual bool supports_grammar() const = 0;
  // Returns the raw completion text. Transport failures raise Error(kBackend).
  // Must be callable from several threads.
  virtual std::string complete(const LlmRequest& request) = 0;
};

enum class BackendKind { kHttpChat, kGrammarHttp, kScriptedMock };

std::string_view backend_kind_name(BackendKind kind);
BackendKind parse_backend_kind(std::string_view text);

struct LlmBackendConfig {
  BackendKind kind = BackendKind::kScriptedMock;
  std::optional<std::string> endpoint;
  std::string model_name = "llama-3-8b-instruct";
  std::string auth_env;
  bool supports_grammar = false;
  std::string mock_script;  // ScriptedMock: fixture file path
  RetryPolicy retry;
  std::chrono::seconds timeout{120};

  void validate() const;
};

// HttpChat:    POST {"model","messages":[{"role","content"}],"temperature"} -> {"content"}
// GrammarHttp: same request plus {"grammar": "<GBNF>"}
class HttpChatBackend final : public LlmBackend {
 public:
  explicit HttpChatBackend(LlmBackendConfig config);
  bool supports_grammar() const override { return config_.kind == BackendKind::kGrammarHttp; }
  std::string complete(const LlmRequest& request) override;

 private:
  LlmBackendConfig config_;
};

// Deterministic stand-in for a chat model. Canned responses for a source are
// served first, in order; once they run out the fallback policy answers.
// The canned text "<<transport-error>>" simulates a transport failure.
class ScriptedMockBackend final : public LlmBackend {
 public:
  enum class Policy {
    kSelectAll,
    kSelectNone,
    kEchoRank1,
    kKeyword,      // candidates whose name shares a listed keyword with the source name
    kHallucinate,  // always names an id outside the candidate set
    kMalformed,    // always returns text that is not JSON
  };

  struct Script {
    Policy policy = Policy::kSelectAll;
    std::vector<std::string> keywords;
    std::string confidence = "high";
    std::map<std::string, std::deque<std::string>> responses;
  };

  static constexpr std::string_view kTransportError = "<<transport-error>>";

  explicit ScriptedMockBackend(Script script, bool grammar = false);

  // {"policy": "...", "keywords": [..], "confidence": "...",
  //  "responses": {"<source id>": ["...", ...]}}
  static Script parse_script(std::string_view json_text);
  static Policy parse_policy(std::string_view text);

  bool supports_grammar() const override { return grammar_; }
  std::string complete(const LlmRequest& request) override;

  std::size_t calls() const { return calls_.load(); }
  // The keyword rule on its own, for oracles and fixtures.
  static bool keyword_match(const std::vector<std::string>& keywords, std::string_view source_name,
                            std::string_view candidate_name);

 private:
  std::string policy_response(const LlmRequest& request) const;

  Script script_;
  bool grammar_;
  std::mutex mutex_;
  std::atomic<std::size_t> calls_{0};
};

std::unique_ptr<LlmBackend> make_backend(const LlmBackendConfig& config, bool offline);

}  // namespace attackmap
