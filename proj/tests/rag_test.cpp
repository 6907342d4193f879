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

#include <atomic>
#include <cctype>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "attackmap/error.hpp"
#include "attackmap/grammar.hpp"
#include "attackmap/rag.hpp"
#include "mini_fixture.hpp"
#include "test_server.hpp"

namespace attackmap {
namespace {

using Policy = ScriptedMockBackend::Policy;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no attackmap::Error thrown";
  return ErrorKind::kIo;
}

const std::set<std::string> kCandidates = {"T0814", "T0813", "T0830"};

std::string item(const std::string& id, const std::string& conf = "high", const std::string& why = "r") {
  return R"({"technique_id":")" + id + R"(","confidence":")" + conf + R"(","rationale":")" + why + "\"}";
}

TEST(ValidateOutput, AcceptsValidSelections) {
  auto s = validate_output(R"({"mappings":[)" + item("T0814") + "," + item("T0830", "low", "x") + "]}",
                           kCandidates, 3, Direction::kCapecToAttack);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], (Selection{"T0814", "high", "r"}));
  EXPECT_EQ(s[1].confidence, "low");
  EXPECT_TRUE(validate_output(R"({"mappings":[]})", kCandidates, 3, Direction::kCapecToAttack).empty());
  // The validator is lenient about layout and key order.
  auto loose = validate_output(
      "{ \"mappings\" : [ {\"rationale\":\"r\", \"confidence\":\"medium\", \"technique_id\":\"T0813\"} ] }",
      kCandidates, 3, Direction::kCapecToAttack);
  EXPECT_EQ(loose.size(), 1u);
}

TEST(ValidateOutput, ErrorKinds) {
  auto check = [](const std::string& text, std::size_t k = 3) {
    return kind_of([&] { validate_output(text, kCandidates, k, Direction::kCapecToAttack); });
  };
  EXPECT_EQ(check("not json"), ErrorKind::kMalformedOutput);
  EXPECT_EQ(check("{}"), ErrorKind::kMalformedOutput);
  EXPECT_EQ(check(R"({"mappings":{}})"), ErrorKind::kMalformedOutput);
  EXPECT_EQ(check(R"({"mappings":[],"extra":1})"), ErrorKind::kMalformedOutput);
  EXPECT_EQ(check(R"({"mappings":[{"technique_id":"T0814","confidence":"high"}]})"),
            ErrorKind::kMalformedOutput);
  EXPECT_EQ(check(R"({"mappings":[)" + item("T0814", "certain") + "]}"), ErrorKind::kMalformedOutput);
  EXPECT_EQ(check(R"({"mappings":[)" + item("T0814", "high", std::string(501, 'x')) + "]}"),
            ErrorKind::kMalformedOutput);
  EXPECT_EQ(check(R"({"mappings":[)" + item("T0814") + "," + item("T0813") + "]}", 1),
            ErrorKind::kMalformedOutput);
  EXPECT_EQ(check(R"({"mappings":[{"capec_id":"T0814","confidence":"high","rationale":"r"}]})"),
            ErrorKind::kMalformedOutput);
  EXPECT_EQ(check(R"({"mappings":[)" + item("T9999") + "]}"), ErrorKind::kHallucination);
  EXPECT_EQ(check(R"({"mappings":[)" + item("T0814") + "," + item("T0814") + "]}"),
            ErrorKind::kDuplication);
}

struct MiniRag : ::testing::Test {
  static void SetUpTestSuite() { mini = new fixtures::Mini(fixtures::load_mini()); }
  static void TearDownTestSuite() { delete mini; }
  static fixtures::Mini* mini;

  static RagConfig config(std::size_t k) {
    RagConfig c;
    c.k = k;
    c.backend.kind = BackendKind::kScriptedMock;
    c.backend.mock_script = mini->mock_script;
    return c;
  }
  static std::vector<RagCandidate> candidates(const std::vector<std::string>& ids) {
    std::vector<RagCandidate> out;
    int rank = 0;
    for (const auto& id : ids) out.push_back({mini->catalog.find(id), 0.5, ++rank});
    return out;
  }
};
fixtures::Mini* MiniRag::mini = nullptr;

TEST_F(MiniRag, PromptIsDeterministicAndComplete) {
  const CatalogEntry& src = *mini->catalog.find("CAPEC-125");
  auto cands = candidates({"T0814", "T0813"});
  auto p1 = build_prompt(src, cands, Direction::kCapecToAttack, 2);
  auto p2 = build_prompt(src, cands, Direction::kCapecToAttack, 2);
  EXPECT_EQ(p1, p2);
  EXPECT_NE(p1.find(build_description_string(src).text), std::string::npos);
  EXPECT_LT(p1.find("T0814"), p1.find("T0813"));
  EXPECT_NE(p1.find("technique_id"), std::string::npos);
  EXPECT_THROW(build_prompt(src, {}, Direction::kCapecToAttack, 2), Error);
  EXPECT_THROW(build_prompt(src, cands, Direction::kCapecToAttack, 2, "v0"), Error);
}

TEST_F(MiniRag, RetriesUntilValid) {
  ScriptedMockBackend::Script script;
  script.policy = Policy::kEchoRank1;
  script.responses["CAPEC-125"] = {"garbage", R"({"mappings":[)" + item("T9999") + "]}"};
  ScriptedMockBackend backend(script);
  auto d = rag_refine(*mini->catalog.find("CAPEC-125"), candidates({"T0814", "T0813"}),
                      Direction::kCapecToAttack, config(2), backend);
  EXPECT_EQ(d.attempts, 3);
  EXPECT_FALSE(d.failed);
  ASSERT_EQ(d.selections.size(), 1u);
  EXPECT_EQ(d.selections[0].target_id, "T0814");
}

TEST_F(MiniRag, HallucinationExhaustsIntoEmptyFailure) {
  ScriptedMockBackend::Script script;
  script.policy = Policy::kHallucinate;
  ScriptedMockBackend backend(script);
  auto cfg = config(2);
  cfg.max_retries = 3;
  auto d = rag_refine(*mini->catalog.find("CAPEC-125"), candidates({"T0814", "T0813"}),
                      Direction::kCapecToAttack, cfg, backend);
  EXPECT_EQ(d.attempts, 4);
  EXPECT_EQ(backend.calls(), 4u);
  EXPECT_TRUE(d.failed);
  EXPECT_TRUE(d.selections.empty());
  EXPECT_NE(d.failure_reason.find("hallucination"), std::string::npos) << d.failure_reason;
}

TEST_F(MiniRag, TransportErrorsPropagate) {
  ScriptedMockBackend::Script script;
  script.responses["CAPEC-125"] = {std::string(ScriptedMockBackend::kTransportError)};
  ScriptedMockBackend backend(script);
  EXPECT_EQ(kind_of([&] {
              rag_refine(*mini->catalog.find("CAPEC-125"), candidates({"T0814"}),
                         Direction::kCapecToAttack, config(1), backend);
            }),
            ErrorKind::kBackend);
}

std::set<std::pair<std::string, std::string>> pairs(const MappingSet& m) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& e : m.edges) out.emplace(e.source_id, e.target_id);
  return out;
}

TEST_F(MiniRag, SelectAllEqualsNearestNeighbours) {
  for (Direction d : {Direction::kCapecToAttack, Direction::kAttackToCapec}) {
    for (std::size_t k = 1; k <= 5; ++k) {
      ScriptedMockBackend backend({Policy::kSelectAll, {}, "high", {}});
      auto rag = rag_mapping(mini->sources(d), mini->targets(d), mini->catalog, d, config(k), backend);
      auto nn = nn_mapping(mini->sources(d), mini->targets(d), k, d);
      ASSERT_EQ(rag.mapping.edges.size(), nn.edges.size());
      for (std::size_t i = 0; i < nn.edges.size(); ++i) {
        EXPECT_EQ(rag.mapping.edges[i].source_id, nn.edges[i].source_id);
        EXPECT_EQ(rag.mapping.edges[i].target_id, nn.edges[i].target_id);
        EXPECT_EQ(rag.mapping.edges[i].rank, nn.edges[i].rank);
        EXPECT_EQ(rag.mapping.edges[i].score, nn.edges[i].score);
        EXPECT_EQ(rag.mapping.edges[i].method, Method::kRag);
        EXPECT_TRUE(rag.mapping.edges[i].rationale.has_value());
      }
      EXPECT_EQ(rag.mapping.method, Method::kRag);
      EXPECT_EQ(rag.mapping.k, k);
      EXPECT_NO_THROW(rag.mapping.validate());
    }
  }
}

TEST_F(MiniRag, KeywordSelectionsAreContainedAndReranked) {
  auto script = ScriptedMockBackend::parse_script(read_file(mini->mock_script));
  for (Direction d : {Direction::kCapecToAttack, Direction::kAttackToCapec}) {
    for (std::size_t k = 1; k <= 5; ++k) {
      ScriptedMockBackend backend(script);
      auto rag = rag_mapping(mini->sources(d), mini->targets(d), mini->catalog, d, config(k), backend);
      auto nn = pairs(nn_mapping(mini->sources(d), mini->targets(d), k, d));
      for (const auto& e : rag.mapping.edges) EXPECT_TRUE(nn.contains({e.source_id, e.target_id}));
      std::map<std::string, int> last_rank;
      for (const auto& e : rag.mapping.edges) {
        EXPECT_EQ(e.rank, ++last_rank[e.source_id]);
      }
      EXPECT_TRUE(rag.failures.empty());
    }
  }
}

// Independent restatement of the fixture rule: a case-insensitive keyword
// present in both names.
bool shares_keyword(const std::vector<std::string>& kws, std::string a, std::string b) {
  auto lower = [](std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
  };
  a = lower(a);
  b = lower(b);
  for (const auto& kw : kws) {
    const std::string k = lower(kw);
    if (a.find(k) != std::string::npos && b.find(k) != std::string::npos) return true;
  }
  return false;
}

TEST_F(MiniRag, KeywordEdgesMatchRuleOverNeighbours) {
  auto script = ScriptedMockBackend::parse_script(read_file(mini->mock_script));
  script.responses.clear();
  std::size_t total = 0;
  for (Direction d : {Direction::kCapecToAttack, Direction::kAttackToCapec}) {
    for (std::size_t k = 1; k <= 5; ++k) {
      ScriptedMockBackend backend(script);
      auto rag = rag_mapping(mini->sources(d), mini->targets(d), mini->catalog, d, config(k), backend);
      std::set<std::pair<std::string, std::string>> expected;
      for (const auto& e : nn_mapping(mini->sources(d), mini->targets(d), k, d).edges) {
        if (shares_keyword(script.keywords, mini->catalog.find(e.source_id)->name,
                           mini->catalog.find(e.target_id)->name)) {
          expected.emplace(e.source_id, e.target_id);
        }
      }
      EXPECT_EQ(pairs(rag.mapping), expected) << direction_name(d) << " k=" << k;
      total += expected.size();
    }
  }
  EXPECT_GT(total, 0u);
}

TEST_F(MiniRag, SelectNoneGivesEmptyMapping) {
  ScriptedMockBackend backend({Policy::kSelectNone, {}, "high", {}});
  auto rag = rag_mapping(mini->patterns, mini->techniques, mini->catalog, Direction::kCapecToAttack,
                         config(5), backend);
  EXPECT_TRUE(rag.mapping.edges.empty());
  for (const auto& d : rag.decisions) EXPECT_FALSE(d.failed);
}

TEST_F(MiniRag, HallucinatingBackendStoresNoEdges) {
  ScriptedMockBackend backend({Policy::kHallucinate, {}, "high", {}});
  auto rag = rag_mapping(mini->patterns, mini->techniques, mini->catalog, Direction::kCapecToAttack,
                         config(3), backend);
  EXPECT_TRUE(rag.mapping.edges.empty());
  ASSERT_EQ(rag.decisions.size(), 12u);
  for (const auto& d : rag.decisions) {
    EXPECT_TRUE(d.failed);
    EXPECT_EQ(d.attempts, 3);
  }
}

TEST_F(MiniRag, BackendFailureSkipsOnlyThatSource) {
  ScriptedMockBackend::Script script{Policy::kSelectAll, {}, "high", {}};
  script.responses["CAPEC-94"] = {std::string(ScriptedMockBackend::kTransportError)};
  ScriptedMockBackend backend(script);
  auto rag = rag_mapping(mini->patterns, mini->techniques, mini->catalog, Direction::kCapecToAttack,
                         config(2), backend);
  ASSERT_EQ(rag.failures.size(), 1u);
  EXPECT_EQ(rag.failures[0].source_id, "CAPEC-94");
  EXPECT_EQ(rag.mapping.edges.size(), 22u);
}

TEST_F(MiniRag, GrammarSentToCapableBackends) {
  struct Capture final : LlmBackend {
    std::mutex mu;
    std::vector<std::string> grammars;
    bool supports_grammar() const override { return true; }
    std::string complete(const LlmRequest& r) override {
      std::lock_guard lock(mu);
      grammars.push_back(r.grammar.value_or(""));
      return R"({"mappings":[]})";
    }
  } capture;
  rag_refine(*mini->catalog.find("T0814"), candidates({"CAPEC-125", "CAPEC-607"}),
             Direction::kAttackToCapec, config(2), capture);
  ASSERT_EQ(capture.grammars.size(), 1u);
  EXPECT_NE(capture.grammars[0].find("root ::="), std::string::npos);
  EXPECT_NE(capture.grammars[0].find("CAPEC-607"), std::string::npos);
}

TEST(ScriptedMock, ScriptParsing) {
  auto s = ScriptedMockBackend::parse_script(
      R"({"policy":"keyword","keywords":["flood"],"confidence":"low","responses":{"T1":["a","b"]}})");
  EXPECT_EQ(s.policy, Policy::kKeyword);
  EXPECT_EQ(s.responses["T1"].size(), 2u);
  EXPECT_THROW(ScriptedMockBackend::parse_script(R"({"policy":"keyword","typo":1})"), Error);
  EXPECT_THROW(ScriptedMockBackend::parse_policy("random"), Error);
  EXPECT_TRUE(ScriptedMockBackend::keyword_match({"phishing"}, "Spear Phishing", "Spearphishing Attachment"));
  EXPECT_FALSE(ScriptedMockBackend::keyword_match({"phishing"}, "Flooding", "Spearphishing Attachment"));
}

TEST(RagConfig, Validation) {
  RagConfig c;
  c.backend.mock_script = "x.json";
  EXPECT_NO_THROW(c.validate());
  c.temperature = 0.7;
  EXPECT_EQ(kind_of([&] { c.validate(); }), ErrorKind::kConfig);
  c.deterministic = false;
  EXPECT_NO_THROW(c.validate());
  c.backend.kind = BackendKind::kHttpChat;
  EXPECT_EQ(kind_of([&] { c.validate(); }), ErrorKind::kConfig);  // no endpoint
  c.backend.endpoint = "http://127.0.0.1:1/chat";
  EXPECT_EQ(kind_of([&] { make_backend(c.backend, true); }), ErrorKind::kConfig);
}

TEST(HttpChat, WireFormatAndRetries) {
  std::atomic<int> calls{0};
  nlohmann::json seen;
  testing_support::LocalServer server("/chat", [&](const auto& req, auto& res) {
    if (calls.fetch_add(1) == 0) {
      res.status = 503;
      return;
    }
    seen = nlohmann::json::parse(req.body);
    res.set_content(R"({"content":"{\"mappings\":[]}"})", "application/json");
  });
  LlmBackendConfig c;
  c.kind = BackendKind::kGrammarHttp;
  c.supports_grammar = true;
  c.endpoint = server.url("/chat");
  c.retry.base_delay = std::chrono::milliseconds(0);
  auto backend = make_backend(c, false);
  LlmRequest r;
  r.model = "llama-3-8b-instruct";
  r.messages = {{"system", "s"}, {"user", "u"}};
  r.grammar = "root ::= \"x\"";
  r.source_id = "never sent";
  EXPECT_EQ(backend->complete(r), R"({"mappings":[]})");
  EXPECT_EQ(calls.load(), 2);
  EXPECT_EQ(seen["model"], "llama-3-8b-instruct");
  EXPECT_EQ(seen["messages"][1]["content"], "u");
  EXPECT_EQ(seen["temperature"], 0.0);
  EXPECT_EQ(seen["grammar"], "root ::= \"x\"");
  EXPECT_EQ(seen.dump().find("never sent"), std::string::npos);
}

TEST(HttpChat, ClientErrorIsBackendError) {
  testing_support::LocalServer server("/chat", [&](const auto&, auto& res) { res.status = 401; });
  LlmBackendConfig c;
  c.kind = BackendKind::kHttpChat;
  c.endpoint = server.url("/chat");
  c.retry.base_delay = std::chrono::milliseconds(0);
  auto backend = make_backend(c, false);
  EXPECT_EQ(kind_of([&] { backend->complete(LlmRequest{}); }), ErrorKind::kBackend);
}

}  // namespace
}  // namespace attackmap
