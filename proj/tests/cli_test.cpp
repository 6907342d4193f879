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

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli_support.hpp"

namespace {

nlohmann::json last_json(const std::string& out) {
  auto end = out.find_last_not_of('\n');
  auto start = out.rfind('\n', end);
  return nlohmann::json::parse(out.substr(start == std::string::npos ? 0 : start + 1, end + 1 - (start == std::string::npos ? 0 : start + 1)));
}

TEST(Cli, OfflinePipeline) {
  cli::Workspace ws("pipeline");
  auto ingest = ws.cmd("ingest");
  ASSERT_EQ(ingest.exit_code, 0) << ingest.out;
  EXPECT_NE(ingest.out.find("12 attack patterns, 8 techniques"), std::string::npos);
  EXPECT_EQ(last_json(ingest.out)["status"], "ok");

  auto embed = ws.cmd("embed");
  ASSERT_EQ(embed.exit_code, 0) << embed.out;
  EXPECT_GT(last_json(embed.out)["provider_batches"].get<int>(), 0);
  auto again = ws.cmd("embed --model hash-test");
  ASSERT_EQ(again.exit_code, 0);
  EXPECT_EQ(last_json(again.out)["provider_batches"], 0);  // served from cache

  auto map = ws.cmd("map --model hash-test --k 3 --method nn --direction capec-to-attack");
  ASSERT_EQ(map.exit_code, 0) << map.out;
  EXPECT_TRUE(cli::fs::exists(ws.results() / "mapping_hash-test_k3_nn_capec-to-attack.json"));
  EXPECT_TRUE(cli::fs::exists(ws.results() / "mapping_hash-test_k3_nn_capec-to-attack.csv"));

  auto eval = ws.cmd("evaluate");
  ASSERT_EQ(eval.exit_code, 0) << eval.out;
  auto md = cli::slurp(ws.results() / "report.md");
  EXPECT_NE(md.find("## CAPEC-to-ATT&CK Results"), std::string::npos);
  EXPECT_NE(md.find("## ATT&CK-to-CAPEC Results"), std::string::npos);

  cli::fs::remove(ws.results() / "report.md");
  auto rep = ws.cmd("report");
  ASSERT_EQ(rep.exit_code, 0) << rep.out;
  EXPECT_EQ(cli::slurp(ws.results() / "report.md"), md);
}

TEST(Cli, EvaluateIsByteIdenticalAcrossRuns) {
  cli::Workspace a("det_a"), b("det_b");
  for (auto* ws : {&a, &b}) {
    ASSERT_EQ(ws->cmd("ingest").exit_code, 0);
    ASSERT_EQ(ws->cmd("embed").exit_code, 0);
    ASSERT_EQ(ws->cmd("evaluate").exit_code, 0);
  }
  for (const char* f : {"report.md", "report.csv", "report.json"}) {
    EXPECT_EQ(cli::slurp(a.results() / f), cli::slurp(b.results() / f)) << f;
  }
}

TEST(Cli, SeedFlagChangesVectors) {
  cli::Workspace a("seed_a"), b("seed_b");
  ASSERT_EQ(a.cmd("ingest").exit_code, 0);
  ASSERT_EQ(b.cmd("ingest").exit_code, 0);
  ASSERT_EQ(a.cmd("embed").exit_code, 0);
  ASSERT_EQ(b.cmd("--seed 8 embed").exit_code, 0);
  EXPECT_NE(cli::slurp(a.dir / "store" / "hash-test.f32"), cli::slurp(b.dir / "store" / "hash-test.f32"));
}

TEST(Cli, ErrorsAreReportedAsJson) {
  cli::Workspace ws("bad", "unexpected_key = 1\n");
  auto r = ws.cmd("ingest");
  EXPECT_EQ(r.exit_code, 1);
  auto j = last_json(r.out);
  EXPECT_EQ(j["status"], "error");
  EXPECT_EQ(j["kind"], "config");
  EXPECT_NE(j["message"].get<std::string>().find("unexpected_key"), std::string::npos);

  cli::Workspace fresh("noingest");
  auto e = fresh.cmd("embed");
  EXPECT_EQ(e.exit_code, 1);
  EXPECT_EQ(last_json(e.out)["status"], "error");
}

TEST(Cli, UsageErrors) {
  EXPECT_NE(cli::run("ingest").exit_code, 0);
  cli::Workspace ws("usage");
  EXPECT_NE(ws.cmd("map --method bogus").exit_code, 0);
}

}  // namespace
