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

// attackmap: ingest -> embed -> map -> evaluate -> report.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "attackmap/commands.hpp"
#include "attackmap/error.hpp"
#include "attackmap/pipeline_config.hpp"

namespace {

using attackmap::Direction;
using attackmap::Method;
using ojson = nlohmann::ordered_json;

int emit(const ojson& summary) {
  std::cout << summary.dump() << std::endl;
  return summary.value("status", "ok") == "ok" ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Map CAPEC attack patterns to ATT&CK ICS techniques and evaluate the mappings"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool offline = false;
  app.add_option("--config", config_path, "Pipeline config file (TOML)")->required();
  app.add_option("--seed", seed, "Override the config seed");
  app.add_flag("--offline", offline, "Forbid network access");

  auto* ingest = app.add_subcommand("ingest", "Parse the CAPEC and ATT&CK sources into a catalog");

  auto* embed = app.add_subcommand("embed", "Embed every catalog entry and store the vectors");
  std::vector<std::string> embed_models;
  embed->add_option("--model", embed_models, "Model id (default: every sweep model)");

  auto* map = app.add_subcommand("map", "Write mapping sets (default: the whole sweep grid)");
  std::vector<std::string> map_models;
  std::vector<std::size_t> map_ks;
  std::vector<std::string> map_methods;
  std::vector<std::string> map_directions;
  map->add_option("--model", map_models, "Model id");
  map->add_option("--k", map_ks, "Neighbours per source")->check(CLI::PositiveNumber);
  map->add_option("--method", map_methods, "nn or rag")->check(CLI::IsMember({"nn", "rag"}));
  map->add_option("--direction", map_directions, "capec-to-attack or attack-to-capec")
      ->check(CLI::IsMember({"capec-to-attack", "attack-to-capec"}));

  auto* evaluate = app.add_subcommand("evaluate", "Run the sweep and write the evaluation report");
  auto* report = app.add_subcommand("report", "Re-render an existing report");

  CLI11_PARSE(app, argc, argv);

  std::string command = app.get_subcommands().front()->get_name();
  try {
    attackmap::PipelineConfig config = attackmap::load_pipeline_config(config_path);
    if (seed) config.apply_seed(*seed);
    if (offline) config.offline = true;
    config.validate();

    if (ingest->parsed()) return emit(attackmap::cmd_ingest(config, std::cout));
    if (embed->parsed()) {
      if (embed_models.empty()) embed_models = config.sweep.models;
      int rc = 0;
      for (const auto& m : embed_models) rc |= emit(attackmap::cmd_embed(config, m, std::cout));
      return rc;
    }
    if (map->parsed()) {
      if (map_models.empty()) map_models = config.sweep.models;
      if (map_ks.empty()) map_ks = config.sweep.ks;
      std::vector<Method> methods = config.sweep.methods;
      if (!map_methods.empty()) {
        methods.clear();
        for (const auto& m : map_methods) methods.push_back(attackmap::parse_method(m));
      }
      std::vector<Direction> directions = config.sweep.directions;
      if (!map_directions.empty()) {
        directions.clear();
        for (const auto& d : map_directions) directions.push_back(attackmap::parse_direction(d));
      }
      int rc = 0;
      for (const auto& m : map_models)
        for (std::size_t k : map_ks)
          for (Method method : methods)
            for (Direction d : directions)
              rc |= emit(attackmap::cmd_map(config, m, k, method, d, std::cout));
      return rc;
    }
    if (evaluate->parsed()) return emit(attackmap::cmd_evaluate(config, std::cout));
    if (report->parsed()) return emit(attackmap::cmd_report(config, std::cout));
  } catch (const attackmap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    ojson s;
    s["command"] = command;
    s["status"] = "error";
    s["kind"] = attackmap::error_kind_name(e.kind());
    s["message"] = e.what();
    return emit(s);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    ojson s;
    s["command"] = command;
    s["status"] = "error";
    s["kind"] = "internal";
    s["message"] = e.what();
    return emit(s);
  }
  return 1;
}
