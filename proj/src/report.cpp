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

#include "attackmap/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "attackmap/error.hpp"

namespace attackmap {

namespace {

constexpr std::string_view kUndefined = "—";

constexpr const char* kMetricNames[] = {"Recall", "Precision", "F-Score", "Coverage", "FMR"};

std::string table_title(Direction d) {
  return d == Direction::kCapecToAttack ? "CAPEC-to-ATT&CK Results" : "ATT&CK-to-CAPEC Results";
}

const std::optional<Ratio>* metric_fields(const MetricsRow& row, std::size_t i) {
  switch (i) {
    case 0: return &row.recall;
    case 1: return &row.precision;
    case 2: return &row.f_score;
    case 3: return &row.coverage;
    default: return &row.fmr;
  }
}

std::string csv_value(const std::optional<Ratio>& r) {
  if (!r) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", r->value());
  return buf;
}

nlohmann::ordered_json ratio_json(const std::optional<Ratio>& r) {
  if (!r) return nullptr;
  return nlohmann::ordered_json::array({r->num, r->den});
}

std::optional<Ratio> ratio_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 2) fail(ErrorKind::kParse, "metric must be [num, den] or null");
  Ratio r{j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
  if (r.den <= 0 || r.num < 0) fail(ErrorKind::kParse, "metric has a non-positive denominator");
  return r;
}

}  // namespace

void EvaluationReport::validate() const {
  std::set<std::tuple<std::string, Method, Direction, std::size_t>> seen;
  for (const auto& r : rows) {
    if (!seen.emplace(r.model_id, r.method, r.direction, r.k).second) {
      fail(ErrorKind::kIntegrity, "duplicate report row for " + r.model_id + " k=" +
                                      std::to_string(r.k) + " " + std::string(method_name(r.method)) +
                                      " " + std::string(direction_name(r.direction)));
    }
  }
}

std::string format_metric(const std::optional<Ratio>& value) {
  if (!value) return std::string(kUndefined);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", value->value());
  std::string s = buf;
  if (s.rfind("0.", 0) == 0) s.erase(0, 1);
  return s;
}

std::string render_report(const EvaluationReport& report, ReportFormat format) {
  if (report.rows.empty()) fail(ErrorKind::kInvalidArgument, "report has no rows");
  report.validate();
  std::string out;

  if (format == ReportFormat::kCsv) {
    out = "model,k,method,direction,recall,precision,f_score,coverage,fmr\n";
    for (const auto& r : report.rows) {
      out += r.model_id + "," + std::to_string(r.k) + "," + std::string(method_name(r.method)) +
             "," + std::string(direction_name(r.direction));
      for (std::size_t i = 0; i < 5; ++i) out += "," + csv_value(*metric_fields(r, i));
      out += "\n";
    }
    return out;
  }

  out += "# Evaluation Report\n\n";
  out += "Ground truth digest: `" + report.ground_truth_digest + "`  \n";
  out += "Generated: " + report.generated_at + "\n";

  for (Direction d : {Direction::kCapecToAttack, Direction::kAttackToCapec}) {
    // (model, k) lines in first-appearance order; NN and RAG cells side by side.
    std::vector<std::pair<std::string, std::size_t>> keys;
    std::map<std::tuple<std::string, std::size_t, Method>, const MetricsRow*> cells;
    for (const auto& r : report.rows) {
      if (r.direction != d) continue;
      std::pair<std::string, std::size_t> key{r.model_id, r.k};
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
      cells[{r.model_id, r.k, r.method}] = &r;
    }
    if (keys.empty()) continue;
    std::vector<std::string> model_order;
    for (const auto& key : keys)
      if (std::find(model_order.begin(), model_order.end(), key.first) == model_order.end())
        model_order.push_back(key.first);
    auto model_rank = [&](const std::string& m) {
      return std::find(model_order.begin(), model_order.end(), m) - model_order.begin();
    };
    std::stable_sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return model_rank(a.first) < model_rank(b.first);
      return a.second < b.second;
    });

    out += "\n## " + table_title(d) + "\n\n";
    out += "Columns 3-7: nearest neighbor mapping. Columns 8-12: RAG-based mapping.\n\n";
    out += "| Model | 1-to-k |";
    for (int block = 0; block < 2; ++block)
      for (const char* name : kMetricNames) out += std::string(" ") + name + " |";
    out += "\n|---|---|";
    for (int i = 0; i < 10; ++i) out += "---:|";
    out += "\n";
    for (const auto& [model, k] : keys) {
      out += "| " + model + " | 1-to-" + std::to_string(k) + " |";
      for (Method m : {Method::kNearestNeighbor, Method::kRag}) {
        auto it = cells.find({model, k, m});
        for (std::size_t i = 0; i < 5; ++i) {
          std::optional<Ratio> v;
          if (it != cells.end()) v = *metric_fields(*it->second, i);
          out += " " + format_metric(v) + " |";
        }
      }
      out += "\n";
    }
  }

  if (!report.skipped.empty()) {
    out += "\n## Skipped Cells\n\n";
    for (const auto& s : report.skipped) {
      out += "- " + s.model_id + " 1-to-" + std::to_string(s.k) + " " +
             std::string(method_name(s.method)) + " " + std::string(direction_name(s.direction)) +
             ": " + s.reason + "\n";
    }
  }
  if (!report.source_failures.empty()) {
    out += "\n## RAG Source Failures\n\n";
    for (const auto& f : report.source_failures) {
      out += "- " + f.model_id + " 1-to-" + std::to_string(f.k) + " " +
             std::string(direction_name(f.direction)) + " " + f.source_id + ": " + f.reason + "\n";
    }
  }
  return out;
}

std::string report_to_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  j["format"] = "attackmap-report";
  j["version"] = 1;
  j["ground_truth_digest"] = report.ground_truth_digest;
  j["generated_at"] = report.generated_at;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"model", r.model_id},
                    {"k", r.k},
                    {"method", method_name(r.method)},
                    {"direction", direction_name(r.direction)},
                    {"recall", ratio_json(r.recall)},
                    {"precision", ratio_json(r.precision)},
                    {"f_score", ratio_json(r.f_score)},
                    {"coverage", ratio_json(r.coverage)},
                    {"fmr", ratio_json(r.fmr)}});
  }
  auto& skipped = j["skipped"] = nlohmann::ordered_json::array();
  for (const auto& s : report.skipped) {
    skipped.push_back({{"model", s.model_id},
                       {"k", s.k},
                       {"method", method_name(s.method)},
                       {"direction", direction_name(s.direction)},
                       {"reason", s.reason}});
  }
  auto& failures = j["source_failures"] = nlohmann::ordered_json::array();
  for (const auto& f : report.source_failures) {
    failures.push_back({{"model", f.model_id},
                        {"k", f.k},
                        {"direction", direction_name(f.direction)},
                        {"source", f.source_id},
                        {"reason", f.reason}});
  }
  return j.dump(2) + "\n";
}

EvaluationReport report_from_json(std::string_view text) {
  EvaluationReport report;
  try {
    auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "attackmap-report" || j.value("version", 0) != 1) {
      fail(ErrorKind::kParse, "not an attackmap report (format/version)");
    }
    report.ground_truth_digest = j.at("ground_truth_digest").get<std::string>();
    report.generated_at = j.at("generated_at").get<std::string>();
    for (const auto& r : j.at("rows")) {
      MetricsRow row;
      row.model_id = r.at("model").get<std::string>();
      row.k = r.at("k").get<std::size_t>();
      row.method = parse_method(r.at("method").get<std::string>());
      row.direction = parse_direction(r.at("direction").get<std::string>());
      row.recall = ratio_from(r.at("recall"));
      row.precision = ratio_from(r.at("precision"));
      row.f_score = ratio_from(r.at("f_score"));
      row.coverage = ratio_from(r.at("coverage"));
      row.fmr = ratio_from(r.at("fmr"));
      report.rows.push_back(std::move(row));
    }
    for (const auto& s : j.value("skipped", nlohmann::json::array())) {
      report.skipped.push_back({s.at("model").get<std::string>(), s.at("k").get<std::size_t>(),
                                parse_method(s.at("method").get<std::string>()),
                                parse_direction(s.at("direction").get<std::string>()),
                                s.at("reason").get<std::string>()});
    }
    for (const auto& f : j.value("source_failures", nlohmann::json::array())) {
      report.source_failures.push_back(
          {f.at("model").get<std::string>(), f.at("k").get<std::size_t>(),
           parse_direction(f.at("direction").get<std::string>()), f.at("source").get<std::string>(),
           f.at("reason").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, std::string("bad report JSON: ") + e.what());
  }
  report.validate();
  return report;
}

}  // namespace attackmap
