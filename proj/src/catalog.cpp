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

#include "attackmap/catalog.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "attackmap/csv_reader.hpp"
#include "attackmap/error.hpp"
#include "attackmap/text.hpp"
#include "attackmap/xml_reader.hpp"

namespace attackmap {

using ordered_json = nlohmann::ordered_json;

std::string_view entry_kind_name(EntryKind kind) {
  return kind == EntryKind::kAttackPattern ? "attack-pattern" : "technique";
}

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool inactive_status(const std::optional<std::string>& status) {
  return status && (*status == "Deprecated" || *status == "Obsolete" || *status == "Revoked");
}

void sort_entries(std::vector<CatalogEntry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const CatalogEntry& a, const CatalogEntry& b) { return id_less(a.id, b.id); });
}

std::optional<std::string> non_empty(std::optional<std::string_view> v) {
  if (!v || v->empty()) return std::nullopt;
  return std::string(*v);
}

void validate_list(const std::vector<CatalogEntry>& list, EntryKind kind) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& e = list[i];
    if (e.kind != kind) {
      fail(ErrorKind::kIntegrity, "entry " + e.id + " has kind " +
                                      std::string(entry_kind_name(e.kind)) + " in the " +
                                      std::string(entry_kind_name(kind)) + " list");
    }
    bool id_ok = kind == EntryKind::kAttackPattern ? is_capec_id(e.id) : is_technique_id(e.id);
    if (!id_ok) fail(ErrorKind::kIntegrity, "malformed id '" + e.id + "'");
    if (e.name.empty()) fail(ErrorKind::kIntegrity, "entry " + e.id + " has no name");
    if (i > 0 && !id_less(list[i - 1].id, e.id)) {
      fail(ErrorKind::kIntegrity, list[i - 1].id == e.id
                                      ? "duplicate id " + e.id
                                      : "entries out of canonical order at " + e.id);
    }
  }
}

// Keeps the first occurrence of each id; later ones become issues.
void drop_duplicates(ParseResult& result) {
  std::vector<CatalogEntry> kept;
  std::set<std::string> seen;
  for (auto& e : result.entries) {
    if (!seen.insert(e.id).second) {
      result.issues.push_back({0, e.id, "duplicate id; later record ignored"});
      continue;
    }
    kept.push_back(std::move(e));
  }
  result.entries = std::move(kept);
}

ParseResult parse_capec_xml(std::string_view source, const ParseOptions& options) {
  xml::Node root = xml::parse(source);
  if (root.local_name() != "Attack_Pattern_Catalog") {
    fail(ErrorKind::kParse, "line " + std::to_string(root.line) +
                                ": expected <Attack_Pattern_Catalog>, found <" + root.name + ">");
  }
  ParseResult result;
  if (auto date = root.attribute("Date"); date && !date->empty()) {
    result.snapshot_date = std::string(*date);
  }
  const xml::Node* patterns = root.child("Attack_Patterns");
  if (patterns == nullptr) return result;

  for (const xml::Node* node : patterns->children_named("Attack_Pattern")) {
    auto raw_id = node->attribute("ID");
    auto name = node->attribute("Name");
    std::string id = raw_id ? "CAPEC-" + std::string(*raw_id) : "";
    if (!raw_id || !all_digits(*raw_id)) {
      result.issues.push_back({node->line, std::string(raw_id.value_or("")),
                               "attack pattern without a numeric ID attribute"});
      continue;
    }
    if (!name || name->empty()) {
      result.issues.push_back({node->line, id, "attack pattern without a Name"});
      continue;
    }
    CatalogEntry entry;
    entry.id = id;
    entry.kind = EntryKind::kAttackPattern;
    entry.name = normalize_whitespace(*name);
    entry.abstraction = non_empty(node->attribute("Abstraction"));
    entry.status = non_empty(node->attribute("Status"));
    if (inactive_status(entry.status) && !options.include_deprecated) continue;
    if (const xml::Node* desc = node->child("Description")) {
      entry.description = normalize_whitespace(desc->text_content());
    }
    if (entry.description.empty()) {
      result.issues.push_back({node->line, id, "attack pattern without a Description"});
      continue;
    }
    result.entries.push_back(std::move(entry));
  }
  sort_entries(result.entries);
  drop_duplicates(result);
  return result;
}

ParseResult parse_capec_csv(std::string_view source, const ParseOptions& options) {
  auto rows = csv::parse(source);
  ParseResult result;
  if (rows.empty()) return result;

  auto column = [&](std::string_view wanted) -> std::ptrdiff_t {
    const auto& header = rows.front().fields;
    for (std::size_t i = 0; i < header.size(); ++i) {
      std::string_view h = header[i];
      if (h.rfind("\xEF\xBB\xBF", 0) == 0) h.remove_prefix(3);
      if (!h.empty() && h.front() == '\'') h.remove_prefix(1);
      if (h == wanted) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
  };
  const auto id_col = column("ID");
  const auto name_col = column("Name");
  const auto desc_col = column("Description");
  const auto abs_col = column("Abstraction");
  const auto status_col = column("Status");
  if (id_col < 0 || name_col < 0 || desc_col < 0) {
    fail(ErrorKind::kParse, "line 1: CSV header lacks ID, Name or Description column");
  }

  auto field = [](const csv::Row& row, std::ptrdiff_t col) -> std::string_view {
    if (col < 0 || static_cast<std::size_t>(col) >= row.fields.size()) return {};
    return row.fields[static_cast<std::size_t>(col)];
  };

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    std::string_view raw_id = field(row, id_col);
    if (raw_id.rfind("CAPEC-", 0) == 0) raw_id.remove_prefix(6);
    if (!all_digits(raw_id)) {
      result.issues.push_back({row.line, std::string(raw_id), "row without a numeric ID"});
      continue;
    }
    std::string id = "CAPEC-" + std::string(raw_id);
    std::string name = normalize_whitespace(field(row, name_col));
    if (name.empty()) {
      result.issues.push_back({row.line, id, "row without a Name"});
      continue;
    }
    CatalogEntry entry;
    entry.id = id;
    entry.kind = EntryKind::kAttackPattern;
    entry.name = std::move(name);
    entry.abstraction = non_empty(field(row, abs_col));
    entry.status = non_empty(field(row, status_col));
    if (inactive_status(entry.status) && !options.include_deprecated) continue;
    entry.description = normalize_whitespace(field(row, desc_col));
    if (entry.description.empty()) {
      result.issues.push_back({row.line, id, "row without a Description"});
      continue;
    }
    result.entries.push_back(std::move(entry));
  }
  sort_entries(result.entries);
  drop_duplicates(result);
  return result;
}

}  // namespace

bool is_capec_id(std::string_view id) {
  return id.rfind("CAPEC-", 0) == 0 && all_digits(id.substr(6));
}

bool is_technique_id(std::string_view id) {
  if (id.size() < 2 || id[0] != 'T') return false;
  std::string_view rest = id.substr(1);
  auto dot = rest.find('.');
  if (dot == std::string_view::npos) return all_digits(rest);
  return all_digits(rest.substr(0, dot)) && all_digits(rest.substr(dot + 1));
}

void Catalog::validate() const {
  validate_list(patterns, EntryKind::kAttackPattern);
  validate_list(techniques, EntryKind::kTechnique);
}

const CatalogEntry* Catalog::find(std::string_view id) const {
  const auto& list = is_capec_id(id) ? patterns : techniques;
  auto it = std::lower_bound(list.begin(), list.end(), id,
                             [](const CatalogEntry& e, std::string_view v) { return id_less(e.id, v); });
  if (it != list.end() && it->id == id) return &*it;
  return nullptr;
}

Catalog make_catalog(std::vector<CatalogEntry> patterns, std::vector<CatalogEntry> techniques,
                     std::string snapshot_date) {
  Catalog c{std::move(patterns), std::move(techniques), std::move(snapshot_date)};
  sort_entries(c.patterns);
  sort_entries(c.techniques);
  c.validate();
  return c;
}

ParseResult parse_capec(std::string_view source, CapecFormat format, const ParseOptions& options) {
  return format == CapecFormat::kXmlCatalog ? parse_capec_xml(source, options)
                                            : parse_capec_csv(source, options);
}

std::string strip_stix_markup(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text.substr(i, 11) == "(Citation: ") {
      auto close = text.find(')', i);
      if (close != std::string_view::npos) {
        i = close + 1;
        continue;
      }
    }
    if (text[i] == '[') {
      // [label](url) -> label
      auto close = text.find(']', i);
      if (close != std::string_view::npos && close + 1 < text.size() && text[close + 1] == '(') {
        auto paren = text.find(')', close + 1);
        if (paren != std::string_view::npos) {
          out.append(text.substr(i + 1, close - i - 1));
          i = paren + 1;
          continue;
        }
      }
    }
    if (text.substr(i, 6) == "<code>") {
      i += 6;
      continue;
    }
    if (text.substr(i, 7) == "</code>") {
      i += 7;
      continue;
    }
    out.push_back(text[i]);
    ++i;
  }
  return normalize_whitespace(out);
}

ParseResult parse_attack_ics(std::string_view source, const ParseOptions& options) {
  nlohmann::json bundle;
  try {
    bundle = nlohmann::json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::kParse, std::string("invalid STIX JSON: ") + e.what());
  }
  if (!bundle.is_object() || !bundle.contains("objects") || !bundle["objects"].is_array()) {
    fail(ErrorKind::kParse, "STIX bundle has no 'objects' array");
  }
  ParseResult result;
  int index = 0;
  for (const auto& obj : bundle["objects"]) {
    ++index;
    if (!obj.is_object() || obj.value("type", "") != "attack-pattern") continue;
    std::string stix_id = obj.value("id", "");
    std::string attack_id;
    if (auto refs = obj.find("external_references"); refs != obj.end() && refs->is_array()) {
      for (const auto& ref : *refs) {
        if (!ref.is_object()) continue;
        std::string source_name = ref.value("source_name", "");
        std::string ext = ref.value("external_id", "");
        if (source_name.rfind("mitre", 0) == 0 && is_technique_id(ext)) {
          attack_id = ext;
          break;
        }
      }
    }
    if (attack_id.empty()) {
      result.issues.push_back({index, stix_id, "attack-pattern without an ATT&CK external id"});
      continue;
    }
    bool revoked = obj.value("revoked", false);
    bool deprecated = obj.value("x_mitre_deprecated", false);
    if ((revoked || deprecated) && !options.include_deprecated) continue;

    CatalogEntry entry;
    entry.id = attack_id;
    entry.kind = EntryKind::kTechnique;
    entry.name = normalize_whitespace(obj.value("name", ""));
    entry.description = strip_stix_markup(obj.value("description", ""));
    if (revoked) entry.status = "Revoked";
    else if (deprecated) entry.status = "Deprecated";
    if (entry.name.empty() || entry.description.empty()) {
      result.issues.push_back({index, attack_id, "attack-pattern without a name or description"});
      continue;
    }
    result.entries.push_back(std::move(entry));
  }
  sort_entries(result.entries);
  drop_duplicates(result);
  return result;
}

DescriptionString build_description_string(const CatalogEntry& entry) {
  if (entry.id.empty() || entry.name.empty()) {
    fail(ErrorKind::kInvalidArgument, "entry without id or name cannot be described");
  }
  if (entry.description.empty()) {
    fail(ErrorKind::kInvalidArgument, "entry " + entry.id + " has an empty description");
  }
  return {entry.id,
          "Name: " + entry.name + "\nID: " + entry.id + "\nDescription: " + entry.description};
}

namespace {

ordered_json entry_to_json(const CatalogEntry& e) {
  ordered_json j;
  j["id"] = e.id;
  j["kind"] = entry_kind_name(e.kind);
  j["name"] = e.name;
  j["description"] = e.description;
  if (e.abstraction) j["abstraction"] = *e.abstraction;
  if (e.status) j["status"] = *e.status;
  return j;
}

CatalogEntry entry_from_json(const nlohmann::json& j, std::size_t line) {
  auto where = "line " + std::to_string(line) + ": ";
  if (!j.is_object()) fail(ErrorKind::kIntegrity, where + "entry is not an object");
  CatalogEntry e;
  try {
    e.id = j.at("id").get<std::string>();
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "attack-pattern") e.kind = EntryKind::kAttackPattern;
    else if (kind == "technique") e.kind = EntryKind::kTechnique;
    else fail(ErrorKind::kIntegrity, where + "unknown kind '" + kind + "'");
    e.name = j.at("name").get<std::string>();
    e.description = j.at("description").get<std::string>();
    if (j.contains("abstraction")) e.abstraction = j["abstraction"].get<std::string>();
    if (j.contains("status")) e.status = j["status"].get<std::string>();
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::kIntegrity, where + ex.what());
  }
  return e;
}

}  // namespace

std::string save_catalog(const Catalog& catalog) {
  catalog.validate();
  ordered_json header;
  header["format"] = "attackmap-catalog";
  header["version"] = 1;
  header["snapshot_date"] = catalog.snapshot_date;
  header["patterns"] = catalog.patterns.size();
  header["techniques"] = catalog.techniques.size();
  std::string out = header.dump() + "\n";
  for (const auto& e : catalog.patterns) out += entry_to_json(e).dump() + "\n";
  for (const auto& e : catalog.techniques) out += entry_to_json(e).dump() + "\n";
  return out;
}

Catalog load_catalog(std::string_view jsonl) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start < jsonl.size();) {
    auto nl = jsonl.find('\n', start);
    if (nl == std::string_view::npos) nl = jsonl.size();
    auto line = jsonl.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = nl + 1;
  }
  if (lines.empty()) fail(ErrorKind::kIntegrity, "catalog file has no header line");

  auto parse_line = [](std::string_view line, std::size_t n) {
    try {
      return nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::kParse, "line " + std::to_string(n) + ": " + e.what());
    }
  };

  auto header = parse_line(lines[0], 1);
  std::size_t n_patterns = 0, n_techniques = 0;
  Catalog catalog;
  try {
    if (header.value("format", "") != "attackmap-catalog") {
      fail(ErrorKind::kIntegrity, "line 1: not an attackmap catalog header");
    }
    catalog.snapshot_date = header.at("snapshot_date").get<std::string>();
    n_patterns = header.at("patterns").get<std::size_t>();
    n_techniques = header.at("techniques").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kIntegrity, std::string("line 1: bad header: ") + e.what());
  }

  for (std::size_t i = 1; i < lines.size(); ++i) {
    CatalogEntry e = entry_from_json(parse_line(lines[i], i + 1), i + 1);
    (e.kind == EntryKind::kAttackPattern ? catalog.patterns : catalog.techniques)
        .push_back(std::move(e));
  }
  if (catalog.patterns.size() != n_patterns || catalog.techniques.size() != n_techniques) {
    fail(ErrorKind::kIntegrity,
         "header declares " + std::to_string(n_patterns) + " patterns and " +
             std::to_string(n_techniques) + " techniques, body has " +
             std::to_string(catalog.patterns.size()) + " and " +
             std::to_string(catalog.techniques.size()));
  }
  catalog.validate();
  return catalog;
}

}  // namespace attackmap
