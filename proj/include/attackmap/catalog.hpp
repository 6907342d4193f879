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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace attackmap {

enum class EntryKind { kAttackPattern, kTechnique };

std::string_view entry_kind_name(EntryKind kind);

// "CAPEC-<digits>"
bool is_capec_id(std::string_view id);
// "T<digits>" or "T<digits>.<digits>"
bool is_technique_id(std::string_view id);

struct CatalogEntry {
  std::string id;
  EntryKind kind = EntryKind::kAttackPattern;
  std::string name;
  std::string description;
  std::optional<std::string> abstraction;  // CAPEC only
  std::optional<std::string> status;

  bool operator==(const CatalogEntry&) const = default;
};

// Both lists are kept in canonical id order (see id_less) with unique ids.
struct Catalog {
  std::vector<CatalogEntry> patterns;
  std::vector<CatalogEntry> techniques;
  std::string snapshot_date;

  bool operator==(const Catalog&) const = default;

  // Throws Error(kIntegrity) when an invariant does not hold.
  void validate() const;
  const CatalogEntry* find(std::string_view id) const;
};

// Sorts both lists canonically and validates the result.
Catalog make_catalog(std::vector<CatalogEntry> patterns,
                     std::vector<CatalogEntry> techniques,
                     std::string snapshot_date);

struct DescriptionString {
  std::string entry_id;
  std::string text;

  bool operator==(const DescriptionString&) const = default;
};

enum class CapecFormat { kXmlCatalog, kCsv };

struct ParseOptions {
  bool include_deprecated = false;
};

// A record-level problem that did not stop the parse.
struct ParseIssue {
  int line = 0;
  std::string id;  // may be empty when the record had no id
  std::string message;
};

struct ParseResult {
  std::vector<CatalogEntry> entries;  // canonical order
  std::vector<ParseIssue> issues;
  std::optional<std::string> snapshot_date;  // from the catalog header, if any
};

// Malformed documents raise Error(kParse) with line context; records missing
// an id, a name or a description are reported in `issues` and skipped.
ParseResult parse_capec(std::string_view source, CapecFormat format,
                        const ParseOptions& options = {});

// STIX 2.1 bundle of an ATT&CK domain. Attack-pattern objects without an
// ATT&CK external id are skipped with an issue.
ParseResult parse_attack_ics(std::string_view source, const ParseOptions& options = {});

// "Name: {name}\nID: {id}\nDescription: {description}"
DescriptionString build_description_string(const CatalogEntry& entry);

// JSON-lines: one header object, then one object per entry (patterns first).
std::string save_catalog(const Catalog& catalog);
Catalog load_catalog(std::string_view jsonl);

// Strips ATT&CK citation markers and markdown links down to their text.
std::string strip_stix_markup(std::string_view text);

}  // namespace attackmap
