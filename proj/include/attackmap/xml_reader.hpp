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

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace attackmap::xml {

// Minimal non-validating XML DOM: elements, attributes, character data.
// Namespace prefixes are kept verbatim in names ("xhtml:p"); `local_name()`
// strips them. Comments, processing instructions and DOCTYPE are dropped.
struct Node {
  std::string name;  // empty for text nodes
  std::string text;  // character data for text nodes
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Node> children;
  int line = 0;

  bool is_text() const { return name.empty(); }
  std::string_view local_name() const;
  std::optional<std::string_view> attribute(std::string_view key) const;

  // First child element whose local name matches.
  const Node* child(std::string_view local) const;
  std::vector<const Node*> children_named(std::string_view local) const;

  // Concatenated character data of all descendants. Block-level children
  // (paragraphs, list items, line breaks, divs) are separated by a space.
  std::string text_content() const;
};

// Throws Error(kParse) with a "line N:" prefix on malformed input.
Node parse(std::string_view document);

}  // namespace attackmap::xml
