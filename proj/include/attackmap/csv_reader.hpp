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

#include <string>
#include <string_view>
#include <vector>

namespace attackmap::csv {

struct Row {
  std::vector<std::string> fields;
  int line = 0;  // line on which the record starts
};

// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
// line breaks. Accepts LF or CRLF. Unterminated quotes raise Error(kParse).
std::vector<Row> parse(std::string_view text, char separator = ',');

// Quotes a field when it contains the separator, a quote or a line break.
std::string escape(std::string_view field, char separator = ',');

}  // namespace attackmap::csv
