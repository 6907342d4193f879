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

#include <string_view>

#include <json.hpp>

namespace attackmap::toml {

// Reads the TOML subset used by pipeline configs into a JSON tree: tables,
// dotted keys, [[arrays of tables]], basic and literal strings, integers,
// floats, booleans, arrays and inline tables. Dates and multi-line strings
// are not supported. Errors are Error(kConfig) with a line number.
nlohmann::ordered_json parse(std::string_view text);

}  // namespace attackmap::toml
