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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace attackmap {

// 64-bit FNV-1a over raw bytes. Stable across platforms; used for content
// hashes and digests.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t value);
std::uint64_t parse_hex64(std::string_view text);

// Collapses every run of ASCII whitespace to a single space and trims.
std::string normalize_whitespace(std::string_view text);

// Number of Unicode code points in a UTF-8 string. Invalid bytes count as one
// code point each.
std::size_t utf8_length(std::string_view text);

// Prefix holding at most `max_code_points` code points; never splits a
// multi-byte sequence.
std::string_view utf8_prefix(std::string_view text, std::size_t max_code_points);

// Decodes UTF-8 into code points. Invalid bytes map to U+FFFD.
std::vector<char32_t> utf8_decode(std::string_view text);
void utf8_append(std::string& out, char32_t code_point);

std::string to_lower_ascii(std::string_view text);

// Natural ordering of identifiers: runs of digits compare numerically, so
// "CAPEC-2" < "CAPEC-10" and "T0814" < "T0815". Ties on numeric value fall
// back to plain byte order, making this a strict total order.
bool id_less(std::string_view a, std::string_view b);

struct IdLess {
  bool operator()(std::string_view a, std::string_view b) const {
    return id_less(a, b);
  }
};

// Writes `contents` to `path` via a temporary sibling and rename.
void write_file_atomic(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

}  // namespace attackmap
