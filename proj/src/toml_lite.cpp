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

#include "attackmap/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <string>
#include <vector>

#include "attackmap/error.hpp"
#include "attackmap/text.hpp"

namespace attackmap::toml {

namespace {

using json = nlohmann::ordered_json;

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  json run() {
    json root = json::object();
    json* current = &root;
    std::string current_path;
    while (true) {
      skip_ws_comments_newlines();
      if (eof()) break;
      if (peek() == '[') {
        bool array_table = s_.substr(pos_, 2) == "[[";
        pos_ += array_table ? 2 : 1;
        skip_inline_ws();
        std::vector<std::string> path = key_path();
        skip_inline_ws();
        expect(']');
        if (array_table) expect(']');
        end_of_line();
        current_path = join(path);
        current = array_table ? open_array_table(root, path) : open_table(root, path);
        continue;
      }
      std::vector<std::string> path = key_path();
      skip_inline_ws();
      expect('=');
      skip_inline_ws();
      json value = parse_value();
      assign(*current, path, std::move(value), current_path);
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::kConfig, "config line " + std::to_string(line_) + ": " + msg);
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  void expect(char c) {
    if (peek() != c) error(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }

  void skip_ws_comments_newlines() {
    while (!eof()) {
      skip_inline_ws();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      break;
    }
  }

  void end_of_line() {
    skip_inline_ws();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') error("unexpected text after value");
    ++pos_;
    ++line_;
  }

  std::string simple_key() {
    if (peek() == '"') return basic_string();
    if (peek() == '\'') return literal_string();
    std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                      peek() == '-')) {
      ++pos_;
    }
    if (start == pos_) error("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<std::string> key_path() {
    std::vector<std::string> path{simple_key()};
    while (true) {
      skip_inline_ws();
      if (peek() != '.') break;
      ++pos_;
      skip_inline_ws();
      path.push_back(simple_key());
    }
    return path;
  }

  static std::string join(const std::vector<std::string>& path) {
    std::string out;
    for (const auto& p : path) out += (out.empty() ? "" : ".") + p;
    return out;
  }

  json* open_table(json& root, const std::vector<std::string>& path) {
    json* node = &root;
    for (std::size_t i = 0; i < path.size(); ++i) {
      json& child = (*node)[path[i]];
      if (child.is_null()) child = json::object();
      if (child.is_array() && !child.empty() && child.back().is_object()) {
        node = &child.back();
        continue;
      }
      if (!child.is_object()) error("'" + join(path) + "' is not a table");
      node = &child;
    }
    const std::string name = join(path);
    if (!defined_tables_.insert(name).second) error("table [" + name + "] defined twice");
    return node;
  }

  json* open_array_table(json& root, const std::vector<std::string>& path) {
    json* node = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      json& child = (*node)[path[i]];
      if (child.is_null()) child = json::object();
      if (child.is_array() && !child.empty() && child.back().is_object()) {
        node = &child.back();
        continue;
      }
      if (!child.is_object()) error("'" + join(path) + "' is not a table");
      node = &child;
    }
    json& arr = (*node)[path.back()];
    if (arr.is_null()) arr = json::array();
    if (!arr.is_array()) error("'" + join(path) + "' is not an array of tables");
    arr.push_back(json::object());
    // Sub-tables of the new element may be redefined.
    const std::string prefix = join(path) + ".";
    for (auto it = defined_tables_.begin(); it != defined_tables_.end();) {
      it = it->rfind(prefix, 0) == 0 ? defined_tables_.erase(it) : std::next(it);
    }
    return &arr.back();
  }

  void assign(json& table, const std::vector<std::string>& path, json value,
              const std::string& context) {
    json* node = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      json& child = (*node)[path[i]];
      if (child.is_null()) child = json::object();
      if (!child.is_object()) error("'" + path[i] + "' is not a table");
      node = &child;
    }
    if (node->contains(path.back())) {
      error("duplicate key '" + join(path) + "'" + (context.empty() ? "" : " in [" + context + "]"));
    }
    (*node)[path.back()] = std::move(value);
  }

  json parse_value() {
    char c = peek();
    if (c == '"') {
      if (s_.substr(pos_, 3) == "\"\"\"") error("multi-line strings are not supported");
      return basic_string();
    }
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    if (c == '{') return inline_table();
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return number();
  }

  std::string basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') error("unterminated string");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) error("unterminated escape");
      char e = s_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'u':
        case 'U': {
          std::size_t len = e == 'u' ? 4 : 8;
          if (pos_ + len > s_.size()) error("short unicode escape");
          std::uint32_t cp = 0;
          auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + pos_ + len, cp, 16);
          if (ec != std::errc() || p != s_.data() + pos_ + len) error("bad unicode escape");
          pos_ += len;
          utf8_append(out, static_cast<char32_t>(cp));
          break;
        }
        default: error(std::string("unknown escape \\") + e);
      }
    }
    return out;
  }

  std::string literal_string() {
    expect('\'');
    std::size_t start = pos_;
    while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
    if (peek() != '\'') error("unterminated literal string");
    std::string out(s_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  json array() {
    expect('[');
    json arr = json::array();
    while (true) {
      skip_ws_comments_newlines();
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(parse_value());
      skip_ws_comments_newlines();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect(']');
      return arr;
    }
  }

  json inline_table() {
    expect('{');
    json table = json::object();
    skip_inline_ws();
    if (peek() == '}') {
      ++pos_;
      return table;
    }
    while (true) {
      skip_inline_ws();
      auto path = key_path();
      skip_inline_ws();
      expect('=');
      skip_inline_ws();
      assign(table, path, parse_value(), "");
      skip_inline_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return table;
    }
  }

  json number() {
    std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' ||
                      peek() == '-' || peek() == '.' || peek() == '_')) {
      ++pos_;
    }
    std::string raw;
    for (char c : s_.substr(start, pos_ - start)) {
      if (c != '_') raw += c;
    }
    if (raw.empty()) error("expected a value");
    const bool is_float = raw.find_first_of(".eE") != std::string::npos &&
                          raw.rfind("0x", 0) != 0;
    const char* b = raw.data();
    const char* e = raw.data() + raw.size();
    if (*b == '+') ++b;
    if (is_float) {
      double d = 0;
      auto [p, ec] = std::from_chars(b, e, d);
      if (ec != std::errc() || p != e) error("bad number '" + raw + "'");
      return d;
    }
    std::int64_t v = 0;
    int base = 10;
    if (e - b > 2 && b[0] == '0' && (b[1] == 'x' || b[1] == 'o' || b[1] == 'b')) {
      base = b[1] == 'x' ? 16 : b[1] == 'o' ? 8 : 2;
      b += 2;
    }
    auto [p, ec] = std::from_chars(b, e, v, base);
    if (ec != std::errc() || p != e) error("bad value '" + raw + "'");
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::set<std::string> defined_tables_;
};

}  // namespace

nlohmann::ordered_json parse(std::string_view text) { return Parser(text).run(); }

}  // namespace attackmap::toml
