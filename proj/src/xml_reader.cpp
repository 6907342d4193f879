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

#include "attackmap/xml_reader.hpp"

#include <array>
#include <cctype>

#include "attackmap/error.hpp"
#include "attackmap/text.hpp"

namespace attackmap::xml {

std::string_view Node::local_name() const {
  std::string_view n = name;
  auto colon = n.find(':');
  return colon == std::string_view::npos ? n : n.substr(colon + 1);
}

std::optional<std::string_view> Node::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return std::string_view(v);
  }
  return std::nullopt;
}

const Node* Node::child(std::string_view local) const {
  for (const auto& c : children) {
    if (!c.is_text() && c.local_name() == local) return &c;
  }
  return nullptr;
}

std::vector<const Node*> Node::children_named(std::string_view local) const {
  std::vector<const Node*> out;
  for (const auto& c : children) {
    if (!c.is_text() && c.local_name() == local) out.push_back(&c);
  }
  return out;
}

namespace {

bool is_block(std::string_view local) {
  static constexpr std::array<std::string_view, 14> kBlocks = {
      "p", "div", "br", "li", "ul", "ol", "table", "tr", "td", "th",
      "h1", "h2", "h3", "blockquote"};
  for (auto b : kBlocks) {
    if (b == local) return true;
  }
  return false;
}

void collect_text(const Node& node, std::string& out) {
  for (const auto& c : node.children) {
    if (c.is_text()) {
      out += c.text;
      continue;
    }
    bool block = is_block(c.local_name());
    if (block) out.push_back(' ');
    collect_text(c, out);
    if (block) out.push_back(' ');
  }
}

class Parser {
 public:
  explicit Parser(std::string_view doc) : doc_(doc) {}

  Node parse_document() {
    skip_prolog();
    if (at_end() || peek() != '<') error("expected root element");
    Node root = parse_element();
    skip_misc();
    if (!at_end()) error("content after root element");
    return root;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::kParse, "line " + std::to_string(line_) + ": " + what);
  }

  bool at_end() const { return pos_ >= doc_.size(); }
  char peek() const { return doc_[pos_]; }
  bool starts_with(std::string_view s) const {
    return doc_.substr(pos_, s.size()) == s;
  }
  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < doc_.size(); ++i) {
      if (doc_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }
  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' ||
                         peek() == '\r')) {
      advance();
    }
  }
  void skip_until(std::string_view terminator, const char* what) {
    while (!at_end() && !starts_with(terminator)) advance();
    if (at_end()) error(std::string("unterminated ") + what);
    advance(terminator.size());
  }

  void skip_doctype() {
    // DOCTYPE may carry an internal subset in brackets.
    int depth = 0;
    while (!at_end()) {
      char c = peek();
      if (c == '[') ++depth;
      else if (c == ']') --depth;
      else if (c == '>' && depth == 0) {
        advance();
        return;
      }
      advance();
    }
    error("unterminated DOCTYPE");
  }

  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<?")) skip_until("?>", "processing instruction");
      else if (starts_with("<!--")) skip_until("-->", "comment");
      else return;
    }
  }

  void skip_prolog() {
    if (starts_with("\xEF\xBB\xBF")) advance(3);
    for (;;) {
      skip_misc();
      if (starts_with("<!DOCTYPE")) skip_doctype();
      else return;
    }
  }

  static bool is_name_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == ':' || c == '-' || c == '.' || u >= 0x80;
  }

  std::string parse_name() {
    std::size_t start = pos_;
    while (!at_end() && is_name_char(peek())) advance();
    if (start == pos_) error("expected a name");
    return std::string(doc_.substr(start, pos_ - start));
  }

  void decode_entity(std::string& out) {
    // positioned at '&'
    std::size_t semi = doc_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) error("bad entity reference");
    std::string_view ent = doc_.substr(pos_ + 1, semi - pos_ - 1);
    if (ent == "lt") out.push_back('<');
    else if (ent == "gt") out.push_back('>');
    else if (ent == "amp") out.push_back('&');
    else if (ent == "quot") out.push_back('"');
    else if (ent == "apos") out.push_back('\'');
    else if (ent == "nbsp") out.push_back(' ');
    else if (!ent.empty() && ent[0] == '#') {
      unsigned long cp = 0;
      bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
      std::string_view digits = ent.substr(hex ? 2 : 1);
      if (digits.empty()) error("bad character reference");
      for (char c : digits) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else error("bad character reference");
        cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(d);
        if (cp > 0x10FFFF) error("character reference out of range");
      }
      utf8_append(out, static_cast<char32_t>(cp));
    } else {
      error("unknown entity &" + std::string(ent) + ";");
    }
    advance(semi - pos_ + 1);
  }

  std::string parse_attribute_value() {
    if (at_end() || (peek() != '"' && peek() != '\'')) error("expected quoted attribute value");
    char quote = peek();
    advance();
    std::string value;
    while (!at_end() && peek() != quote) {
      if (peek() == '&') decode_entity(value);
      else if (peek() == '<') error("'<' in attribute value");
      else {
        value.push_back(peek());
        advance();
      }
    }
    if (at_end()) error("unterminated attribute value");
    advance();
    return value;
  }

  Node parse_element() {
    Node node;
    node.line = line_;
    advance();  // '<'
    node.name = parse_name();
    for (;;) {
      skip_ws();
      if (at_end()) error("unterminated start tag <" + node.name + ">");
      if (starts_with("/>")) {
        advance(2);
        return node;
      }
      if (peek() == '>') {
        advance();
        break;
      }
      std::string key = parse_name();
      skip_ws();
      if (at_end() || peek() != '=') error("expected '=' after attribute " + key);
      advance();
      skip_ws();
      node.attributes.emplace_back(std::move(key), parse_attribute_value());
    }
    parse_content(node);
    return node;
  }

  void flush_text(Node& parent, std::string& text, int line) {
    if (text.empty()) return;
    Node t;
    t.text = std::move(text);
    t.line = line;
    parent.children.push_back(std::move(t));
    text.clear();
  }

  void parse_content(Node& node) {
    std::string text;
    int text_line = line_;
    for (;;) {
      if (at_end()) error("element <" + node.name + "> not closed");
      if (starts_with("</")) {
        flush_text(node, text, text_line);
        advance(2);
        std::string closing = parse_name();
        if (closing != node.name) {
          error("mismatched closing tag </" + closing + "> for <" + node.name + ">");
        }
        skip_ws();
        if (at_end() || peek() != '>') error("expected '>'");
        advance();
        return;
      }
      if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<![CDATA[")) {
        advance(9);
        std::size_t end = doc_.find("]]>", pos_);
        if (end == std::string_view::npos) error("unterminated CDATA section");
        if (text.empty()) text_line = line_;
        text += doc_.substr(pos_, end - pos_);
        advance(end - pos_ + 3);
      } else if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (peek() == '<') {
        flush_text(node, text, text_line);
        node.children.push_back(parse_element());
      } else if (peek() == '&') {
        if (text.empty()) text_line = line_;
        decode_entity(text);
      } else {
        if (text.empty()) text_line = line_;
        text.push_back(peek());
        advance();
      }
    }
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

std::string Node::text_content() const {
  std::string out;
  collect_text(*this, out);
  return out;
}

Node parse(std::string_view document) { return Parser(document).parse_document(); }

}  // namespace attackmap::xml
