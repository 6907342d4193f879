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

#include "attackmap/grammar.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

#include "attackmap/error.hpp"
#include "attackmap/text.hpp"

namespace attackmap::grammar {

Symbol Symbol::lit(std::string text) {
  Symbol s;
  s.kind = Kind::kLiteral;
  s.literal = std::move(text);
  return s;
}

Symbol Symbol::ref(std::string name) {
  Symbol s;
  s.kind = Kind::kRule;
  s.rule = std::move(name);
  return s;
}

Symbol Symbol::repeat(std::string name, std::size_t min, std::size_t max) {
  Symbol s;
  s.kind = Kind::kRepeat;
  s.rule = std::move(name);
  s.min = min;
  s.max = max;
  return s;
}

Symbol Symbol::char_class(std::vector<CharRange> ranges, bool negated) {
  Symbol s;
  s.kind = Kind::kCharClass;
  s.ranges = std::move(ranges);
  s.negated = negated;
  return s;
}

const Rule* OutputGrammar::find(std::string_view name) const {
  for (const auto& r : rules) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

void OutputGrammar::validate() const {
  std::set<std::string_view> names;
  for (const auto& r : rules) {
    if (!names.insert(r.name).second) fail(ErrorKind::kIntegrity, "rule " + r.name + " defined twice");
  }
  if (!names.contains(start)) fail(ErrorKind::kIntegrity, "start rule " + start + " is undefined");
  for (const auto& r : rules) {
    if (r.alternatives.empty()) fail(ErrorKind::kIntegrity, "rule " + r.name + " has no alternatives");
    for (const auto& seq : r.alternatives) {
      for (const auto& s : seq) {
        if ((s.kind == Symbol::Kind::kRule || s.kind == Symbol::Kind::kRepeat) &&
            !names.contains(s.rule)) {
          fail(ErrorKind::kIntegrity, "rule " + r.name + " references undefined " + s.rule);
        }
        if (s.kind == Symbol::Kind::kRepeat && s.min > s.max) {
          fail(ErrorKind::kIntegrity, "rule " + r.name + " has an empty repetition range");
        }
      }
    }
  }
}

namespace {

std::string gbnf_char(char32_t c) {
  switch (c) {
    case '"': return "\\\"";
    case '\\': return "\\\\";
    case '[': return "\\[";
    case ']': return "\\]";
    case '-': return "\\-";
    case '^': return "\\^";
    case '\n': return "\\n";
    case '\r': return "\\r";
    case '\t': return "\\t";
    default: break;
  }
  if (c < 0x20 || c == 0x7F) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "\\x%02X", static_cast<unsigned>(c));
    return buf;
  }
  std::string out;
  utf8_append(out, c);
  return out;
}

std::string gbnf_literal(std::string_view text) {
  std::string out = "\"";
  for (char32_t c : utf8_decode(text)) {
    if (c == '[' || c == ']' || c == '-' || c == '^') utf8_append(out, c);
    else out += gbnf_char(c);
  }
  out += '"';
  return out;
}

std::string gbnf_name(std::string_view name, std::string_view start) {
  return name == start ? std::string("root") : std::string(name);
}

}  // namespace

std::string OutputGrammar::to_gbnf() const {
  std::string out;
  auto emit_rule = [&](const Rule& r) {
    out += gbnf_name(r.name, start) + " ::= ";
    for (std::size_t a = 0; a < r.alternatives.size(); ++a) {
      if (a > 0) out += " | ";
      const auto& seq = r.alternatives[a];
      if (seq.empty()) out += "\"\"";
      for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i > 0) out += ' ';
        const auto& s = seq[i];
        switch (s.kind) {
          case Symbol::Kind::kLiteral: out += gbnf_literal(s.literal); break;
          case Symbol::Kind::kRule: out += gbnf_name(s.rule, start); break;
          case Symbol::Kind::kRepeat:
            out += gbnf_name(s.rule, start) + "{" + std::to_string(s.min) + ",";
            if (s.max != kUnbounded) out += std::to_string(s.max);
            out += "}";
            break;
          case Symbol::Kind::kCharClass:
            out += s.negated ? "[^" : "[";
            for (const auto& range : s.ranges) {
              out += gbnf_char(range.lo);
              if (range.hi != range.lo) out += "-" + gbnf_char(range.hi);
            }
            out += "]";
            break;
        }
      }
    }
    out += "\n";
  };
  if (const Rule* root = find(start)) emit_rule(*root);
  for (const auto& r : rules) {
    if (r.name != start) emit_rule(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Schema compilation

namespace {

using ordered_json = nlohmann::ordered_json;

class SchemaCompiler {
 public:
  OutputGrammar compile(const ordered_json& schema) {
    grammar_.start = "root";
    compile_node(schema, "root", "$");
    grammar_.validate();
    return std::move(grammar_);
  }

 private:
  [[noreturn]] static void unsupported(const std::string& construct, const std::string& where) {
    fail(ErrorKind::kUnsupported, "unsupported schema construct '" + construct + "' at " + where);
  }

  static void allow_only(const ordered_json& node, std::initializer_list<std::string_view> keys,
                         const std::string& where) {
    for (const auto& [key, value] : node.items()) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) unsupported(key, where);
    }
  }

  static std::size_t bound(const ordered_json& node, const char* key, std::size_t fallback,
                           const std::string& where) {
    if (!node.contains(key)) return fallback;
    const auto& v = node[key];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      unsupported(std::string(key) + " (non-negative integer required)", where);
    }
    return v.get<std::size_t>();
  }

  void add(std::string name, std::vector<Sequence> alternatives) {
    grammar_.rules.push_back({std::move(name), std::move(alternatives)});
  }

  void ensure_string_chars() {
    if (string_rules_done_) return;
    string_rules_done_ = true;
    add("string-char",
        {{Symbol::char_class({{U'"', U'"'}, {U'\\', U'\\'}, {0, 0x1F}}, true)},
         {Symbol::lit("\\"), Symbol::ref("string-escape")}});
    add("string-escape",
        {{Symbol::char_class({{U'"', U'"'}, {U'\\', U'\\'}, {U'/', U'/'}, {U'b', U'b'},
                              {U'f', U'f'}, {U'n', U'n'}, {U'r', U'r'}, {U't', U't'}},
                             false)},
         {Symbol::lit("u"), Symbol::ref("hex"), Symbol::ref("hex"), Symbol::ref("hex"),
          Symbol::ref("hex")}});
    add("hex", {{Symbol::char_class({{U'0', U'9'}, {U'a', U'f'}, {U'A', U'F'}}, false)}});
  }

  void compile_node(const ordered_json& node, const std::string& name, const std::string& where) {
    if (!node.is_object()) unsupported("non-object schema", where);
    for (const char* combinator : {"oneOf", "anyOf", "allOf", "not", "$ref", "if", "const"}) {
      if (node.contains(combinator)) unsupported(combinator, where);
    }
    std::string type;
    if (node.contains("type")) {
      if (!node["type"].is_string()) unsupported("type union", where);
      type = node["type"].get<std::string>();
    } else if (node.contains("enum")) {
      type = "string";
    } else {
      unsupported("schema without type", where);
    }

    if (type == "object") compile_object(node, name, where);
    else if (type == "array") compile_array(node, name, where);
    else if (type == "string") compile_string(node, name, where);
    else if (type == "boolean") {
      allow_only(node, {"type", "title", "description"}, where);
      add(name, {{Symbol::lit("true")}, {Symbol::lit("false")}});
    } else {
      unsupported("type " + type, where);
    }
  }

  void compile_object(const ordered_json& node, const std::string& name, const std::string& where) {
    allow_only(node, {"type", "properties", "required", "additionalProperties", "title",
                      "description"},
               where);
    if (node.contains("additionalProperties") &&
        !(node["additionalProperties"].is_boolean() && !node["additionalProperties"].get<bool>())) {
      unsupported("additionalProperties", where);
    }
    static const ordered_json kEmpty = ordered_json::object();
    const ordered_json& props = node.contains("properties") ? node["properties"] : kEmpty;
    if (!props.is_object()) unsupported("properties (object required)", where);
    std::set<std::string> required;
    if (node.contains("required")) {
      for (const auto& r : node["required"]) required.insert(r.get<std::string>());
    }
    for (const auto& r : required) {
      if (!props.contains(r)) unsupported("required property '" + r + "' without a schema", where);
    }
    Sequence seq{Symbol::lit("{")};
    bool first = true;
    for (const auto& [key, sub] : props.items()) {
      if (!required.contains(key)) unsupported("optional property '" + key + "'", where);
      std::string child = name + "-" + sanitize(key);
      compile_node(sub, child, where + "." + key);
      seq.push_back(Symbol::lit((first ? "" : ",") + ordered_json(key).dump() + ":"));
      seq.push_back(Symbol::ref(child));
      first = false;
    }
    seq.push_back(Symbol::lit("}"));
    add(name, {seq});
  }

  void compile_array(const ordered_json& node, const std::string& name, const std::string& where) {
    allow_only(node, {"type", "items", "minItems", "maxItems", "title", "description"}, where);
    if (!node.contains("items")) unsupported("array without items", where);
    std::size_t lo = bound(node, "minItems", 0, where);
    std::size_t hi = bound(node, "maxItems", kUnbounded, where);
    if (lo > hi) unsupported("minItems > maxItems", where);
    if (hi == 0) {
      add(name, {{Symbol::lit("[]")}});
      return;
    }
    std::string item = name + "-item";
    std::string more = name + "-more";
    compile_node(node["items"], item, where + "[]");
    add(more, {{Symbol::lit(","), Symbol::ref(item)}});
    std::size_t more_lo = lo == 0 ? 0 : lo - 1;
    std::size_t more_hi = hi == kUnbounded ? kUnbounded : hi - 1;
    std::vector<Sequence> alts;
    if (lo == 0) alts.push_back({Symbol::lit("[]")});
    alts.push_back({Symbol::lit("["), Symbol::ref(item), Symbol::repeat(more, more_lo, more_hi),
                    Symbol::lit("]")});
    add(name, std::move(alts));
  }

  void compile_string(const ordered_json& node, const std::string& name, const std::string& where) {
    allow_only(node, {"type", "enum", "minLength", "maxLength", "title", "description"}, where);
    if (node.contains("enum")) {
      const auto& values = node["enum"];
      if (!values.is_array() || values.empty()) unsupported("empty enum", where);
      std::vector<Sequence> alts;
      for (const auto& v : values) {
        if (!v.is_string()) unsupported("non-string enum value", where);
        alts.push_back({Symbol::lit(v.dump())});
      }
      add(name, std::move(alts));
      return;
    }
    ensure_string_chars();
    std::size_t lo = bound(node, "minLength", 0, where);
    std::size_t hi = bound(node, "maxLength", kUnbounded, where);
    if (lo > hi) unsupported("minLength > maxLength", where);
    add(name, {{Symbol::lit("\""), Symbol::repeat("string-char", lo, hi), Symbol::lit("\"")}});
  }

  static std::string sanitize(std::string_view key) {
    std::string out;
    for (char c : key) {
      bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
      if (c >= 'A' && c <= 'Z') {
        out.push_back(static_cast<char>(c - 'A' + 'a'));
      } else {
        out.push_back(ok ? c : '-');
      }
    }
    return out;
  }

  OutputGrammar grammar_;
  bool string_rules_done_ = false;
};

}  // namespace

OutputGrammar schema_to_grammar(const nlohmann::ordered_json& schema) {
  return SchemaCompiler().compile(schema);
}

// ---------------------------------------------------------------------------
// Recognition

namespace {

class Matcher {
 public:
  Matcher(const OutputGrammar& g, std::vector<char32_t> input) : g_(g), input_(std::move(input)) {
    for (std::size_t i = 0; i < g_.rules.size(); ++i) index_[g_.rules[i].name] = i;
    for (const auto& r : g_.rules) {
      for (const auto& seq : r.alternatives) {
        for (const auto& s : seq) {
          if (s.kind == Symbol::Kind::kLiteral && !literal_cache_.contains(s.literal)) {
            literal_cache_[s.literal] = utf8_decode(s.literal);
          }
        }
      }
    }
  }

  bool run() {
    auto ends = match_rule(index_.at(g_.start), 0);
    return std::binary_search(ends.begin(), ends.end(), input_.size());
  }

 private:
  using Ends = std::vector<std::size_t>;  // sorted, unique

  static void merge_into(Ends& dst, const Ends& src) {
    Ends merged;
    std::set_union(dst.begin(), dst.end(), src.begin(), src.end(), std::back_inserter(merged));
    dst.swap(merged);
  }

  const Ends& match_rule(std::size_t rule, std::size_t pos) {
    auto key = rule * (input_.size() + 1) + pos;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    memo_[key] = {};  // guards against (unsupported) left recursion
    Ends result;
    for (const auto& seq : g_.rules[rule].alternatives) merge_into(result, match_sequence(seq, pos));
    auto& slot = memo_[key];
    slot = std::move(result);
    return slot;
  }

  Ends match_symbol(const Symbol& s, std::size_t pos) {
    switch (s.kind) {
      case Symbol::Kind::kLiteral: {
        const auto& lit = literal_cache_.at(s.literal);
        if (pos + lit.size() > input_.size()) return {};
        if (!std::equal(lit.begin(), lit.end(), input_.begin() + static_cast<std::ptrdiff_t>(pos))) {
          return {};
        }
        return {pos + lit.size()};
      }
      case Symbol::Kind::kCharClass: {
        if (pos >= input_.size()) return {};
        char32_t c = input_[pos];
        bool in = std::any_of(s.ranges.begin(), s.ranges.end(),
                              [c](const CharRange& r) { return c >= r.lo && c <= r.hi; });
        if (in == s.negated) return {};
        return {pos + 1};
      }
      case Symbol::Kind::kRule:
        return match_rule(index_.at(s.rule), pos);
      case Symbol::Kind::kRepeat: {
        std::size_t rule = index_.at(s.rule);
        Ends result;
        Ends frontier{pos};
        std::set<std::size_t> seen{pos};
        if (s.min == 0) result.push_back(pos);
        for (std::size_t count = 1; count <= s.max && !frontier.empty(); ++count) {
          Ends next;
          for (std::size_t p : frontier) merge_into(next, match_rule(rule, p));
          Ends fresh;
          for (std::size_t p : next) {
            // Beyond the minimum, a position reached before adds nothing new.
            if (count <= s.min || seen.insert(p).second) fresh.push_back(p);
          }
          frontier.swap(fresh);
          if (count >= s.min) merge_into(result, frontier);
        }
        return result;
      }
    }
    return {};
  }

  Ends match_sequence(const Sequence& seq, std::size_t pos) {
    Ends current{pos};
    for (const auto& s : seq) {
      Ends next;
      for (std::size_t p : current) merge_into(next, match_symbol(s, p));
      current.swap(next);
      if (current.empty()) break;
    }
    return current;
  }

  const OutputGrammar& g_;
  std::vector<char32_t> input_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::vector<char32_t>> literal_cache_;
  std::unordered_map<std::size_t, Ends> memo_;
};

}  // namespace

Recognizer::Recognizer(OutputGrammar grammar) : grammar_(std::move(grammar)) { grammar_.validate(); }

bool Recognizer::accepts(std::string_view text) const {
  return Matcher(grammar_, utf8_decode(text)).run();
}

}  // namespace attackmap::grammar
