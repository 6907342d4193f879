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

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace attackmap::grammar {

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

struct CharRange {
  char32_t lo;
  char32_t hi;
};

// One element of a production. Bounded repetition is kept as a single symbol
// (GBNF `x{m,n}`) instead of being unrolled into hundreds of rules.
struct Symbol {
  enum class Kind { kLiteral, kCharClass, kRule, kRepeat };

  Kind kind = Kind::kLiteral;
  std::string literal;            // kLiteral, UTF-8
  std::vector<CharRange> ranges;  // kCharClass
  bool negated = false;           // kCharClass
  std::string rule;               // kRule, kRepeat
  std::size_t min = 0;            // kRepeat
  std::size_t max = 0;            // kRepeat; kUnbounded for no upper bound

  static Symbol lit(std::string text);
  static Symbol ref(std::string name);
  static Symbol repeat(std::string name, std::size_t min, std::size_t max);
  static Symbol char_class(std::vector<CharRange> ranges, bool negated);
};

using Sequence = std::vector<Symbol>;

struct Rule {
  std::string name;
  std::vector<Sequence> alternatives;
};

// Context-free grammar in BNF form with a designated start rule.
class OutputGrammar {
 public:
  std::vector<Rule> rules;
  std::string start;

  const Rule* find(std::string_view name) const;

  // Every referenced nonterminal is defined, names are unique and the start
  // rule exists; throws Error(kIntegrity) otherwise.
  void validate() const;

  // llama.cpp GBNF text, start rule emitted as `root`.
  std::string to_gbnf() const;
};

// Compiles a JSON-schema subset (objects whose properties are all required,
// arrays with optional minItems/maxItems, string enums, strings with optional
// minLength/maxLength, booleans) into a grammar whose language is the set of
// minified JSON texts valid under the schema, object keys in schema order.
// Anything else raises Error(kUnsupported) naming the construct.
OutputGrammar schema_to_grammar(const nlohmann::ordered_json& schema);

// Memoized recognizer over Unicode code points. Works for any grammar
// without left recursion (everything schema_to_grammar emits).
class Recognizer {
 public:
  explicit Recognizer(OutputGrammar grammar);
  bool accepts(std::string_view text) const;

 private:
  OutputGrammar grammar_;
};

}  // namespace attackmap::grammar
