// Copyright 2026 The refmail Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace refmail::ingest {
struct ParsedEmail;
}

namespace refmail {

enum class Field { kSubject, kFrom, kBody };

inline constexpr std::string_view kSubjectSentinel = "<SUBJECT>";
inline constexpr std::string_view kFromSentinel = "<FROM>";
inline constexpr std::string_view kBodySentinel = "<BODY>";

struct Token {
  std::string text;
  Field field = Field::kBody;
  bool sentinel = false;
  // Byte range in the field's source text; empty for sentinels.
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Tokens of one message plus the field texts they point into. Offsets are
// strictly increasing within a field.
struct TokenSequence {
  std::vector<Token> tokens;
  std::string subject;
  std::string from;
  std::string body;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  const Token& operator[](std::size_t i) const { return tokens[i]; }

  std::string_view field_text(Field f) const;
  std::vector<std::string> texts() const;

  // Source text covered by tokens [first, last] with the original separators.
  // Pieces from different fields (or sentinels) are joined with one space.
  std::string surface(std::size_t first, std::size_t last) const;
};

// Byte ranges of the tokens in `text`. Whitespace separates; punctuation is
// split off unless it joins word characters ("S&P", "e-mail", "don't");
// URLs and e-mail addresses stay whole.
std::vector<std::pair<std::size_t, std::size_t>> tokenize(std::string_view text);

bool is_url_token(std::string_view token);
bool is_word_token(std::string_view token);

// Subject, sender name and body, each preceded by its sentinel; empty fields
// contribute nothing. `max_body_tokens` of 0 means unlimited.
TokenSequence flatten_to_tokens(const ingest::ParsedEmail& email, std::size_t max_body_tokens = 0);

// Body-only sequence from pre-split words, joined by single spaces (used for
// labeled corpora).
TokenSequence tokens_from_words(const std::vector<std::string>& words);

}  // namespace refmail
