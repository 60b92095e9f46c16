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
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "refmail/ingest/tokens.hpp"
#include "refmail/tagging/tags.hpp"

namespace refmail::tagging {

// Imperative verbs and the objects that turn them into a call to action.
struct ActionLexicon {
  std::unordered_set<std::string> verbs;    // folded
  std::unordered_set<std::string> objects;  // folded
  std::size_t window = 4;                   // max tokens between verb and object
  bool url_is_object = true;

  // {"verbs": [...], "objects": [...], "window": 4}
  static ActionLexicon load(const std::filesystem::path& path);
  static ActionLexicon from_json_text(std::string_view json_text);
  static ActionLexicon defaults();
};

// Identity aliases, matched token-wise after folding. Tokens of at least
// `fuzzy_min_chars` code points also match within Damerau-Levenshtein 1.
class Gazetteer {
 public:
  Gazetteer() = default;

  // One alias per line; blank lines and lines starting with '#' are skipped.
  static Gazetteer load(const std::filesystem::path& path);

  void add(std::string_view alias);
  std::size_t size() const { return aliases_.size(); }

  // Fuzzy candidates among gazetteer tokens for a folded text token.
  std::vector<std::string> fuzzy_candidates(const std::string& folded, std::size_t min_chars) const;

  const std::vector<std::vector<std::string>>& aliases() const { return aliases_; }
  const std::vector<std::size_t>* starting_with(const std::string& folded_token) const;

 private:
  void index_token(const std::string& token);

  std::vector<std::vector<std::string>> aliases_;  // folded tokens
  std::unordered_set<std::string> seen_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_first_;
  std::unordered_set<std::string> tokens_;
  std::unordered_map<std::string, std::vector<std::string>> deletes_;  // 1-deletion index
};

struct BaselineOptions {
  bool fuzzy = true;
  std::size_t fuzzy_min_chars = 6;
};

// Deterministic rule tagger: longest gazetteer match for identities, verb +
// object window for actions. Spans never cross field boundaries.
class BaselineTagger {
 public:
  BaselineTagger(Gazetteer gazetteer, ActionLexicon lexicon, BaselineOptions options = {});

  // Spans of both classes, sorted by start; identity and action spans may
  // overlap each other but never overlap within a class.
  std::vector<EntitySpan> spans(const TokenSequence& tokens) const;

  // Single tag sequence; identity tags take precedence where the classes overlap.
  TagSequence tag(const TokenSequence& tokens) const;

  const Gazetteer& gazetteer() const { return gazetteer_; }
  const ActionLexicon& lexicon() const { return lexicon_; }

 private:
  std::vector<EntitySpan> identity_spans(const TokenSequence& tokens) const;
  std::vector<EntitySpan> action_spans(const TokenSequence& tokens) const;

  Gazetteer gazetteer_;
  ActionLexicon lexicon_;
  BaselineOptions options_;
};

// Restricted Damerau-Levenshtein distance over code points, capped at limit+1.
std::size_t damerau_levenshtein(std::u32string_view a, std::u32string_view b, std::size_t limit);

}  // namespace refmail::tagging
