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
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refmail::adversarial {

enum class CharMutation : std::uint8_t { kDelete, kReplace, kSwitch, kRepeat };
enum class MutationKind : std::uint8_t {
  kDelete,
  kReplace,
  kSwitch,
  kRepeat,
  kConcatSent,
  kSynonymSwap
};

inline constexpr CharMutation kAllCharMutations[] = {
    CharMutation::kDelete, CharMutation::kReplace, CharMutation::kSwitch, CharMutation::kRepeat};

std::string_view to_string(CharMutation kind);
std::string_view to_string(MutationKind kind);
std::optional<CharMutation> parse_char_mutation(std::string_view name);
MutationKind as_kind(CharMutation kind);

// Byte range [begin, end) in the text being mutated.
struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Mutation {
  MutationKind kind = MutationKind::kDelete;
  ByteSpan target;
  std::uint64_t seed = 0;
  std::string result;
  bool applied = false;  // false: no eligible position, result == input
  std::string note;      // reason when not applied
};

// Interior code-point positions where `kind` may act. For switch the index is
// the left element of the swapped pair. Empty when the text has < 4 code points.
std::vector<std::size_t> eligible_positions(CharMutation kind, std::u32string_view text);

// One edit at a seeded-uniform eligible position. Target is the whole text.
Mutation mutate_chars(CharMutation kind, std::string_view text, std::uint64_t seed);

// Edit at a given code-point position (must be eligible). For replace,
// `replacement` of 0 draws a letter from `seed`.
Mutation mutate_chars_at(CharMutation kind, std::string_view text, std::size_t position,
                         char32_t replacement = 0, std::uint64_t seed = 0);

// Removes the sentence terminator before `action` and lowers the following
// capital. No-op when nothing but whitespace/terminators precede the span.
Mutation concat_sentence(std::string_view body, ByteSpan action);

// verb -> synonyms; keys and values are lowercase.
class SynonymTable {
 public:
  SynonymTable() = default;
  static SynonymTable load(const std::filesystem::path& path);
  static SynonymTable from_json_text(std::string_view json_text);

  void add(std::string_view verb, std::vector<std::string> synonyms);
  const std::vector<std::string>* lookup(std::string_view verb) const;  // case-insensitive
  std::size_t size() const { return table_.size(); }
  const std::map<std::string, std::vector<std::string>>& entries() const { return table_; }
  // Every verb appearing as a key or a value.
  std::vector<std::string> vocabulary() const;

 private:
  std::map<std::string, std::vector<std::string>> table_;
};

// Replaces the span's first word with a seeded synonym, keeping its
// capitalization. Target is the whole text.
Mutation synonym_swap(std::string_view action_text, const SynonymTable& table, std::uint64_t seed);

// Byte range of the head verb of an action phrase (first word token).
std::optional<ByteSpan> head_verb(std::string_view action_text);

}  // namespace refmail::adversarial
