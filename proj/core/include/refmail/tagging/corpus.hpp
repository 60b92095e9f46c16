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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "refmail/ingest/tokens.hpp"
#include "refmail/tagging/tags.hpp"

namespace refmail::tagging {

struct LabeledSample {
  std::vector<std::string> tokens;
  TagSequence tags;

  TokenSequence token_sequence() const { return tokens_from_words(tokens); }
  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

// JSON lines: {"tokens": [...], "tags": [...]}. Throws std::runtime_error
// naming the line on malformed input or length mismatch.
std::vector<LabeledSample> read_labeled_corpus(std::istream& in);
std::vector<LabeledSample> load_labeled_corpus(const std::filesystem::path& path);
void write_labeled_corpus(std::ostream& out, const std::vector<LabeledSample>& samples);

}  // namespace refmail::tagging
