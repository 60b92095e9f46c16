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

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "refmail/spearmail/client.hpp"
#include "refmail/util/line_json.hpp"

namespace refmail::spearmail {

enum class Cue { kReciprocity, kConsistency, kSocialProof, kAuthority, kLiking, kScarcity };
inline constexpr std::size_t kCueCount = 6;
inline constexpr std::array<std::string_view, kCueCount> kCueNames = {
    "Reciprocity", "Consistency", "Social Proof", "Authority", "Liking", "Scarcity"};

struct PersuasionScore {
  std::array<int, kCueCount> scores{};  // each in 1..5
  std::vector<std::string> diagnostics;

  int operator[](Cue c) const { return scores[static_cast<std::size_t>(c)]; }
};

class PersuasionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string persuasion_prompt(std::string_view profile, std::string_view email);

// Six integers, by cue name when all six are labelled, otherwise the first
// six integers in the reply. Out-of-range values are clamped to 1..5 with a
// diagnostic. nullopt when fewer than six integers are present.
std::optional<PersuasionScore> parse_persuasion(std::string_view reply);

// Asks the judge up to 1 + retries times; throws PersuasionError when no
// reply parses.
PersuasionScore score_persuasion(std::string_view profile, std::string_view email,
                                 GenerationClient& judge, std::size_t retries = 2);

struct PersuasionSummary {
  std::size_t emails = 0;
  std::size_t failures = 0;
  std::array<double, kCueCount> mean{};
};

struct PersuasionComparison {
  PersuasionSummary generated;
  PersuasionSummary baseline;
};

PersuasionSummary summarize_persuasion(std::string_view profile, const std::vector<std::string>& emails,
                                       GenerationClient& judge, std::size_t retries = 2);

// Side-by-side per-cue means for a generated set and a generic fixture set.
PersuasionComparison compare_persuasion(std::string_view profile,
                                        const std::vector<std::string>& generated,
                                        const std::vector<std::string>& baseline,
                                        GenerationClient& judge, std::size_t retries = 2);

Json to_json(const PersuasionComparison& c);

}  // namespace refmail::spearmail
