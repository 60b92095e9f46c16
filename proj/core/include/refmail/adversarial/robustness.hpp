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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "refmail/adversarial/mutators.hpp"
#include "refmail/identity/matcher.hpp"
#include "refmail/tagging/corpus.hpp"
#include "refmail/util/line_json.hpp"

namespace refmail::adversarial {

using SpanTagger = std::function<std::vector<tagging::EntitySpan>(const TokenSequence&)>;

// Mutated copy of a labeled sample, or nullopt when the attack is infeasible
// on it (no target span, no eligible position, verb without synonyms, ...).
using SampleMutator =
    std::function<std::optional<tagging::LabeledSample>(const tagging::LabeledSample&, std::uint64_t seed)>;

struct RecognitionRates {
  std::string mutator;
  std::size_t samples = 0;
  std::size_t feasible = 0;
  std::size_t entities = 0;  // gold target spans over the feasible samples
  std::optional<double> clean;     // undefined when nothing is feasible
  std::optional<double> attacked;
};

// A gold span counts as recognized when a predicted span of the same class
// overlaps it. Both rates are over the feasible samples only.
RecognitionRates recognition_rate(const SpanTagger& tagger,
                                  const std::vector<tagging::LabeledSample>& samples,
                                  tagging::EntityClass target, const SampleMutator& mutator,
                                  std::uint64_t seed, std::string name = {});

SampleMutator noop_mutator();
// One character edit inside every identity span (first eligible-length token
// chosen by seed). Infeasible when no identity token has >= 4 code points.
SampleMutator identity_char_mutator(CharMutation kind);
// Drops the terminator token before the first action span and lowercases
// the span's first character.
SampleMutator concat_sent_mutator();
// Swaps the head verb of the first action span.
SampleMutator synonym_swap_mutator(const SynonymTable& table);

using AliasMutator = std::function<std::optional<std::string>(std::string_view alias, std::uint64_t seed)>;

struct MatchingRate {
  std::string mutator;
  std::size_t aliases = 0;
  std::size_t feasible = 0;
  std::size_t matched = 0;
  std::optional<double> rate;
};

// Fraction of aliases whose mutated form still accepts the alias's own
// identity at `threshold`.
MatchingRate matching_rate(const identity::IdentityMatcher& matcher, const AliasMutator& mutator,
                           double threshold, std::uint64_t seed,
                           std::string name = {});

AliasMutator noop_alias_mutator();
AliasMutator char_alias_mutator(CharMutation kind);

Json to_json(const RecognitionRates& r);
Json to_json(const MatchingRate& r);

}  // namespace refmail::adversarial
