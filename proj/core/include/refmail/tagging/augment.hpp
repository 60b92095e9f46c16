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
#include <vector>

#include "refmail/adversarial/mutators.hpp"
#include "refmail/tagging/corpus.hpp"

namespace refmail::tagging {

struct AugmentOptions {
  // Chance that a sample's identity spans get one character typo each.
  double identity_mutation_prob = 1.0;
  // Chance that a sample's first action span has its head verb swapped.
  double action_paraphrase_prob = 0.5;
};

struct AugmentStats {
  std::size_t samples = 0;
  std::size_t identity_spans = 0;
  std::size_t identity_mutated = 0;
  std::size_t action_eligible = 0;    // samples whose action head verb has synonyms
  std::size_t action_paraphrased = 0;
};

struct AugmentResult {
  std::vector<LabeledSample> samples;
  AugmentStats stats;
};

// Label-preserving perturbation of each sample. Every identity span gets a
// typo on one of its tokens (>= 4 code points) with a seeded mutation kind;
// the tag layout never changes because edits stay inside a token. Deterministic
// in (samples, synonyms, seed, options).
AugmentResult augment_identity_mutations(const std::vector<LabeledSample>& samples,
                                         const adversarial::SynonymTable& synonyms,
                                         std::uint64_t seed, AugmentOptions options = {});

}  // namespace refmail::tagging
