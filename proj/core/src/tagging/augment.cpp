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

#include "refmail/tagging/augment.hpp"

#include "refmail/util/rng.hpp"
#include "refmail/util/text.hpp"

namespace refmail::tagging {

using adversarial::CharMutation;

AugmentResult augment_identity_mutations(const std::vector<LabeledSample>& samples,
                                         const adversarial::SynonymTable& synonyms,
                                         std::uint64_t seed, AugmentOptions options) {
  AugmentResult r;
  r.samples.reserve(samples.size());
  for (std::size_t idx = 0; idx < samples.size(); ++idx) {
    LabeledSample s = samples[idx];
    Rng rng(mix_seed(seed, idx));
    const auto spans = decode_spans(s.tags);

    const bool mutate_ids = rng.bernoulli(options.identity_mutation_prob);
    for (const auto& span : spans) {
      if (span.cls != EntityClass::kIdentity) continue;
      ++r.stats.identity_spans;
      if (!mutate_ids) continue;
      std::vector<std::size_t> candidates;
      for (std::size_t t = span.start_token; t <= span.end_token; ++t)
        if (is_word_token(s.tokens[t]) && text::decode_utf8(s.tokens[t]).size() >= 4)
          candidates.push_back(t);
      if (candidates.empty()) continue;
      const std::size_t t = candidates[rng.uniform(candidates.size())];
      const auto kind = adversarial::kAllCharMutations[rng.uniform(4)];
      auto m = adversarial::mutate_chars(kind, s.tokens[t], rng.next());
      if (!m.applied) continue;
      s.tokens[t] = std::move(m.result);
      ++r.stats.identity_mutated;
    }

    for (const auto& span : spans) {
      if (span.cls != EntityClass::kAction) continue;
      if (!synonyms.lookup(s.tokens[span.start_token])) break;
      ++r.stats.action_eligible;
      if (rng.bernoulli(options.action_paraphrase_prob)) {
        auto m = adversarial::synonym_swap(s.tokens[span.start_token], synonyms, rng.next());
        if (m.applied) {
          s.tokens[span.start_token] = std::move(m.result);
          ++r.stats.action_paraphrased;
        }
      }
      break;
    }

    r.samples.push_back(std::move(s));
  }
  r.stats.samples = samples.size();
  return r;
}

}  // namespace refmail::tagging
