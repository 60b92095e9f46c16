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

#include "refmail/adversarial/robustness.hpp"

#include "refmail/util/rng.hpp"
#include "refmail/util/text.hpp"

namespace refmail::adversarial {

using tagging::EntityClass;
using tagging::EntitySpan;
using tagging::LabeledSample;

namespace {

std::size_t count_recognized(const std::vector<EntitySpan>& gold, const std::vector<EntitySpan>& pred,
                             EntityClass target) {
  std::size_t hits = 0;
  for (const auto& g : gold) {
    if (g.cls != target) continue;
    for (const auto& p : pred) {
      if (p.cls == target && p.start_token <= g.end_token && g.start_token <= p.end_token) {
        ++hits;
        break;
      }
    }
  }
  return hits;
}

std::optional<std::size_t> first_span(const LabeledSample& s, EntityClass cls, std::size_t* end) {
  for (const auto& sp : tagging::decode_spans(s.tags)) {
    if (sp.cls == cls) {
      if (end) *end = sp.end_token;
      return sp.start_token;
    }
  }
  return std::nullopt;
}

Json opt(const std::optional<double>& d) { return d ? Json(*d) : Json(nullptr); }

}  // namespace

RecognitionRates recognition_rate(const SpanTagger& tagger, const std::vector<LabeledSample>& samples,
                                  EntityClass target, const SampleMutator& mutator,
                                  std::uint64_t seed, std::string name) {
  RecognitionRates r;
  r.mutator = std::move(name);
  r.samples = samples.size();
  std::size_t clean_hits = 0, attacked_hits = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const auto gold = tagging::decode_spans(s.tags);
    std::size_t n_target = 0;
    for (const auto& g : gold) n_target += g.cls == target ? 1 : 0;
    if (n_target == 0) continue;
    auto mutated = mutator(s, mix_seed(seed, i));
    if (!mutated) continue;
    ++r.feasible;
    r.entities += n_target;
    clean_hits += count_recognized(gold, tagger(s.token_sequence()), target);
    const auto mgold = tagging::decode_spans(mutated->tags);
    attacked_hits += count_recognized(mgold, tagger(mutated->token_sequence()), target);
  }
  if (r.entities > 0) {
    r.clean = static_cast<double>(clean_hits) / r.entities;
    r.attacked = static_cast<double>(attacked_hits) / r.entities;
  }
  return r;
}

SampleMutator noop_mutator() {
  return [](const LabeledSample& s, std::uint64_t) { return std::optional<LabeledSample>(s); };
}

SampleMutator identity_char_mutator(CharMutation kind) {
  return [kind](const LabeledSample& s, std::uint64_t seed) -> std::optional<LabeledSample> {
    LabeledSample out = s;
    Rng rng(seed);
    bool any = false;
    for (const auto& sp : tagging::decode_spans(s.tags)) {
      if (sp.cls != EntityClass::kIdentity) continue;
      std::vector<std::size_t> cands;
      for (std::size_t t = sp.start_token; t <= sp.end_token; ++t)
        if (!eligible_positions(kind, text::decode_utf8(s.tokens[t])).empty()) cands.push_back(t);
      if (cands.empty()) continue;
      const std::size_t t = cands[rng.uniform(cands.size())];
      auto m = mutate_chars(kind, s.tokens[t], rng.next());
      if (!m.applied) continue;
      out.tokens[t] = std::move(m.result);
      any = true;
    }
    if (!any) return std::nullopt;
    return out;
  };
}

SampleMutator concat_sent_mutator() {
  return [](const LabeledSample& s, std::uint64_t) -> std::optional<LabeledSample> {
    const auto start = first_span(s, EntityClass::kAction, nullptr);
    if (!start || *start < 2) return std::nullopt;
    const auto& prev = s.tokens[*start - 1];
    if (prev != "." && prev != "!" && prev != "?") return std::nullopt;
    LabeledSample out = s;
    out.tokens.erase(out.tokens.begin() + static_cast<std::ptrdiff_t>(*start - 1));
    out.tags.erase(out.tags.begin() + static_cast<std::ptrdiff_t>(*start - 1));
    auto& head = out.tokens[*start - 1];
    if (!head.empty() && head[0] >= 'A' && head[0] <= 'Z') head[0] = static_cast<char>(head[0] + 32);
    return out;
  };
}

SampleMutator synonym_swap_mutator(const SynonymTable& table) {
  return [&table](const LabeledSample& s, std::uint64_t seed) -> std::optional<LabeledSample> {
    const auto start = first_span(s, EntityClass::kAction, nullptr);
    if (!start) return std::nullopt;
    auto m = synonym_swap(s.tokens[*start], table, seed);
    if (!m.applied) return std::nullopt;
    LabeledSample out = s;
    out.tokens[*start] = std::move(m.result);
    return out;
  };
}

MatchingRate matching_rate(const identity::IdentityMatcher& matcher, const AliasMutator& mutator,
                           double threshold, std::uint64_t seed, std::string name) {
  MatchingRate r;
  r.mutator = std::move(name);
  std::uint64_t k = 0;
  for (const auto& e : matcher.kb().entries()) {
    for (const auto& alias : e.aliases) {
      ++r.aliases;
      auto mutated = mutator(alias, mix_seed(seed, k++));
      if (!mutated) continue;
      ++r.feasible;
      const auto m = matcher.match(*mutated, threshold, {1});
      for (const auto& a : m.accepted) {
        if (a.identity_id == e.id) {
          ++r.matched;
          break;
        }
      }
    }
  }
  if (r.feasible > 0) r.rate = static_cast<double>(r.matched) / r.feasible;
  return r;
}

AliasMutator noop_alias_mutator() {
  return [](std::string_view a, std::uint64_t) { return std::optional<std::string>(std::string(a)); };
}

AliasMutator char_alias_mutator(CharMutation kind) {
  return [kind](std::string_view a, std::uint64_t seed) -> std::optional<std::string> {
    auto m = mutate_chars(kind, a, seed);
    if (!m.applied) return std::nullopt;
    return m.result;
  };
}

Json to_json(const RecognitionRates& r) {
  return {{"mutator", r.mutator}, {"samples", r.samples}, {"feasible", r.feasible},
          {"entities", r.entities}, {"clean_rate", opt(r.clean)}, {"attacked_rate", opt(r.attacked)}};
}

Json to_json(const MatchingRate& r) {
  return {{"mutator", r.mutator}, {"aliases", r.aliases}, {"feasible", r.feasible},
          {"matched", r.matched}, {"rate", opt(r.rate)}};
}

}  // namespace refmail::adversarial
