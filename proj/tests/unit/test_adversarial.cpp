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

#include <gtest/gtest.h>

#include "refmail/adversarial/mutators.hpp"
#include "refmail/adversarial/robustness.hpp"
#include "refmail/tagging/corpus.hpp"
#include "refmail/util/rng.hpp"
#include "refmail/util/text.hpp"
#include "test_support.hpp"

namespace refmail::adversarial {
namespace {

using tagging::EntityClass;

TEST(Mutators, Examples) {
  EXPECT_EQ(mutate_chars_at(CharMutation::kDelete, "paypal", 2).result, "papal");
  const auto rep = mutate_chars_at(CharMutation::kRepeat, "ieee", 1);
  EXPECT_EQ(rep.result, "ieeee");
  for (auto k : kAllCharMutations) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto m = mutate_chars(k, "paypal", seed);
      ASSERT_TRUE(m.applied);
      EXPECT_EQ(m.result.front(), 'p');
      EXPECT_EQ(m.result.back(), 'l');
      EXPECT_NE(m.result, "paypal");
    }
  }
}

TEST(Mutators, SwitchSwapsAdjacentInterior) {
  const auto m = mutate_chars_at(CharMutation::kSwitch, "paypal", 2);
  EXPECT_EQ(m.result, "papyal");
}

TEST(Mutators, ShortTextIsNoop) {
  for (auto k : kAllCharMutations) {
    const auto m = mutate_chars(k, "abc", 1);
    EXPECT_FALSE(m.applied);
    EXPECT_EQ(m.result, "abc");
    EXPECT_FALSE(m.note.empty());
  }
}

// Property: random strings, length delta by kind, ends preserved, pure in (input, seed).
TEST(Mutators, PropertyOverRandomStrings) {
  Rng rng(99);
  const std::u32string alphabet = U"abcdefghijklmnopqrstuvwxyzABC0123 éü中";
  for (int i = 0; i < 10000; ++i) {
    std::u32string s;
    const auto n = rng.uniform(12);
    for (std::size_t k = 0; k < n; ++k) s.push_back(alphabet[rng.uniform(alphabet.size())]);
    const std::string utf8 = text::encode_utf8(s);
    const auto kind = kAllCharMutations[rng.uniform(4)];
    const auto seed = rng.next();
    const auto m = mutate_chars(kind, utf8, seed);
    EXPECT_EQ(m.result, mutate_chars(kind, utf8, seed).result);
    const auto out = text::decode_utf8(m.result);
    if (!m.applied) {
      EXPECT_EQ(m.result, utf8);
      EXPECT_TRUE(eligible_positions(kind, s).empty());
      continue;
    }
    const long delta = static_cast<long>(out.size()) - static_cast<long>(s.size());
    const long want = kind == CharMutation::kDelete ? -1 : kind == CharMutation::kRepeat ? 1 : 0;
    EXPECT_EQ(delta, want);
    EXPECT_EQ(out.front(), s.front());
    EXPECT_EQ(out.back(), s.back());
    EXPECT_NE(out, s);
  }
}

TEST(ConcatSent, MergesSentenceBeforeAction) {
  const std::string body = "You have one unread message. View your message here.";
  const auto pos = body.find("View");
  const auto m = concat_sentence(body, {pos, pos + 22});
  ASSERT_TRUE(m.applied);
  EXPECT_EQ(m.result, "You have one unread message view your message here.");
  const auto again = concat_sentence(m.result, {m.result.find("view"), m.result.find("view") + 22});
  EXPECT_EQ(again.result, m.result);
  EXPECT_FALSE(again.applied);
}

TEST(ConcatSent, AtStartIsNoop) {
  const auto m = concat_sentence("View your message here.", {0, 4});
  EXPECT_FALSE(m.applied);
  EXPECT_EQ(m.result, "View your message here.");
}

SynonymTable table() { return SynonymTable::load(testing::data_dir() / "synonyms.json"); }

TEST(SynonymSwap, VisitBecomesView) {
  SynonymTable t;
  t.add("visit", {"view"});
  EXPECT_EQ(synonym_swap("visit the link", t, 0).result, "view the link");
  EXPECT_EQ(synonym_swap("Visit the link", t, 0).result, "View the link");
  const auto miss = synonym_swap("frobnicate the link", t, 0);
  EXPECT_FALSE(miss.applied);
  EXPECT_EQ(miss.result, "frobnicate the link");
}

TEST(SynonymSwap, SeededAndDrawnFromTable) {
  const auto t = table();
  ASSERT_GE(t.size(), 150u);
  const auto* syns = t.lookup("visit");
  ASSERT_NE(syns, nullptr);
  EXPECT_EQ(*syns, (std::vector<std::string>{"view", "check", "open"}));
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto a = synonym_swap("visit the link", t, s);
    EXPECT_EQ(a.result, synonym_swap("visit the link", t, s).result);
    const auto verb = a.result.substr(0, a.result.find(' '));
    EXPECT_NE(std::find(syns->begin(), syns->end(), verb), syns->end());
  }
}

// ---------------------------------------------------------------- rates

std::vector<tagging::LabeledSample> corpus() {
  return tagging::load_labeled_corpus(testing::data_dir() / "ner" / "corpus.jsonl");
}

SpanTagger baseline() {
  return [](const TokenSequence& t) { return testing::fixture_tagger().spans(t); };
}

TEST(Recognition, NoopMatchesClean) {
  const auto r = recognition_rate(baseline(), corpus(), EntityClass::kIdentity, noop_mutator(), 1);
  ASSERT_TRUE(r.clean && r.attacked);
  EXPECT_EQ(*r.clean, *r.attacked);
  EXPECT_EQ(*r.clean, 1.0);
}

TEST(Recognition, EmptyFeasibleSetIsUndefined) {
  const auto r = recognition_rate(baseline(), {}, EntityClass::kIdentity, noop_mutator(), 1);
  EXPECT_FALSE(r.clean);
  EXPECT_FALSE(r.attacked);
  EXPECT_TRUE(to_json(r)["clean_rate"].is_null());
}

// Bands measured once on the fixture corpus (seed 1) and frozen here.
TEST(Recognition, CharMutationBandsHold) {
  const auto c = corpus();
  for (auto k : kAllCharMutations) {
    const auto r = recognition_rate(baseline(), c, EntityClass::kIdentity, identity_char_mutator(k), 1);
    ASSERT_TRUE(r.attacked);
    EXPECT_GE(*r.attacked, 0.85) << to_string(k);
    EXPECT_LE(*r.attacked, *r.clean) << to_string(k);
  }
}

TEST(Recognition, SynonymSwapHurtsBaselineLexicon) {
  const auto r = recognition_rate(baseline(), corpus(), EntityClass::kAction,
                                  synonym_swap_mutator(table()), 1);
  ASSERT_TRUE(r.attacked);
  EXPECT_LT(*r.attacked, *r.clean);
}

TEST(Matching, NoAttackIsOne) {
  const auto r = matching_rate(*testing::fixture_matcher(), noop_alias_mutator(),
                               testing::calibrated_threshold(), 1);
  ASSERT_TRUE(r.rate);
  EXPECT_EQ(*r.rate, 1.0);
  EXPECT_GE(r.aliases, 1000u);
}

TEST(Matching, ExactOnlyAtThresholdOne) {
  // At threshold 1 only mutations that land on another alias of the same
  // identity (e.g. "Systems Administrator" -> "System Administrator") match.
  const auto& m = *testing::fixture_matcher();
  for (auto k : kAllCharMutations) {
    const auto mutate = char_alias_mutator(k);
    std::size_t exact = 0;
    std::uint64_t idx = 0;
    for (const auto& e : m.kb().entries())
      for (const auto& a : e.aliases) {
        const auto r = mutate(a, mix_seed(1, idx++));
        if (r && m.kb().resolve_alias(*r) == &e) ++exact;
      }
    const auto r = matching_rate(m, mutate, 1.0, 1);
    ASSERT_TRUE(r.rate);
    EXPECT_EQ(r.matched, exact) << to_string(k);
  }
}

}  // namespace
}  // namespace refmail::adversarial
