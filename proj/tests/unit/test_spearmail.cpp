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

#include <regex>

#include "refmail/ingest/mailbox.hpp"
#include "refmail/spearmail/generator.hpp"
#include "refmail/spearmail/persuasion.hpp"
#include "refmail/spearmail/prompts.hpp"
#include "test_support.hpp"

namespace refmail::spearmail {
namespace {

// Records every prompt on its way to the mock.
class Recording final : public GenerationClient {
 public:
  explicit Recording(std::uint64_t seed = 7) : inner_(seed) {}
  std::string generate(std::string_view prompt) override {
    prompts.emplace_back(prompt);
    return inner_.generate(prompt);
  }
  std::vector<std::string> prompts;

 private:
  MockGenerationClient inner_;
};

class Failing final : public GenerationClient {
 public:
  std::string generate(std::string_view) override {
    ++calls;
    throw GenerationError("backend unavailable");
  }
  int calls = 0;
};

class Canned final : public GenerationClient {
 public:
  explicit Canned(std::string reply) : reply_(std::move(reply)) {}
  std::string generate(std::string_view) override { return reply_; }

 private:
  std::string reply_;
};

std::string profile() { return testing::read_file(testing::data_dir() / "spearmail" / "profile.txt"); }

TEST(Spearmail, DefaultShapeYieldsThirtyEmails) {
  Recording client;
  const auto plan = generate_plan({profile(), 6, 5}, client);
  EXPECT_TRUE(plan.complete());
  EXPECT_EQ(plan.interests.size(), 6u);
  EXPECT_EQ(plan.emails.size(), 30u);
  for (std::size_t k = 0; k < plan.emails.size(); ++k) {
    EXPECT_EQ(plan.emails[k].interest_index, k / 5);
    EXPECT_EQ(plan.emails[k].activity_index, k % 5);
    EXPECT_TRUE(plan.emails[k].ok);
  }
  // 1 interest call, 6 activity calls, 30 email calls.
  EXPECT_EQ(client.prompts.size(), 37u);
}

TEST(Spearmail, CardinalityGrid) {
  for (std::size_t m = 1; m <= 8; ++m)
    for (std::size_t n = 1; n <= 8; ++n) {
      Recording client(m * 31 + n);
      const auto plan = generate_plan({"Researcher in databases; runs marathons.", m, n}, client);
      ASSERT_EQ(plan.emails.size(), m * n) << m << "x" << n;
      ASSERT_EQ(plan.activities.size(), m);
      for (const auto& row : plan.activities) ASSERT_EQ(row.size(), n);
    }
}

TEST(Spearmail, Deterministic) {
  Recording a, b;
  const auto pa = generate_plan({profile(), 2, 3}, a, {.seed = 4});
  const auto pb = generate_plan({profile(), 2, 3}, b, {.seed = 4});
  ASSERT_EQ(pa.emails.size(), pb.emails.size());
  for (std::size_t i = 0; i < pa.emails.size(); ++i) EXPECT_EQ(pa.emails[i].to_eml(), pb.emails[i].to_eml());
}

TEST(Spearmail, PromptsDifferOnlyInSlots) {
  Recording client;
  generate_plan({"PROFILE-TEXT", 1, 1}, client);
  ASSERT_EQ(client.prompts.size(), 3u);
  EXPECT_EQ(client.prompts[0], interest_prompt("PROFILE-TEXT", 1));
  EXPECT_EQ(client.prompts[0],
            "Given the list of information about an individual: PROFILE-TEXT. Please analyze the "
            "information, and give me 1 unique interests they might have, along with where you "
            "obtained this interest from.");
  EXPECT_EQ(client.prompts[1].rfind("I am a professional trying to connect", 0), 0u);
  EXPECT_NE(client.prompts[1].find("help me generate 1 unique"), std::string::npos);
  EXPECT_EQ(client.prompts[2].rfind("Given his profile: PROFILE-TEXT, interest: ", 0), 0u);
  EXPECT_EQ(fill_slots("{a}-{b}-{a}", {{"a", "x"}, {"b", "y"}}), "x-y-x");
}

TEST(Spearmail, MessagesAreWatermarkedAndDefanged) {
  Recording client;
  const auto plan = generate_plan({profile(), 2, 2}, client);
  const std::regex link(R"(https?://\S+)");
  for (const auto& e : plan.emails) {
    const auto eml = e.to_eml();
    EXPECT_NE(eml.find(std::string(kSyntheticHeader) + ":"), std::string::npos);
    EXPECT_EQ(e.subject, "Invitation: " + e.pair.activity);
    for (auto it = std::sregex_iterator(e.body.begin(), e.body.end(), link); it != std::sregex_iterator(); ++it)
      EXPECT_EQ(it->str().rfind("https://example.invalid/", 0), 0u) << it->str();
    EXPECT_TRUE(e.sender_address.ends_with(".example")) << e.sender_address;
  }
  EXPECT_EQ(neutralize_links("Go to http://evil.com/x, then https://a.b/c."),
            "Go to https://example.invalid/1, then https://example.invalid/2.");
}

TEST(Spearmail, BackendFailureMarksEmails) {
  Failing client;
  const auto plan = generate_plan({profile(), 2, 2}, client, {.retries = 1});
  EXPECT_FALSE(plan.complete());
  EXPECT_EQ(plan.emails.size(), 4u);
  for (const auto& e : plan.emails) EXPECT_FALSE(e.ok);
  EXPECT_GE(client.calls, 2);
}

TEST(Spearmail, KbMembershipFlag) {
  Recording client;
  const auto plan = generate_plan({profile(), 3, 3}, client, {.kb = testing::fixture_kb().get()});
  for (const auto& row : plan.activities)
    for (const auto& p : row)
      EXPECT_EQ(p.organization_in_kb, testing::fixture_kb()->resolve_alias(p.organization) != nullptr);
}

TEST(Spearmail, MaildirOutputParses) {
  testing::TempDir dir;
  Recording client;
  const auto plan = generate_plan({profile(), 2, 3}, client);
  EXPECT_EQ(write_maildir(dir.path(), {plan}), 6u);
  std::size_t files = 0;
  for (const auto& f : std::filesystem::directory_iterator(dir / "new")) {
    ++files;
    const auto parsed = testing::parse(testing::read_file(f.path()), f.path().filename().string());
    EXPECT_FALSE(parsed.sender_address.empty());
    EXPECT_TRUE(parsed.subject.starts_with("Invitation: "));
  }
  EXPECT_EQ(files, 6u);
  EXPECT_TRUE(std::filesystem::is_empty(dir / "tmp"));
}

// ---------------------------------------------------------------- persuasion

TEST(Persuasion, ParsesNamedAndBareScores) {
  auto named = parse_persuasion("Reciprocity: 2\nConsistency: 3\nSocial Proof: 4\nAuthority: 5\nLiking: 1\nScarcity: 2");
  ASSERT_TRUE(named);
  EXPECT_EQ(named->scores, (std::array<int, 6>{2, 3, 4, 5, 1, 2}));
  auto bare = parse_persuasion("3 3 3 3 3 3");
  ASSERT_TRUE(bare);
  EXPECT_EQ(bare->scores, (std::array<int, 6>{3, 3, 3, 3, 3, 3}));
  EXPECT_TRUE(bare->diagnostics.empty());
  EXPECT_FALSE(parse_persuasion("3 3 3"));
  EXPECT_FALSE(parse_persuasion("no numbers here"));
}

TEST(Persuasion, OutOfRangeIsClamped) {
  const auto s = parse_persuasion("7 3 3 3 3 0");
  ASSERT_TRUE(s);
  EXPECT_EQ(s->scores[0], 5);
  EXPECT_EQ(s->scores[5], 1);
  ASSERT_EQ(s->diagnostics.size(), 2u);
  EXPECT_NE(s->diagnostics[0].find("clamped to 5"), std::string::npos);
}

TEST(Persuasion, ScoringRetriesThenFails) {
  Canned garbage("I cannot rate that.");
  EXPECT_THROW(score_persuasion("p", "e", garbage, 1), PersuasionError);
  Canned good("3 3 3 3 3 3");
  const auto summary = summarize_persuasion("p", {"a", "b"}, good);
  EXPECT_EQ(summary.emails, 2u);
  EXPECT_EQ(summary.failures, 0u);
  for (double m : summary.mean) EXPECT_DOUBLE_EQ(m, 3.0);
  const auto cmp = compare_persuasion("p", {"a"}, {"b", "c"}, good);
  const auto j = to_json(cmp);
  EXPECT_TRUE(j.contains("generated"));
  EXPECT_TRUE(j.contains("baseline"));
}

TEST(Persuasion, MockJudgeInRange) {
  MockGenerationClient judge(3);
  for (int i = 0; i < 50; ++i) {
    const auto s = score_persuasion("profile", "email " + std::to_string(i), judge);
    for (int v : s.scores) {
      EXPECT_GE(v, 1);
      EXPECT_LE(v, 5);
    }
  }
}

}  // namespace
}  // namespace refmail::spearmail
