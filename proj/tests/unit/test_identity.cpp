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

#include <algorithm>
#include <cmath>
#include <set>

#include "refmail/adversarial/mutators.hpp"
#include "refmail/identity/calibration.hpp"
#include "refmail/identity/char_embedding.hpp"
#include "refmail/identity/matcher.hpp"
#include "refmail/identity/retrieval_loss.hpp"
#include "refmail/util/line_json.hpp"
#include "refmail/util/rng.hpp"
#include "refmail/util/text.hpp"
#include "test_support.hpp"

namespace refmail::identity {
namespace {

// ---------------------------------------------------------------- embedding

TEST(Embedding, Deterministic) {
  const auto a = embed("IEEE Symposium");
  const CharEmbedder fresh;
  EXPECT_EQ(a.vector, fresh.embed("IEEE Symposium").vector);
  EXPECT_EQ(a.vector.size(), 256u);
}

TEST(Embedding, TypoRanksAboveUnrelatedWord) {
  EXPECT_GT(cosine(embed("paypal"), embed("payppall")), cosine(embed("paypal"), embed("payday")));
}

TEST(Embedding, CaseAndAccentFolding) {
  EXPECT_NEAR(cosine(embed("Internal"), embed("internal")), 1.0, 1e-12);
  EXPECT_NEAR(cosine(embed("Café"), embed("cafe")), 1.0, 1e-12);
}

TEST(Embedding, EmptyIsZero) {
  const auto z = embed("");
  EXPECT_TRUE(z.is_zero());
  for (double x : z.vector) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(cosine(z, embed("x")), 0.0);
}

TEST(Cosine, IdentitySymmetryRange) {
  Rng rng(4);
  const auto& kb = *testing::fixture_kb();
  for (int i = 0; i < 500; ++i) {
    const auto& a = kb.entries()[rng.uniform(kb.entries().size())].aliases[0];
    const auto& b = kb.entries()[rng.uniform(kb.entries().size())].aliases[0];
    const auto ea = embed(a), eb = embed(b);
    EXPECT_NEAR(cosine(ea, ea), 1.0, 1e-9);
    EXPECT_DOUBLE_EQ(cosine(ea, eb), cosine(eb, ea));
    EXPECT_LE(std::abs(cosine(ea, eb)), 1.0);
    for (double x : ea.vector) ASSERT_TRUE(std::isfinite(x));
  }
}

TEST(Cosine, DisjointAlphabetsNearZero) {
  Rng rng(8);
  const std::string left = "abcdefghijklm", right = "nopqrstuvwxyz";
  double sum = 0;
  const int pairs = 1000;
  for (int i = 0; i < pairs; ++i) {
    std::string a, b;
    for (std::size_t k = 0, n = 4 + rng.uniform(10); k < n; ++k) a.push_back(left[rng.uniform(left.size())]);
    for (std::size_t k = 0, n = 4 + rng.uniform(10); k < n; ++k) b.push_back(right[rng.uniform(right.size())]);
    sum += std::abs(cosine(embed(a), embed(b)));
  }
  EXPECT_LT(sum / pairs, 0.1);
}

TEST(Embedding, TypoStabilityOverKb) {
  const auto& kb = *testing::fixture_kb();
  std::vector<std::string> aliases;
  for (const auto& e : kb.entries())
    for (const auto& a : e.aliases) aliases.push_back(a);
  std::vector<CharEmbedding> emb;
  for (const auto& a : aliases) emb.push_back(embed(a));
  Rng rng(17);
  std::size_t ok = 0, total = 0;
  for (std::size_t i = 0; i < aliases.size(); ++i) {
    if (text::decode_utf8(aliases[i]).size() < 4) continue;
    for (auto k : adversarial::kAllCharMutations) {
      const auto m = adversarial::mutate_chars(k, aliases[i], mix_seed(i, static_cast<std::uint64_t>(k)));
      if (!m.applied) continue;
      const double typo = cosine(emb[i], embed(m.result));
      for (int r = 0; r < 50; ++r) {
        const auto j = rng.uniform(aliases.size());
        if (j == i) continue;
        ++total;
        ok += typo > cosine(emb[i], emb[j]);
      }
    }
  }
  ASSERT_GT(total, 100000u);
  EXPECT_GE(static_cast<double>(ok) / total, 0.99);
}

// ---------------------------------------------------------------- matcher

const IdentityMatcher& matcher() { return *testing::fixture_matcher(); }

TEST(Matcher, IeeeExample) {
  const auto r = match_identity("IEEE S&P", matcher(), kReferenceThreshold);
  ASSERT_FALSE(r.accepted.empty());
  EXPECT_EQ(r.accepted[0].identity_id, "ieee_sp");
  EXPECT_NEAR(r.accepted[0].score, 1.0, 1e-9);
  EXPECT_TRUE(r.expected_domains.count("ieee-security.org"));
  EXPECT_TRUE(r.expected_domains.count("ieee.org"));
}

TEST(Matcher, ColleagueIsInternal) {
  const auto r = match_identity("Colleague", matcher(), kReferenceThreshold);
  ASSERT_FALSE(r.accepted.empty());
  EXPECT_TRUE(r.internal_accepted);
  EXPECT_EQ(r.accepted[0].identity_id, kb::kInternalId);
}

TEST(Matcher, RandomHexRejectedByExhaustiveOracle) {
  const auto r = match_identity("zq9xv7", matcher(), kReferenceThreshold);
  EXPECT_TRUE(r.accepted.empty());
  // Oracle: score every alias directly.
  const auto q = embed("zq9xv7");
  for (const auto& e : matcher().kb().entries())
    for (const auto& a : e.aliases) EXPECT_LT(cosine(q, embed(a)), kReferenceThreshold) << a;
}

TEST(Matcher, InvariantsAgainstOracle) {
  Rng rng(12);
  const auto& kb = matcher().kb();
  for (int i = 0; i < 60; ++i) {
    const auto& e = kb.entries()[rng.uniform(kb.entries().size())];
    const auto query = adversarial::mutate_chars(adversarial::CharMutation::kReplace,
                                                 e.aliases[0], rng.next()).result;
    const double thr = 0.5 + rng.unit() * 0.4;
    const auto r = matcher().match(query, thr);
    const auto q = embed(query);
    ASSERT_EQ(r.ranked.size(), kb.entries().size());
    for (std::size_t k = 1; k < r.ranked.size(); ++k) EXPECT_GE(r.ranked[k - 1].score, r.ranked[k].score);
    std::set<std::string> domains;
    std::size_t accepted = 0;
    for (const auto& s : r.ranked) {
      double best = -2;
      for (const auto& a : kb.find(s.identity_id)->aliases) best = std::max(best, cosine(q, embed(a)));
      EXPECT_NEAR(s.score, best, 1e-12);
      if (best + kScoreTolerance >= thr) {
        ++accepted;
        domains.insert(s.domains.begin(), s.domains.end());
      }
    }
    EXPECT_EQ(r.accepted.size(), accepted);
    EXPECT_EQ(r.expected_domains, domains);
    // Raising the threshold never enlarges the accepted set.
    EXPECT_LE(matcher().match(query, thr + 0.05).accepted.size(), r.accepted.size());
  }
}

TEST(Matcher, SelfMatchAtReferenceThreshold) {
  const auto& kb = matcher().kb();
  std::size_t n = 0;
  for (const auto& e : kb.entries())
    for (const auto& a : e.aliases) {
      ++n;
      const auto r = matcher().match(a, kReferenceThreshold);
      bool own = false;
      for (const auto& s : r.accepted) own |= s.identity_id == e.id;
      EXPECT_TRUE(own) << a;
    }
  EXPECT_GE(n, 1000u);
}

std::shared_ptr<JsonLineTransport> mock(const std::string& mode) {
  return open_endpoint("exec:" + testing::mock_adapter_path() + " " + mode);
}

TEST(Matcher, AdapterEmbedderAgreesWithNative) {
  const auto adapter = std::make_shared<AdapterEmbedder>(mock("embed"), 256, std::chrono::milliseconds(5000));
  const IdentityMatcher m(testing::fixture_kb(), adapter, std::make_shared<CharEmbedder>());
  const auto a = m.match("PayPal Securty", 0.7);
  const auto b = matcher().match("PayPal Securty", 0.7);
  ASSERT_FALSE(a.accepted.empty());
  EXPECT_EQ(a.accepted[0].identity_id, b.accepted[0].identity_id);
  EXPECT_NEAR(a.accepted[0].score, b.accepted[0].score, 1e-9);
  EXPECT_TRUE(a.diagnostic.empty());
}

class FlakyEmbedder final : public Embedder {
 public:
  CharEmbedding embed(std::string_view phrase) const override {
    if (phrase.find("BOOM") != std::string_view::npos) throw EmbedderError("adapter down");
    return inner_.embed(phrase);
  }
  std::size_t dims() const override { return inner_.dims(); }

 private:
  CharEmbedder inner_;
};

TEST(Matcher, AdapterFailureUsesFallback) {
  const auto bad = std::make_shared<AdapterEmbedder>(mock("embed-bad-dims"), 256);
  EXPECT_THROW(IdentityMatcher(testing::fixture_kb(), bad, nullptr), EmbedderError);
  const auto dead = std::make_shared<AdapterEmbedder>(mock("exit"), 256);
  EXPECT_THROW(dead->embed("x"), EmbedderError);

  const IdentityMatcher m(testing::fixture_kb(), std::make_shared<FlakyEmbedder>(),
                          std::make_shared<CharEmbedder>());
  const auto r = m.match("PayPal BOOM", 0.5);
  EXPECT_NE(r.diagnostic.find("adapter down"), std::string::npos);
  EXPECT_FALSE(r.ranked.empty());
  const IdentityMatcher strict(testing::fixture_kb(), std::make_shared<FlakyEmbedder>());
  EXPECT_THROW(strict.match("BOOM", 0.5), EmbedderError);
}

// ---------------------------------------------------------------- retrieval + KL

std::vector<double> softmax(const std::vector<double>& z) {
  const double mx = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double s = 0;
  for (std::size_t i = 0; i < z.size(); ++i) s += (p[i] = std::exp(z[i] - mx));
  for (auto& x : p) x /= s;
  return p;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Direct evaluation of the loss definition.
RetrievalLoss oracle(const FeatureBatch& b, const ProjectionModel& m) {
  const auto q = m.embed(b.query), qt = m.embed(b.typo_query);
  std::vector<double> s, st;
  for (const auto& c : b.candidates) {
    const auto e = m.embed(c);
    s.push_back(dot(q, e) / b.temperature);
    st.push_back(dot(qt, e) / b.temperature);
  }
  const auto p = softmax(s), pt = softmax(st);
  RetrievalLoss l;
  for (auto i : b.positives) l.retrieval -= std::log(p[i]);
  l.retrieval /= static_cast<double>(b.positives.size());
  for (std::size_t i = 0; i < p.size(); ++i) l.kl += pt[i] * (std::log(pt[i]) - std::log(p[i]));
  return l;
}

FeatureBatch random_batch(Rng& rng, std::size_t in, std::size_t cands) {
  auto vec = [&] {
    std::vector<double> v(in);
    for (auto& x : v) x = rng.unit() * 2 - 1;
    return v;
  };
  FeatureBatch b;
  b.query = vec();
  b.typo_query = b.query;
  for (auto& x : b.typo_query) x += (rng.unit() - 0.5) * 0.4;
  for (std::size_t i = 0; i < cands; ++i) b.candidates.push_back(vec());
  b.positives = {0};
  if (cands > 2) b.positives.push_back(2);
  b.temperature = 0.5 + rng.unit();
  return b;
}

TEST(RetrievalLoss, MatchesDefinition) {
  Rng rng(21);
  for (int i = 0; i < 50; ++i) {
    const ProjectionModel m(8, 12, rng.next());
    const auto b = random_batch(rng, 12, 2 + rng.uniform(6));
    const auto got = retrieval_kl_loss(b, m);
    const auto want = oracle(b, m);
    EXPECT_NEAR(got.retrieval, want.retrieval, 1e-12);
    EXPECT_NEAR(got.kl, want.kl, 1e-12);
    EXPECT_GE(got.kl, 0.0);
  }
}

TEST(RetrievalLoss, KlZeroWhenTypoEqualsQuery) {
  Rng rng(1);
  const ProjectionModel m(8, 12, 3);
  auto b = random_batch(rng, 12, 5);
  b.typo_query = b.query;
  EXPECT_EQ(retrieval_kl_loss(b, m).kl, 0.0);
  const RetrievalBatch tb{"paypal", "paypal", {"paypal", "payday"}, {0}, 1.0};
  const EmbedFn f = [](std::string_view s) { return embed(s).vector; };
  EXPECT_EQ(retrieval_kl_loss(tb, f).kl, 0.0);
}

TEST(RetrievalLoss, SingleCandidateHasZeroRetrieval) {
  const EmbedFn f = [](std::string_view s) { return embed(s).vector; };
  const RetrievalBatch b{"paypal", "payppall", {"paypal"}, {0}, 1.0};
  EXPECT_NEAR(retrieval_kl_loss(b, f).retrieval, 0.0, 1e-15);
  EXPECT_THROW(retrieval_kl_loss(RetrievalBatch{"a", "a", {}, {}, 1.0}, f), std::invalid_argument);
}

TEST(RetrievalLoss, GradientMatchesFiniteDifferences) {
  Rng rng(31);
  const double h = 1e-6;
  double worst = 0;
  for (int trial = 0; trial < 10; ++trial) {
    ProjectionModel m(6, 10, rng.next());
    const auto b = random_batch(rng, 10, 5);
    std::vector<double> grad;
    retrieval_kl_loss(b, m, &grad);
    ASSERT_EQ(grad.size(), m.weights().size());
    for (std::size_t k = 0; k < grad.size(); ++k) {
      const double w = m.weights()[k];
      m.weights()[k] = w + h;
      const double up = retrieval_kl_loss(b, m).total();
      m.weights()[k] = w - h;
      const double dn = retrieval_kl_loss(b, m).total();
      m.weights()[k] = w;
      const double fd = (up - dn) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(grad[k]), 1e-6});
      worst = std::max(worst, std::abs(fd - grad[k]) / denom);
    }
  }
  EXPECT_LT(worst, 1e-5);
}

// ---------------------------------------------------------------- calibration

TEST(Calibration, FBetaReferenceRow) { EXPECT_NEAR(f_beta(0.99, 0.90, 0.5), 0.97, 0.005); }

TEST(Calibration, SeparableScores) {
  std::vector<ScoredPair> pairs;
  Rng rng(2);
  for (int i = 0; i < 100; ++i) pairs.push_back({0.9 + rng.unit() * 0.1, true});
  for (int i = 0; i < 100; ++i) pairs.push_back({rng.unit() * 0.3, false});
  const auto c = calibrate_threshold(pairs);
  EXPECT_GT(c.threshold, 0.3);
  EXPECT_LE(c.threshold, 1.0);
  EXPECT_EQ(c.precision, 1.0);
  EXPECT_EQ(c.recall, 1.0);
  for (double t : {0.31, 0.5, 0.9}) {
    const auto row = evaluate_threshold(pairs, t, 0.5);
    EXPECT_EQ(row.precision, 1.0);
    EXPECT_EQ(row.recall, 1.0);
  }
}

TEST(Calibration, SingleClassRejected) {
  EXPECT_THROW(calibrate_threshold(std::vector<ScoredPair>{{0.5, true}, {0.7, true}}), std::invalid_argument);
}

TEST(Calibration, SweepAgreesWithBruteForceAndRecallDeclines) {
  const auto pairs = load_labeled_pairs(testing::data_dir() / "calibration" / "pairs.jsonl");
  const auto c = calibrate_threshold(pairs, matcher());
  std::vector<ScoredPair> scored;
  for (const auto& p : pairs) scored.push_back({matcher().score(p.query, p.identity_id), p.is_match});
  double prev_recall = 2;
  double best = -1;
  for (const auto& row : c.sweep) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& s : scored) {
      const bool pos = s.score + kScoreTolerance >= row.threshold;
      tp += pos && s.is_match;
      fp += pos && !s.is_match;
      fn += !pos && s.is_match;
    }
    EXPECT_EQ(row.tp, tp);
    EXPECT_EQ(row.fp, fp);
    EXPECT_EQ(row.fn, fn);
    EXPECT_LE(row.recall, prev_recall);
    prev_recall = row.recall;
    best = std::max(best, row.f_beta);
  }
  EXPECT_DOUBLE_EQ(c.f_beta, best);
  EXPECT_NEAR(c.threshold, testing::calibrated_threshold(), 1e-6);
}

}  // namespace
}  // namespace refmail::identity
