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

#include <chrono>
#include <cstddef>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "refmail/identity/char_embedding.hpp"
#include "refmail/kb/knowledge_base.hpp"
#include "refmail/util/line_json.hpp"

namespace refmail::identity {

inline constexpr double kReferenceThreshold = 0.83;
// Scores within this distance below the threshold still count as accepted.
inline constexpr double kScoreTolerance = 1e-9;

class EmbedderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Embeddings from an external model: {"id","phrase"} -> {"id","vector"}.
// Throws EmbedderError on timeout or protocol violation.
class AdapterEmbedder final : public Embedder {
 public:
  AdapterEmbedder(std::shared_ptr<JsonLineTransport> transport, std::size_t dims,
                  std::chrono::milliseconds deadline = std::chrono::milliseconds(500));
  CharEmbedding embed(std::string_view phrase) const override;
  std::size_t dims() const override { return dims_; }

 private:
  std::shared_ptr<JsonLineTransport> transport_;
  std::size_t dims_;
  std::chrono::milliseconds deadline_;
};

struct IdentityScore {
  std::string identity_id;
  std::string display_name;
  double score = 0.0;
  std::string best_alias;
  bool internal = false;
  std::set<std::string> domains;
};

struct MatchResult {
  std::string query;
  std::vector<IdentityScore> ranked;    // descending score, ties by id
  std::vector<IdentityScore> accepted;  // prefix of ranked with score >= threshold
  std::set<std::string> expected_domains;
  bool internal_accepted = false;
  std::string diagnostic;  // set when the fallback embedder was used
};

struct MatcherOptions {
  // Length of `ranked` (0 keeps every identity); never shorter than `accepted`.
  std::size_t top_k = 0;
};

// Exact scan over every alias of an immutable KB. Thread-safe.
class IdentityMatcher {
 public:
  IdentityMatcher(std::shared_ptr<const kb::KnowledgeBase> kb,
                  std::shared_ptr<const Embedder> embedder = nullptr,
                  std::shared_ptr<const Embedder> fallback = nullptr);

  MatchResult match(std::string_view query, double threshold, MatcherOptions options = {}) const;

  // Max over the identity's aliases; throws std::out_of_range for unknown ids.
  double score(std::string_view query, std::string_view identity_id) const;

  const kb::KnowledgeBase& kb() const { return *kb_; }
  std::size_t alias_count() const { return primary_.aliases.size(); }

 private:
  struct Index {
    std::shared_ptr<const Embedder> embedder;
    std::vector<CharEmbedding> aliases;
    std::vector<std::size_t> owner;  // alias -> entry index
    std::vector<std::size_t> slot;   // alias -> position in the entry's list
  };
  Index build(std::shared_ptr<const Embedder> e) const;
  std::vector<double> identity_scores(const Index& index, const CharEmbedding& q,
                                      std::vector<std::size_t>* best) const;

  std::shared_ptr<const kb::KnowledgeBase> kb_;
  Index primary_;
  std::unique_ptr<Index> fallback_;
};

MatchResult match_identity(std::string_view query, const IdentityMatcher& matcher, double threshold);

}  // namespace refmail::identity
