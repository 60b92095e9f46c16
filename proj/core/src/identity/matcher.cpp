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

#include "refmail/identity/matcher.hpp"

#include <algorithm>
#include <cmath>

namespace refmail::identity {

AdapterEmbedder::AdapterEmbedder(std::shared_ptr<JsonLineTransport> transport, std::size_t dims,
                                 std::chrono::milliseconds deadline)
    : transport_(std::move(transport)), dims_(dims), deadline_(deadline) {}

CharEmbedding AdapterEmbedder::embed(std::string_view phrase) const {
  if (phrase.empty()) return normalized(std::vector<double>(dims_, 0.0));
  std::string error;
  auto resp = transport_->call({{"id", next_request_id()}, {"phrase", phrase}}, deadline_, &error);
  if (!resp) throw EmbedderError("embedding adapter: " + error);
  const auto it = resp->find("vector");
  if (it == resp->end() || !it->is_array() || it->size() != dims_)
    throw EmbedderError("embedding adapter: protocol error: expected " + std::to_string(dims_) +
                        "-element vector");
  std::vector<double> v;
  v.reserve(dims_);
  for (const auto& x : *it) {
    if (!x.is_number()) throw EmbedderError("embedding adapter: non-numeric vector entry");
    const double d = x.get<double>();
    if (!std::isfinite(d)) throw EmbedderError("embedding adapter: non-finite vector entry");
    v.push_back(d);
  }
  return normalized(std::move(v));
}

IdentityMatcher::IdentityMatcher(std::shared_ptr<const kb::KnowledgeBase> kb,
                                 std::shared_ptr<const Embedder> embedder,
                                 std::shared_ptr<const Embedder> fallback)
    : kb_(std::move(kb)) {
  if (!kb_) throw std::invalid_argument("IdentityMatcher: null knowledge base");
  if (!embedder) embedder = std::make_shared<CharEmbedder>();
  primary_ = build(std::move(embedder));
  if (fallback) fallback_ = std::make_unique<Index>(build(std::move(fallback)));
}

IdentityMatcher::Index IdentityMatcher::build(std::shared_ptr<const Embedder> e) const {
  Index idx;
  idx.embedder = std::move(e);
  const auto& entries = kb_->entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t k = 0; k < entries[i].aliases.size(); ++k) {
      idx.aliases.push_back(idx.embedder->embed(entries[i].aliases[k]));
      idx.owner.push_back(i);
      idx.slot.push_back(k);
    }
  }
  return idx;
}

std::vector<double> IdentityMatcher::identity_scores(const Index& index, const CharEmbedding& q,
                                                     std::vector<std::size_t>* best) const {
  const std::size_t n = kb_->entries().size();
  std::vector<double> scores(n, -2.0);
  if (best) best->assign(n, SIZE_MAX);
  for (std::size_t a = 0; a < index.aliases.size(); ++a) {
    const double s = cosine(q, index.aliases[a]);
    const std::size_t e = index.owner[a];
    if (s > scores[e]) {
      scores[e] = s;
      if (best) (*best)[e] = a;
    }
  }
  return scores;
}

MatchResult IdentityMatcher::match(std::string_view query, double threshold,
                                   MatcherOptions options) const {
  MatchResult r;
  r.query = std::string(query);
  const Index* index = &primary_;
  CharEmbedding q;
  try {
    q = primary_.embedder->embed(query);
  } catch (const EmbedderError& e) {
    if (!fallback_) throw;
    index = fallback_.get();
    q = index->embedder->embed(query);
    r.diagnostic = std::string(e.what()) + "; native embedding used";
  }
  std::vector<std::size_t> best;
  const auto scores = identity_scores(*index, q, &best);
  const auto& entries = kb_->entries();

  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return entries[a].id < entries[b].id;
  });

  std::size_t n_accept = 0;
  while (n_accept < order.size() && scores[order[n_accept]] + kScoreTolerance >= threshold &&
         best[order[n_accept]] != SIZE_MAX)
    ++n_accept;
  std::size_t keep = options.top_k == 0 ? order.size() : std::max(options.top_k, n_accept);
  keep = std::min(keep, order.size());

  r.ranked.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) {
    const std::size_t e = order[k];
    if (best[e] == SIZE_MAX) break;  // entry without aliases
    IdentityScore s;
    s.identity_id = entries[e].id;
    s.display_name = entries[e].name;
    s.score = scores[e];
    s.best_alias = entries[e].aliases[index->slot[best[e]]];
    s.internal = entries[e].internal;
    s.domains = entries[e].domains;
    r.ranked.push_back(std::move(s));
  }
  for (std::size_t k = 0; k < n_accept && k < r.ranked.size(); ++k) {
    const auto& s = r.ranked[k];
    r.accepted.push_back(s);
    if (s.internal) r.internal_accepted = true;
    r.expected_domains.insert(s.domains.begin(), s.domains.end());
  }
  return r;
}

double IdentityMatcher::score(std::string_view query, std::string_view identity_id) const {
  const auto* entry = kb_->find(identity_id);
  if (!entry) throw std::out_of_range("unknown identity '" + std::string(identity_id) + "'");
  const auto q = primary_.embedder->embed(query);
  const std::size_t e = static_cast<std::size_t>(entry - kb_->entries().data());
  return identity_scores(primary_, q, nullptr)[e];
}

MatchResult match_identity(std::string_view query, const IdentityMatcher& matcher, double threshold) {
  return matcher.match(query, threshold);
}

}  // namespace refmail::identity
