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

#include "refmail/identity/char_embedding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "refmail/util/rng.hpp"
#include "refmail/util/text.hpp"

namespace refmail::identity {

namespace {

constexpr char32_t kBegin = 0x02;
constexpr char32_t kEnd = 0x03;

}  // namespace

CharEmbedder::CharEmbedder(EmbeddingConfig config) : config_(config) {
  if (config_.dims == 0 || config_.buckets == 0 || config_.min_order < 1 ||
      config_.max_order < config_.min_order)
    throw std::invalid_argument("bad embedding config");
}

SparseFeatures CharEmbedder::features(std::string_view phrase) const {
  const auto folded = text::fold_for_matching(phrase);
  std::map<std::uint32_t, double> counts;
  if (folded.empty()) return {};
  std::u32string padded;
  padded.reserve(folded.size() + 2);
  padded.push_back(kBegin);
  padded += folded;
  padded.push_back(kEnd);
  std::string gram;
  for (int order = config_.min_order; order <= config_.max_order; ++order) {
    const std::u32string& src = order == 1 ? folded : padded;
    if (src.size() < static_cast<std::size_t>(order)) continue;
    for (std::size_t i = 0; i + order <= src.size(); ++i) {
      gram.assign(1, static_cast<char>('0' + order));
      for (int k = 0; k < order; ++k) text::append_utf8(gram, src[i + k]);
      const auto h = fnv1a64(gram, config_.seed ^ 0xcbf29ce484222325ULL);
      counts[static_cast<std::uint32_t>(h % config_.buckets)] += 1.0;
    }
  }
  SparseFeatures out;
  out.reserve(counts.size());
  for (const auto& [b, c] : counts) out.emplace_back(b, 1.0 + std::log(c));
  return out;
}

std::vector<double> CharEmbedder::dense_features(std::string_view phrase, std::size_t dims) const {
  std::vector<double> v(dims, 0.0);
  for (const auto& [b, w] : features(phrase)) v[b % dims] += w;
  return v;
}

CharEmbedding CharEmbedder::embed(std::string_view phrase) const {
  const std::size_t k = config_.dims;
  std::vector<double> v(k, 0.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  for (const auto& [bucket, w] : features(phrase)) {
    Rng rng(mix_seed(config_.seed, bucket));
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (i % 64 == 0) bits = rng.next();
      v[i] += (bits & 1) ? w * scale : -w * scale;
      bits >>= 1;
    }
  }
  return normalized(std::move(v));
}

CharEmbedding normalized(std::vector<double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  CharEmbedding e;
  if (sq > 0.0 && std::isfinite(sq)) {
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
    e.norm = 1.0;
  } else {
    std::fill(v.begin(), v.end(), 0.0);
  }
  e.vector = std::move(v);
  return e;
}

double cosine(const CharEmbedding& a, const CharEmbedding& b) {
  if (a.is_zero() || b.is_zero()) return 0.0;
  if (a.vector.size() != b.vector.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < a.vector.size(); ++i) dot += a.vector[i] * b.vector[i];
  return std::clamp(dot, -1.0, 1.0);
}

const CharEmbedder& default_embedder() {
  static const CharEmbedder e;
  return e;
}

CharEmbedding embed(std::string_view phrase) { return default_embedder().embed(phrase); }

}  // namespace refmail::identity
