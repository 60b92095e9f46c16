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
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace refmail::identity {

struct EmbeddingConfig {
  std::size_t dims = 256;
  std::uint32_t buckets = 1u << 18;
  int min_order = 1;
  int max_order = 3;
  std::uint64_t seed = 0x72656d61696c3031ULL;
};

// Unit-length vector, or all zeros for an empty phrase.
struct CharEmbedding {
  std::vector<double> vector;
  double norm = 0.0;

  bool is_zero() const { return norm == 0.0; }
};

// Hashed character n-gram features of a folded phrase, sublinearly weighted.
using SparseFeatures = std::vector<std::pair<std::uint32_t, double>>;

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual CharEmbedding embed(std::string_view phrase) const = 0;
  virtual std::size_t dims() const = 0;
};

// Fold case and accents, count char 1..3-grams (bigrams and trigrams see
// boundary markers), weight each bucket by 1 + log(count), project with a
// seeded +-1/sqrt(k) matrix generated on the fly and L2-normalize.
class CharEmbedder final : public Embedder {
 public:
  explicit CharEmbedder(EmbeddingConfig config = {});

  CharEmbedding embed(std::string_view phrase) const override;
  std::size_t dims() const override { return config_.dims; }

  SparseFeatures features(std::string_view phrase) const;
  // Features folded into a dense vector of `dims` buckets (for training kernels).
  std::vector<double> dense_features(std::string_view phrase, std::size_t dims) const;

  const EmbeddingConfig& config() const { return config_; }

 private:
  EmbeddingConfig config_;
};

// Dot product of normalized vectors; 0 when either is zero. Throws
// std::invalid_argument on a dimension mismatch.
double cosine(const CharEmbedding& a, const CharEmbedding& b);

CharEmbedding normalized(std::vector<double> v);

const CharEmbedder& default_embedder();
CharEmbedding embed(std::string_view phrase);

}  // namespace refmail::identity
