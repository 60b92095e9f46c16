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
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace refmail::identity {

// A query, its typo'd variant and a candidate set; `positives` index into
// `candidates`.
struct RetrievalBatch {
  std::string query;
  std::string typo_query;
  std::vector<std::string> candidates;
  std::vector<std::size_t> positives;
  double temperature = 1.0;
};

struct RetrievalLoss {
  double retrieval = 0.0;
  double kl = 0.0;
  double total() const { return retrieval + kl; }
};

using EmbedFn = std::function<std::vector<double>(std::string_view)>;

// retrieval = mean over positives of -log softmax(f(q).f(P)/t)[p]
// kl        = KL(softmax(f(q').f(P)/t) || softmax(f(q).f(P)/t))
// Throws std::invalid_argument on an empty candidate set, bad positives,
// non-positive temperature or mismatched dimensions.
RetrievalLoss retrieval_kl_loss(const RetrievalBatch& batch, const EmbedFn& f);

// f_W(x) = W x / |W x| over dense input features. Row-major [out x in].
class ProjectionModel {
 public:
  ProjectionModel(std::size_t out_dims, std::size_t in_dims, std::uint64_t seed);

  std::size_t out_dims() const { return out_; }
  std::size_t in_dims() const { return in_; }
  std::vector<double>& weights() { return w_; }
  const std::vector<double>& weights() const { return w_; }

  std::vector<double> project(const std::vector<double>& x) const;  // W x
  std::vector<double> embed(const std::vector<double>& x) const;    // normalized

 private:
  std::size_t out_;
  std::size_t in_;
  std::vector<double> w_;
};

struct FeatureBatch {
  std::vector<double> query;
  std::vector<double> typo_query;
  std::vector<std::vector<double>> candidates;
  std::vector<std::size_t> positives;
  double temperature = 1.0;
};

// Same loss under f_W; when `grad` is non-null it receives dL/dW (same layout
// as the weights).
RetrievalLoss retrieval_kl_loss(const FeatureBatch& batch, const ProjectionModel& model,
                                std::vector<double>* grad = nullptr);

}  // namespace refmail::identity
