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
#include <span>
#include <stdexcept>
#include <vector>

namespace refmail::tagging {

inline constexpr double kDefaultFocalGamma = 2.0;
// Suggested lower bound for probabilities before they reach the kernel.
inline constexpr double kProbabilityClamp = 1e-12;

// Row-major [N x C] probabilities with one gold label per row.
struct FocalLossInput {
  std::size_t num_classes = 0;
  std::vector<double> probs;
  std::vector<std::size_t> labels;
  double gamma = kDefaultFocalGamma;

  std::size_t rows() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {probs.data() + i * num_classes, num_classes};
  }
  double gold(std::size_t i) const { return probs[i * num_classes + labels[i]]; }
};

class FocalLossError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// -(1/N) * sum_i (1 - p_i)^gamma * log(p_i), p_i the gold probability.
// Throws FocalLossError on shape errors, gamma < 0 or p_i <= 0.
double focal_loss(const FocalLossInput& input);

// Gradient with respect to every entry of `probs` (same layout); only gold
// entries are non-zero.
std::vector<double> focal_loss_grad(const FocalLossInput& input);

// Raises every probability to at least `eps`.
void clamp_probabilities(FocalLossInput& input, double eps = kProbabilityClamp);

}  // namespace refmail::tagging
