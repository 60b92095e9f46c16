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

#include "refmail/tagging/focal_loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace refmail::tagging {

namespace {

void check(const FocalLossInput& in) {
  if (in.num_classes == 0) throw FocalLossError("focal loss: zero classes");
  if (in.rows() == 0) throw FocalLossError("focal loss: empty input");
  if (in.probs.size() != in.rows() * in.num_classes)
    throw FocalLossError("focal loss: probs size does not match rows x classes");
  if (!(in.gamma >= 0.0)) throw FocalLossError("focal loss: gamma must be >= 0");
  for (std::size_t i = 0; i < in.rows(); ++i) {
    if (in.labels[i] >= in.num_classes)
      throw FocalLossError("focal loss: label out of range at row " + std::to_string(i));
    if (!(in.gold(i) > 0.0))
      throw FocalLossError("focal loss: gold probability is zero at row " + std::to_string(i));
  }
}

}  // namespace

double focal_loss(const FocalLossInput& in) {
  check(in);
  double sum = 0.0;
  for (std::size_t i = 0; i < in.rows(); ++i) {
    const double p = in.gold(i);
    sum += std::pow(1.0 - p, in.gamma) * std::log(p);
  }
  return -sum / static_cast<double>(in.rows());
}

std::vector<double> focal_loss_grad(const FocalLossInput& in) {
  check(in);
  const double n = static_cast<double>(in.rows());
  const double g = in.gamma;
  std::vector<double> grad(in.probs.size(), 0.0);
  for (std::size_t i = 0; i < in.rows(); ++i) {
    const double p = in.gold(i);
    const double q = 1.0 - p;
    double d;
    if (q == 0.0) {
      // (1-p)^g / p -> 1 only for g == 0; the log term vanishes.
      d = g == 0.0 ? 1.0 : 0.0;
    } else {
      d = -g * std::pow(q, g - 1.0) * std::log(p) + std::pow(q, g) / p;
    }
    grad[i * in.num_classes + in.labels[i]] = -d / n;
  }
  return grad;
}

void clamp_probabilities(FocalLossInput& in, double eps) {
  for (double& p : in.probs) p = std::max(p, eps);
}

}  // namespace refmail::tagging
