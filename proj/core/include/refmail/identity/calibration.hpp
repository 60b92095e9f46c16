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
#include <filesystem>
#include <string>
#include <vector>

#include "refmail/identity/matcher.hpp"
#include "refmail/util/line_json.hpp"

namespace refmail::identity {

struct ScoredPair {
  double score = 0.0;
  bool is_match = false;
};

struct SweepRow {
  double threshold = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0;  // 0 when nothing is predicted positive
  double recall = 0.0;
  double f_beta = 0.0;
};

struct Calibration {
  double beta = 0.5;
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
  std::vector<SweepRow> sweep;  // ascending threshold
};

// (1 + b^2) P R / (b^2 P + R); 0 when both are 0.
double f_beta(double precision, double recall, double beta);

// Metrics at "score >= threshold" for one threshold.
SweepRow evaluate_threshold(const std::vector<ScoredPair>& pairs, double threshold, double beta);

// Sweeps every observed score as a threshold and keeps the best F_beta
// (ties: higher precision, then lower threshold). Throws
// std::invalid_argument unless both classes are present.
Calibration calibrate_threshold(const std::vector<ScoredPair>& pairs, double beta = 0.5);

struct LabeledPair {
  std::string query;
  std::string identity_id;
  bool is_match = false;
};

// Scores each pair with matcher.score(query, identity_id) and sweeps.
Calibration calibrate_threshold(const std::vector<LabeledPair>& pairs,
                                const IdentityMatcher& matcher, double beta = 0.5);

// JSON lines {"query","identity","match"}.
std::vector<LabeledPair> load_labeled_pairs(const std::filesystem::path& path);

Json to_json(const Calibration& c);

}  // namespace refmail::identity
