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
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "refmail/util/line_json.hpp"
#include "refmail/verdict/verdict.hpp"

namespace refmail::service {

struct Counts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

struct LatencySummary {
  std::size_t samples = 0;
  double p50 = 0.0, p90 = 0.0, p99 = 0.0, max = 0.0;
};

struct MetricsReport {
  Counts counts;
  std::optional<double> precision;  // undefined when TP + FP = 0
  std::optional<double> recall;     // undefined when TP + FN = 0
  std::optional<double> fpr;        // undefined when FP + TN = 0
  double median_runtime_ms = 0.0;
  std::map<std::string, LatencySummary> stages;
  std::size_t excluded = 0;
  std::vector<std::string> diagnostics;
};

// Linear interpolation between closest ranks; 0 for an empty sample.
double percentile(std::vector<double> values, double q);

void fill_ratios(MetricsReport& report);

// Collects verdicts against ground truth. Unlabeled messages are excluded
// from the counts with a diagnostic but still contribute runtimes.
class MetricsAccumulator {
 public:
  void add(const verdict::Verdict& v, std::optional<bool> is_phishing);
  MetricsReport report() const;

 private:
  Counts counts_;
  std::size_t excluded_ = 0;
  std::vector<std::string> diagnostics_;
  std::map<std::string, std::vector<double>> timings_;
};

// "id label" per line, label in {phishing, benign, 1, 0}; '#' comments.
// Throws std::runtime_error with the line number on bad input.
std::unordered_map<std::string, bool> load_labels(const std::filesystem::path& path);

// Exact source id, then its file name, then the file name without extension.
std::optional<bool> find_label(const std::unordered_map<std::string, bool>& labels,
                               const std::string& source_id);

Json to_json(const MetricsReport& report);

}  // namespace refmail::service
