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

#include "refmail/identity/calibration.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "refmail/util/text.hpp"

namespace refmail::identity {

double f_beta(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double den = b2 * precision + recall;
  return den == 0.0 ? 0.0 : (1.0 + b2) * precision * recall / den;
}

SweepRow evaluate_threshold(const std::vector<ScoredPair>& pairs, double threshold, double beta) {
  SweepRow row;
  row.threshold = threshold;
  for (const auto& p : pairs) {
    const bool pred = p.score + kScoreTolerance >= threshold;  // same rule as the matcher
    if (pred && p.is_match) ++row.tp;
    else if (pred) ++row.fp;
    else if (p.is_match) ++row.fn;
    else ++row.tn;
  }
  row.precision = row.tp + row.fp ? static_cast<double>(row.tp) / (row.tp + row.fp) : 0.0;
  row.recall = row.tp + row.fn ? static_cast<double>(row.tp) / (row.tp + row.fn) : 0.0;
  row.f_beta = f_beta(row.precision, row.recall, beta);
  return row;
}

Calibration calibrate_threshold(const std::vector<ScoredPair>& pairs, double beta) {
  const bool has_pos = std::any_of(pairs.begin(), pairs.end(), [](auto& p) { return p.is_match; });
  const bool has_neg = std::any_of(pairs.begin(), pairs.end(), [](auto& p) { return !p.is_match; });
  if (!has_pos || !has_neg)
    throw std::invalid_argument("calibrate_threshold: need both matching and non-matching pairs");
  if (!(beta > 0.0)) throw std::invalid_argument("calibrate_threshold: beta must be > 0");

  // Sort once and sweep from the highest threshold down.
  std::vector<ScoredPair> sorted = pairs;
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredPair& a, const ScoredPair& b) { return a.score > b.score; });
  std::size_t total_pos = 0;
  for (const auto& p : sorted) total_pos += p.is_match ? 1 : 0;
  const std::size_t total_neg = sorted.size() - total_pos;

  Calibration c;
  c.beta = beta;
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0, j = 0;  // i: next candidate threshold, j: next pair not yet predicted
  while (i < sorted.size()) {
    const double t = sorted[i].score;
    while (i < sorted.size() && sorted[i].score == t) ++i;
    while (j < sorted.size() && sorted[j].score + kScoreTolerance >= t) {
      (sorted[j].is_match ? tp : fp) += 1;
      ++j;
    }
    SweepRow row;
    row.threshold = t;
    row.tp = tp;
    row.fp = fp;
    row.fn = total_pos - tp;
    row.tn = total_neg - fp;
    row.precision = tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0;
    row.recall = static_cast<double>(tp) / total_pos;
    row.f_beta = f_beta(row.precision, row.recall, beta);
    c.sweep.push_back(row);
  }
  std::reverse(c.sweep.begin(), c.sweep.end());

  const SweepRow* best = &c.sweep.front();
  for (const auto& row : c.sweep) {
    if (row.f_beta > best->f_beta ||
        (row.f_beta == best->f_beta && row.precision > best->precision))
      best = &row;
  }
  c.threshold = best->threshold;
  c.precision = best->precision;
  c.recall = best->recall;
  c.f_beta = best->f_beta;
  return c;
}

Calibration calibrate_threshold(const std::vector<LabeledPair>& pairs,
                                const IdentityMatcher& matcher, double beta) {
  std::vector<ScoredPair> scored;
  scored.reserve(pairs.size());
  for (const auto& p : pairs) scored.push_back({matcher.score(p.query, p.identity_id), p.is_match});
  return calibrate_threshold(scored, beta);
}

std::vector<LabeledPair> load_labeled_pairs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open labeled pairs " + path.string());
  std::vector<LabeledPair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = Json::parse(line);
      out.push_back({j.at("query").get<std::string>(), j.at("identity").get<std::string>(),
                     j.at("match").get<bool>()});
    } catch (const Json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

Json to_json(const Calibration& c) {
  Json sweep = Json::array();
  for (const auto& r : c.sweep)
    sweep.push_back({{"threshold", r.threshold}, {"precision", r.precision}, {"recall", r.recall},
                     {"f_beta", r.f_beta}, {"tp", r.tp}, {"fp", r.fp}, {"fn", r.fn}, {"tn", r.tn}});
  return {{"beta", c.beta},         {"threshold", c.threshold}, {"precision", c.precision},
          {"recall", c.recall},     {"f_beta", c.f_beta},       {"sweep", std::move(sweep)}};
}

}  // namespace refmail::identity
