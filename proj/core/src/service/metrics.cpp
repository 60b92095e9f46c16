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

#include "refmail/service/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "refmail/util/text.hpp"

namespace refmail::service {

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return values[lo] + (values[hi] - values[lo]) * (pos - static_cast<double>(lo));
}

void fill_ratios(MetricsReport& r) {
  const auto& c = r.counts;
  r.precision = c.tp + c.fp ? std::optional<double>(static_cast<double>(c.tp) / (c.tp + c.fp)) : std::nullopt;
  r.recall = c.tp + c.fn ? std::optional<double>(static_cast<double>(c.tp) / (c.tp + c.fn)) : std::nullopt;
  r.fpr = c.fp + c.tn ? std::optional<double>(static_cast<double>(c.fp) / (c.fp + c.tn)) : std::nullopt;
}

void MetricsAccumulator::add(const verdict::Verdict& v, std::optional<bool> is_phishing) {
  for (const auto& [stage, ms] : v.timings_ms) timings_[stage].push_back(ms);
  if (!is_phishing) {
    ++excluded_;
    diagnostics_.push_back("unlabeled message excluded: " + v.source_id);
    return;
  }
  const bool alert = v.decision == verdict::Decision::kPhishing;
  if (*is_phishing) (alert ? counts_.tp : counts_.fn) += 1;
  else (alert ? counts_.fp : counts_.tn) += 1;
}

MetricsReport MetricsAccumulator::report() const {
  MetricsReport r;
  r.counts = counts_;
  r.excluded = excluded_;
  r.diagnostics = diagnostics_;
  fill_ratios(r);
  for (const auto& [stage, xs] : timings_) {
    LatencySummary s;
    s.samples = xs.size();
    s.p50 = percentile(xs, 0.5);
    s.p90 = percentile(xs, 0.9);
    s.p99 = percentile(xs, 0.99);
    s.max = xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end());
    r.stages[stage] = s;
  }
  if (auto it = timings_.find("total"); it != timings_.end()) r.median_runtime_ms = percentile(it->second, 0.5);
  return r;
}

std::unordered_map<std::string, bool> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open labels " + path.string());
  std::unordered_map<std::string, bool> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto sp = t.find_last_of(" \t");
    if (sp == std::string_view::npos)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected \"id label\"");
    const std::string id(text::trim(t.substr(0, sp)));
    const std::string label = text::ascii_lower(t.substr(sp + 1));
    if (label == "phishing" || label == "1") out[id] = true;
    else if (label == "benign" || label == "0") out[id] = false;
    else throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": unknown label " + label);
  }
  return out;
}

std::optional<bool> find_label(const std::unordered_map<std::string, bool>& labels,
                               const std::string& source_id) {
  if (auto it = labels.find(source_id); it != labels.end()) return it->second;
  const std::filesystem::path p(source_id);
  if (auto it = labels.find(p.filename().string()); it != labels.end()) return it->second;
  if (auto it = labels.find(p.stem().string()); it != labels.end()) return it->second;
  return std::nullopt;
}

Json to_json(const MetricsReport& r) {
  auto opt = [](const std::optional<double>& d) { return d ? Json(*d) : Json(nullptr); };
  Json stages = Json::object();
  for (const auto& [name, s] : r.stages)
    stages[name] = {{"samples", s.samples}, {"p50", s.p50}, {"p90", s.p90}, {"p99", s.p99}, {"max", s.max}};
  return {{"counts", {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}}},
          {"precision", opt(r.precision)},
          {"recall", opt(r.recall)},
          {"fpr", opt(r.fpr)},
          {"median_runtime_ms", r.median_runtime_ms},
          {"stage_latency_ms", std::move(stages)},
          {"excluded", r.excluded},
          {"diagnostics", r.diagnostics}};
}

}  // namespace refmail::service
