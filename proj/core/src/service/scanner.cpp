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

#include "refmail/service/scanner.hpp"

#include <chrono>
#include <map>

#include "refmail/ingest/tokens.hpp"

namespace refmail::service {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

verdict::Verdict bare_verdict(const std::string& source_id, std::string diagnostic) {
  verdict::Verdict v;
  v.source_id = source_id;
  v.decision = verdict::Decision::kNoIdentity;
  v.diagnostics.push_back(std::move(diagnostic));
  return v;
}

}  // namespace

Scanner::Scanner(ScannerResources resources, ScanOptions options)
    : resources_(std::move(resources)), options_(options) {
  if (!resources_.psl || !resources_.kb || !resources_.matcher || !resources_.tagger)
    throw std::invalid_argument("Scanner: missing resources");
}

tagging::BaselineTagger make_baseline_tagger(const kb::KnowledgeBase& kb,
                                             const tagging::ActionLexicon& lexicon,
                                             const std::string& extra_gazetteer) {
  tagging::Gazetteer g = extra_gazetteer.empty() ? tagging::Gazetteer()
                                                 : tagging::Gazetteer::load(extra_gazetteer);
  for (const auto& e : kb.entries())
    for (const auto& a : e.aliases) g.add(a);
  return tagging::BaselineTagger(std::move(g), lexicon);
}

Scanner Scanner::from_config(const ScanConfig& config) {
  config.validate();
  ScannerResources r;
  r.psl = std::make_shared<const ingest::PublicSuffixList>(
      ingest::PublicSuffixList::load(config.resolved_psl()));
  r.kb = std::make_shared<const kb::KnowledgeBase>(kb::load_kb(resolve_kb_path(config.kb_path)));
  const auto lexicon = tagging::ActionLexicon::load(config.resolved_lexicon());
  r.tagger = std::make_shared<const tagging::BaselineTagger>(
      make_baseline_tagger(*r.kb, lexicon, config.gazetteer_path));

  std::shared_ptr<const identity::Embedder> embedder, fallback;
  if (config.adapter_embed) {
    std::shared_ptr<JsonLineTransport> t = open_endpoint(*config.adapter_embed);
    embedder = std::make_shared<identity::AdapterEmbedder>(t, config.embed_dims,
                                                           config.adapter_deadline);
    fallback = std::make_shared<identity::CharEmbedder>();
  }
  r.matcher = std::make_shared<const identity::IdentityMatcher>(r.kb, embedder, fallback);

  if (config.adapter_tagger) {
    std::shared_ptr<JsonLineTransport> t = open_endpoint(*config.adapter_tagger);
    r.tagger_adapter = std::make_shared<const tagging::TaggerAdapter>(t, config.adapter_deadline);
  }
  if (config.adapter_extractor) {
    std::shared_ptr<JsonLineTransport> t = open_endpoint(*config.adapter_extractor);
    r.extractors.add("*/*", ingest::make_adapter_extractor(t, config.adapter_deadline));
  }

  ScanOptions o;
  o.threshold = config.threshold;
  o.policy.require_action = config.require_action;
  o.max_body_tokens = config.max_body_tokens;
  return Scanner(std::move(r), o);
}

verdict::Verdict Scanner::scan(const ingest::RawEmail& raw) const {
  const auto t0 = Clock::now();
  const auto email = ingest::parse_eml(raw, resources_.extractors, *resources_.psl);
  const double parse_ms = ms_since(t0);
  auto v = scan_parsed(email);
  v.timings_ms.insert(v.timings_ms.begin(), {"parse", parse_ms});
  v.timings_ms.back() = {"total", ms_since(t0)};
  return v;
}

verdict::Verdict Scanner::scan_parsed(const ingest::ParsedEmail& email) const {
  const auto t0 = Clock::now();
  const auto tokens = flatten_to_tokens(email, options_.max_body_tokens);
  const double flatten_ms = ms_since(t0);

  auto t1 = Clock::now();
  const auto tagged =
      tagging::model_tag(tokens, resources_.tagger_adapter.get(), *resources_.tagger);
  const double tag_ms = ms_since(t1);

  t1 = Clock::now();
  std::vector<identity::MatchResult> matches;
  std::vector<std::string> diagnostics;
  std::map<std::string, std::size_t> seen;
  for (const auto& s : tagged.spans) {
    if (s.cls != tagging::EntityClass::kIdentity || seen.count(s.text)) continue;
    seen[s.text] = matches.size();
    matches.push_back(resources_.matcher->match(s.text, options_.threshold, {options_.top_k}));
    if (!matches.back().diagnostic.empty()) diagnostics.push_back(matches.back().diagnostic);
  }
  const double match_ms = ms_since(t1);

  t1 = Clock::now();
  auto v = verdict::decide(email, tagged.spans, matches, options_.policy);
  const double decide_ms = ms_since(t1);

  if (!tagged.diagnostic.empty()) v.diagnostics.push_back(tagged.diagnostic);
  v.diagnostics.insert(v.diagnostics.end(), diagnostics.begin(), diagnostics.end());
  v.timings_ms = {{"flatten", flatten_ms},
                  {"tag", tag_ms},
                  {"match", match_ms},
                  {"decide", decide_ms},
                  {"total", ms_since(t0)}};
  return v;
}

verdict::Verdict Scanner::oversize(const std::string& source_id, std::size_t bytes) const {
  return bare_verdict(source_id, "oversize: message of " + std::to_string(bytes) +
                                     " bytes exceeds the size limit; not scanned");
}

verdict::Verdict Scanner::unreadable(const std::string& source_id, const std::string& error) const {
  return bare_verdict(source_id, "unreadable: " + error);
}

}  // namespace refmail::service
