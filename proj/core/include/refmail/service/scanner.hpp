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
#include <memory>
#include <string>

#include "refmail/identity/matcher.hpp"
#include "refmail/ingest/email.hpp"
#include "refmail/ingest/extractors.hpp"
#include "refmail/ingest/public_suffix.hpp"
#include "refmail/kb/knowledge_base.hpp"
#include "refmail/service/config.hpp"
#include "refmail/tagging/baseline_tagger.hpp"
#include "refmail/tagging/model_tagger.hpp"
#include "refmail/verdict/verdict.hpp"

namespace refmail::service {

// Immutable, shareable state behind a scan. Adapter handles may be null.
struct ScannerResources {
  std::shared_ptr<const ingest::PublicSuffixList> psl;
  std::shared_ptr<const kb::KnowledgeBase> kb;
  std::shared_ptr<const identity::IdentityMatcher> matcher;
  std::shared_ptr<const tagging::BaselineTagger> tagger;
  std::shared_ptr<const tagging::TaggerAdapter> tagger_adapter;
  ingest::TextExtractorRegistry extractors = ingest::TextExtractorRegistry::with_defaults();
};

struct ScanOptions {
  double threshold = kDefaultThreshold;
  verdict::DecisionPolicy policy;
  std::size_t max_body_tokens = 20000;
  std::size_t top_k = 5;
};

// parse -> flatten -> tag -> match each identity span -> decide. Thread-safe.
class Scanner {
 public:
  Scanner(ScannerResources resources, ScanOptions options);

  // Loads the KB, public-suffix list, lexicon and optional adapters named by
  // the config. Throws on any load failure (kb::KbError, ConfigError, ...).
  static Scanner from_config(const ScanConfig& config);

  verdict::Verdict scan(const ingest::RawEmail& raw) const;
  verdict::Verdict scan_parsed(const ingest::ParsedEmail& email) const;

  // Diagnostic verdicts for messages that were never parsed.
  verdict::Verdict oversize(const std::string& source_id, std::size_t bytes) const;
  verdict::Verdict unreadable(const std::string& source_id, const std::string& error) const;

  const ScannerResources& resources() const { return resources_; }
  const ScanOptions& options() const { return options_; }

 private:
  ScannerResources resources_;
  ScanOptions options_;
};

// Baseline tagger over the KB aliases plus an optional extra gazetteer file.
tagging::BaselineTagger make_baseline_tagger(const kb::KnowledgeBase& kb,
                                             const tagging::ActionLexicon& lexicon,
                                             const std::string& extra_gazetteer = {});

}  // namespace refmail::service
