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

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "refmail/identity/matcher.hpp"
#include "refmail/ingest/email.hpp"
#include "refmail/tagging/tags.hpp"
#include "refmail/util/line_json.hpp"

namespace refmail::verdict {

enum class Decision { kPhishing, kBenign, kNoIdentity, kNoAction };

std::string_view to_string(Decision d);
std::optional<Decision> parse_decision(std::string_view name);

struct DecisionPolicy {
  // When false, an inconsistent identity alone raises an alert.
  bool require_action = true;
};

struct Verdict {
  std::string source_id;
  Decision decision = Decision::kNoIdentity;
  std::optional<std::string> claimed_identity;     // display name
  std::optional<std::string> claimed_identity_id;
  std::optional<std::string> claimed_phrase;
  bool claimed_internal = false;
  std::string sender_address;
  std::string sender_domain;
  std::set<std::string> expected_domains;
  std::vector<std::string> instructions;  // action span texts in token order
  std::string explanation;                // non-empty iff Phishing
  std::vector<std::pair<std::string, double>> timings_ms;
  std::vector<std::string> diagnostics;
};

// `matches` holds one result per identity span (in any order). An accepted
// external identity is consistent iff the sender domain is one of its
// domains; an accepted internal identity iff the sender domain is one of the
// recipient domains. Any consistent identity makes the message Benign.
Verdict decide(const ingest::ParsedEmail& email, const std::vector<tagging::EntitySpan>& spans,
               const std::vector<identity::MatchResult>& matches, DecisionPolicy policy = {});

// Throws std::logic_error unless v.decision is Phishing.
std::string render_explanation(const Verdict& v);

// Keys in schema order.
nlohmann::ordered_json to_json(const Verdict& v);

}  // namespace refmail::verdict
