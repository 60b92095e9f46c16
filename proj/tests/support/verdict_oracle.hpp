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

// Independent restatement of the decision rule plus a random-case generator,
// shared by the unit and acceptance suites.

#include <string>
#include <vector>

#include "refmail/identity/matcher.hpp"
#include "refmail/ingest/email.hpp"
#include "refmail/tagging/tags.hpp"
#include "refmail/util/rng.hpp"
#include "refmail/verdict/verdict.hpp"

namespace refmail::testing {

struct VerdictCase {
  ingest::ParsedEmail email;
  std::vector<tagging::EntitySpan> spans;
  std::vector<identity::MatchResult> matches;
  verdict::DecisionPolicy policy;
};

inline verdict::Decision oracle_decision(const VerdictCase& c) {
  bool claimed = false, some_ok = false;
  for (const auto& m : c.matches)
    for (const auto& a : m.accepted) {
      claimed = true;
      if (c.email.sender_domain.empty()) continue;
      const auto& allowed = a.internal ? c.email.recipient_domains : a.domains;
      for (const auto& d : allowed) some_ok |= d == c.email.sender_domain;
    }
  bool action = false;
  for (const auto& s : c.spans) action |= s.cls == tagging::EntityClass::kAction;
  if (!claimed) return verdict::Decision::kNoIdentity;
  if (some_ok) return verdict::Decision::kBenign;
  if (action || !c.policy.require_action) return verdict::Decision::kPhishing;
  return verdict::Decision::kNoAction;
}

inline VerdictCase random_case(Rng& rng) {
  static const std::vector<std::string> pool = {"a.com", "b.org", "c.net", "corp.example", "d.co.uk"};
  auto pick = [&] { return pool[rng.uniform(pool.size())]; };
  VerdictCase c;
  c.email.source_id = "r";
  if (rng.bernoulli(0.9)) {
    c.email.sender_domain = pick();
    c.email.sender_address = "x@" + c.email.sender_domain;
  }
  for (std::size_t i = 0, n = rng.uniform(3); i < n; ++i) c.email.recipient_domains.insert(pick());
  for (std::size_t i = 0, n = rng.uniform(4); i < n; ++i) {
    identity::MatchResult m;
    m.query = "phrase" + std::to_string(i);
    for (std::size_t k = 0, na = rng.uniform(3); k < na; ++k) {
      identity::IdentityScore s;
      s.internal = rng.bernoulli(0.2);
      s.identity_id = s.internal ? "internal" : "org" + std::to_string(rng.uniform(5));
      s.display_name = s.identity_id;
      s.score = 0.83 + rng.unit() * 0.17;
      if (!s.internal)
        for (std::size_t d = 0, nd = 1 + rng.uniform(2); d < nd; ++d) s.domains.insert(pick());
      m.accepted.push_back(s);
    }
    m.ranked = m.accepted;
    c.matches.push_back(std::move(m));
  }
  for (std::size_t i = 0, n = rng.uniform(4); i < n; ++i) {
    tagging::EntitySpan s;
    s.cls = rng.bernoulli(0.5) ? tagging::EntityClass::kAction : tagging::EntityClass::kIdentity;
    s.start_token = s.end_token = i;
    s.text = "span" + std::to_string(i);
    c.spans.push_back(s);
  }
  c.policy.require_action = rng.bernoulli(0.7);
  return c;
}

enum class IdentityState { kNone, kConsistent, kInconsistent };

// One cell of the identity x action x policy grid.
inline VerdictCase grid_case(IdentityState id, bool action, bool require_action) {
  VerdictCase c;
  c.email.source_id = "grid";
  c.email.sender_address = "x@sender.com";
  c.email.sender_domain = "sender.com";
  c.email.recipient_domains = {"corp.example"};
  if (id != IdentityState::kNone) {
    identity::MatchResult m;
    m.query = "Acme";
    identity::IdentityScore s;
    s.identity_id = "acme";
    s.display_name = "Acme";
    s.score = 1.0;
    s.domains = {id == IdentityState::kConsistent ? "sender.com" : "acme.com"};
    m.accepted = {s};
    m.ranked = m.accepted;
    c.matches.push_back(m);
  }
  if (action) c.spans.push_back({tagging::EntityClass::kAction, 3, 4, "click here"});
  c.policy.require_action = require_action;
  return c;
}

}  // namespace refmail::testing
