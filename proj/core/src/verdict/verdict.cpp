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

#include "refmail/verdict/verdict.hpp"

#include <stdexcept>

namespace refmail::verdict {

namespace {

struct Candidate {
  const identity::IdentityScore* score;
  const identity::MatchResult* match;
  bool consistent;
};

}  // namespace

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::kPhishing: return "Phishing";
    case Decision::kBenign: return "Benign";
    case Decision::kNoIdentity: return "NoIdentity";
    case Decision::kNoAction: return "NoAction";
  }
  return "NoIdentity";
}

std::optional<Decision> parse_decision(std::string_view name) {
  for (Decision d : {Decision::kPhishing, Decision::kBenign, Decision::kNoIdentity, Decision::kNoAction})
    if (to_string(d) == name) return d;
  return std::nullopt;
}

Verdict decide(const ingest::ParsedEmail& email, const std::vector<tagging::EntitySpan>& spans,
               const std::vector<identity::MatchResult>& matches, DecisionPolicy policy) {
  Verdict v;
  v.source_id = email.source_id;
  v.sender_address = email.sender_address;
  v.sender_domain = email.sender_domain;
  v.diagnostics = email.diagnostics;
  if (!email.authentication_results.empty())
    v.diagnostics.push_back("authentication-results: " + email.authentication_results);

  for (const auto& s : spans)
    if (s.cls == tagging::EntityClass::kAction) v.instructions.push_back(s.text);

  std::vector<Candidate> cands;
  for (const auto& m : matches) {
    for (const auto& a : m.accepted) {
      const bool consistent = !email.sender_domain.empty() &&
                              (a.internal ? email.recipient_domains.count(email.sender_domain) > 0
                                          : a.domains.count(email.sender_domain) > 0);
      cands.push_back({&a, &m, consistent});
      if (a.internal)
        v.expected_domains.insert(email.recipient_domains.begin(), email.recipient_domains.end());
      else
        v.expected_domains.insert(a.domains.begin(), a.domains.end());
    }
  }

  if (cands.empty()) {
    v.decision = Decision::kNoIdentity;
    return v;
  }

  bool any_consistent = false;
  for (const auto& c : cands) any_consistent |= c.consistent;
  // Report the highest-scoring identity among those that decided the outcome.
  const Candidate* pick = nullptr;
  for (const auto& c : cands) {
    if (c.consistent != any_consistent) continue;
    if (!pick || c.score->score > pick->score->score) pick = &c;
  }
  v.claimed_identity = pick->score->display_name;
  v.claimed_identity_id = pick->score->identity_id;
  v.claimed_phrase = pick->match->query;
  v.claimed_internal = pick->score->internal;

  if (any_consistent)
    v.decision = Decision::kBenign;
  else if (!v.instructions.empty() || !policy.require_action)
    v.decision = Decision::kPhishing;
  else
    v.decision = Decision::kNoAction;

  if (v.decision == Decision::kPhishing) v.explanation = render_explanation(v);
  return v;
}

std::string render_explanation(const Verdict& v) {
  if (v.decision != Decision::kPhishing)
    throw std::logic_error("render_explanation: verdict is " + std::string(to_string(v.decision)));
  const std::string& from = v.sender_address.empty() ? v.sender_domain : v.sender_address;
  std::string s = "This email is flagged as phishing because it claims to be ";
  if (v.claimed_internal)
    s += "an internal sender but was sent from outside your organization as " + from;
  else
    s += "from " + v.claimed_identity.value_or("an unknown identity") +
         " but was sent from a non-official address as " + from;
  if (v.instructions.empty()) return s + ".";
  s += ", and it has the instruction of " + v.instructions.front();
  if (const std::size_t more = v.instructions.size() - 1; more > 0)
    s += " and " + std::to_string(more) + (more == 1 ? " more instruction" : " more instructions");
  return s + ".";
}

nlohmann::ordered_json to_json(const Verdict& v) {
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  for (const auto& [stage, ms] : v.timings_ms) timings[stage] = ms;
  auto opt = [](const std::optional<std::string>& s) {
    return s ? nlohmann::ordered_json(*s) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["decision"] = std::string(to_string(v.decision));
  j["claimed_identity"] = opt(v.claimed_identity);
  j["claimed_phrase"] = opt(v.claimed_phrase);
  j["sender_domain"] = v.sender_domain;
  j["expected_domains"] = std::vector<std::string>(v.expected_domains.begin(), v.expected_domains.end());
  j["instructions"] = v.instructions;
  j["explanation"] = v.explanation;
  j["timings_ms"] = std::move(timings);
  j["diagnostics"] = v.diagnostics;
  return j;
}

}  // namespace refmail::verdict
