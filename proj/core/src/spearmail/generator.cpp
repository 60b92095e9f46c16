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

#include "refmail/spearmail/generator.hpp"

#include <cctype>
#include <cstdio>
#include <functional>
#include <fstream>
#include <optional>
#include <regex>
#include <stdexcept>
#include <unordered_set>

#include "refmail/ingest/extractors.hpp"
#include "refmail/spearmail/prompts.hpp"
#include "refmail/util/rng.hpp"
#include "refmail/util/text.hpp"

namespace refmail::spearmail {

namespace {

constexpr std::string_view kDomainStems[] = {"events", "community", "connect", "outreach",
                                             "members", "invites", "network", "programs"};
constexpr std::string_view kLocalParts[] = {"info", "hello", "events", "team", "invite", "contact"};

std::string strip_list_marker(std::string_view line) {
  line = text::trim(line);
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) line.remove_prefix(i + 1);
  else if (!line.empty() && (line[0] == '-' || line[0] == '*')) line.remove_prefix(1);
  return std::string(text::trim(line));
}

std::optional<std::string> ask(GenerationClient& client, const std::string& prompt,
                               std::size_t retries, std::string* error,
                               const std::function<bool(const std::string&)>& good) {
  for (std::size_t attempt = 0; attempt <= retries; ++attempt) {
    try {
      std::string reply = client.generate(prompt);
      if (good(reply)) return reply;
      *error = "unusable reply";
    } catch (const GenerationError& e) {
      *error = e.what();
    }
  }
  return std::nullopt;
}

std::string sender_domain(Rng& rng, const std::unordered_set<std::string>& taken) {
  for (;;) {
    char hex[8];
    std::snprintf(hex, sizeof hex, "%04x", static_cast<unsigned>(rng.uniform(0x10000)));
    std::string d = std::string(kDomainStems[rng.uniform(std::size(kDomainStems))]) + "-" + hex +
                    ".example";
    if (!taken.count(d)) return d;
  }
}

bool is_ascii(std::string_view s) {
  for (unsigned char c : s)
    if (c >= 0x80) return false;
  return true;
}

std::string header_text(std::string_view s) {
  std::string clean;
  for (char c : s) clean.push_back(c == '\r' || c == '\n' ? ' ' : c);
  if (is_ascii(clean)) return clean;
  return "=?UTF-8?B?" + ingest::base64_encode(clean) + "?=";
}

}  // namespace

std::vector<std::string> parse_interests(std::string_view reply) {
  std::vector<std::string> out;
  for (auto line : text::split(reply, '\n')) {
    const auto t = text::trim(line);
    if (t.empty() || !(std::isdigit(static_cast<unsigned char>(t[0])) || t[0] == '-' || t[0] == '*'))
      continue;
    std::string item = strip_list_marker(t);
    for (std::string_view cut : {" - Source:", " (source", "Source:", " - source:"}) {
      const auto p = item.find(cut);
      if (p != std::string::npos) item.resize(p);
    }
    item = std::string(text::trim(item));
    while (!item.empty() && (item.back() == ':' || item.back() == ',' || item.back() == ';'))
      item.pop_back();
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<ActivityPair> parse_activities(std::string_view reply) {
  std::vector<ActivityPair> out;
  for (auto line : text::split(reply, '\n')) {
    const std::string item = strip_list_marker(line);
    const auto a = item.find("Activity:");
    const auto o = item.find("Organization:");
    if (a == std::string::npos || o == std::string::npos || o < a) continue;
    std::string act(text::trim(std::string_view(item).substr(a + 9, o - a - 9)));
    while (!act.empty() && (act.back() == ';' || act.back() == ',')) act.pop_back();
    std::string org(text::trim(std::string_view(item).substr(o + 13)));
    while (!org.empty() && (org.back() == '.' || org.back() == ';')) org.pop_back();
    if (act.empty() || org.empty()) continue;
    out.push_back({std::string(text::trim(act)), org, false, true});
  }
  return out;
}

std::string neutralize_links(std::string_view body) {
  static const std::regex url(R"(https?://[^\s<>"')\]]+)", std::regex::icase);
  std::string out;
  std::size_t k = 0;
  std::string src(body);
  auto begin = std::sregex_iterator(src.begin(), src.end(), url);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto pos = static_cast<std::size_t>(it->position());
    std::string match = it->str();
    std::string tail;
    while (!match.empty() && (match.back() == '.' || match.back() == ',' || match.back() == ';')) {
      tail.insert(tail.begin(), match.back());
      match.pop_back();
    }
    out.append(src, last, pos - last);
    out += "https://example.invalid/" + std::to_string(++k) + tail;
    last = pos + static_cast<std::size_t>(it->length());
  }
  out.append(src, last, std::string::npos);
  return out;
}

std::string GeneratedEmail::to_eml() const {
  const std::uint64_t h = fnv1a64(sender_address + "\n" + subject + "\n" + body);
  char id[32];
  std::snprintf(id, sizeof id, "%016llx", static_cast<unsigned long long>(h));
  std::string name = header_text(sender_name);
  std::string quoted;
  for (char c : name) {
    if (c == '"' || c == '\\') quoted.push_back('\\');
    quoted.push_back(c);
  }
  std::string out;
  out += "From: \"" + quoted + "\" <" + sender_address + ">\n";
  out += "To: <" + recipient + ">\n";
  out += "Subject: " + header_text(subject) + "\n";
  out += "Date: Mon, 06 Jan 2025 09:00:00 +0000\n";
  out += "Message-ID: <spearmail." + std::string(id) + "@example.invalid>\n";
  out += "MIME-Version: 1.0\n";
  out += "Content-Type: text/plain; charset=utf-8\n";
  out += "Content-Transfer-Encoding: 8bit\n";
  out += std::string(kSyntheticHeader) + ": true\n";
  out += "\n";
  out += body;
  if (!body.empty() && body.back() != '\n') out += "\n";
  return out;
}

GenerationPlan generate_plan(const ProfileSpec& spec, GenerationClient& client,
                             const GenerationOptions& options) {
  if (spec.m == 0 || spec.n == 0) throw std::invalid_argument("generate_plan: m and n must be >= 1");
  GenerationPlan plan;
  std::string error;

  std::unordered_set<std::string> kb_domains;
  if (options.kb)
    for (const auto& e : options.kb->entries()) kb_domains.insert(e.domains.begin(), e.domains.end());

  // Stage 1: interests.
  std::vector<std::string> interests;
  auto reply = ask(client, interest_prompt(spec.profile_text, spec.m), options.retries, &error,
                   [&](const std::string& r) { return parse_interests(r).size() >= spec.m; });
  if (reply) {
    interests = parse_interests(*reply);
  } else {
    plan.errors.push_back("interest inference: " + error);
  }
  interests.resize(spec.m, std::string(kErrorMarker));
  plan.interests = interests;

  // Stage 2: activity-organization pairs per interest.
  for (std::size_t i = 0; i < spec.m; ++i) {
    std::vector<ActivityPair> pairs;
    if (plan.interests[i] != kErrorMarker) {
      auto r = ask(client, activity_prompt(plan.interests[i], spec.n), options.retries, &error,
                   [&](const std::string& s) { return parse_activities(s).size() >= spec.n; });
      if (r) pairs = parse_activities(*r);
      else plan.errors.push_back("activity inference for interest " + std::to_string(i + 1) + ": " + error);
    }
    pairs.resize(spec.n, ActivityPair{std::string(kErrorMarker), std::string(kErrorMarker), false, false});
    for (auto& p : pairs)
      if (p.ok && options.kb) p.organization_in_kb = options.kb->resolve_alias(p.organization) != nullptr;
    plan.activities.push_back(std::move(pairs));
  }

  // Stage 3: one email per pair.
  for (std::size_t i = 0; i < spec.m; ++i) {
    for (std::size_t j = 0; j < spec.n; ++j) {
      GeneratedEmail e;
      e.interest_index = i;
      e.activity_index = j;
      e.interest = plan.interests[i];
      e.pair = plan.activities[i][j];
      e.recipient = spec.recipient;
      Rng rng(mix_seed(options.seed, i * 4096 + j));
      if (!e.pair.ok) {
        e.ok = false;
        e.error = "no activity-organization pair";
      } else {
        auto body = ask(client, email_prompt(spec.profile_text, e.interest, e.pair.activity,
                                             e.pair.organization),
                        options.retries, &error,
                        [](const std::string& s) { return !text::trim(s).empty(); });
        if (body) {
          e.body = neutralize_links(*body);
        } else {
          e.ok = false;
          e.error = error;
          plan.errors.push_back("email " + std::to_string(i + 1) + "." + std::to_string(j + 1) + ": " + error);
        }
      }
      e.subject = e.ok ? "Invitation: " + e.pair.activity : std::string(kErrorMarker);
      e.sender_name = e.ok ? e.pair.organization : std::string();
      e.sender_address = std::string(kLocalParts[rng.uniform(std::size(kLocalParts))]) + "@" +
                         sender_domain(rng, kb_domains);
      plan.emails.push_back(std::move(e));
    }
  }
  return plan;
}

std::size_t write_maildir(const std::filesystem::path& dir, const std::vector<GenerationPlan>& plans) {
  namespace fs = std::filesystem;
  for (const char* sub : {"new", "cur", "tmp"}) fs::create_directories(dir / sub);
  std::size_t written = 0;
  for (std::size_t p = 0; p < plans.size(); ++p) {
    for (const auto& e : plans[p].emails) {
      if (!e.ok) continue;
      char name[64];
      std::snprintf(name, sizeof name, "spearmail.p%04zu.i%02zu.j%02zu.eml", p, e.interest_index,
                    e.activity_index);
      const fs::path tmp = dir / "tmp" / name;
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << e.to_eml();
      }
      fs::rename(tmp, dir / "new" / name);
      ++written;
    }
  }
  return written;
}

}  // namespace refmail::spearmail
