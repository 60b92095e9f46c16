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

#include "refmail/spearmail/client.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <vector>

#include "refmail/util/rng.hpp"
#include "refmail/util/text.hpp"

namespace refmail::spearmail {

namespace {

constexpr std::array<std::string_view, 40> kInterests = {
    "amateur astronomy", "trail running", "bird watching", "jazz piano", "open-source software",
    "urban gardening", "chess", "rock climbing", "film photography", "marathon training",
    "sourdough baking", "robotics", "sailing", "machine learning research", "classical music",
    "cycling", "volunteer tutoring", "beekeeping", "woodworking", "travel writing",
    "board games", "yoga", "creative writing", "home brewing", "astrophotography", "pottery",
    "genealogy", "cryptography", "wildlife conservation", "swimming", "ceramics", "podcasting",
    "vintage cars", "tennis", "salsa dancing", "stand-up comedy", "public speaking",
    "language learning", "3D printing", "mountaineering"};

constexpr std::array<std::string_view, 5> kSources = {
    "listed in the profile", "publication history", "conference talks", "public social posts",
    "alumni newsletter"};

constexpr std::array<std::string_view, 8> kActivityForms = {
    "{} workshop", "annual {} meetup", "{} volunteer day", "{} webinar series",
    "{} summer retreat", "{} reading circle", "{} charity challenge", "{} mentoring program"};

constexpr std::array<std::string_view, 16> kOrganizations = {
    "Riverside Community Association", "Northfield Arts Council", "Open Knowledge Society",
    "Lakeshore Science Center", "Harbor City Library Friends", "Greenway Trust",
    "Maple Valley Makers Guild", "Summit Outdoor Club", "Civic Learning Alliance",
    "Westbrook Heritage Foundation", "Blue Ridge Volunteers", "Coastal Research Network",
    "Pinecrest Youth League", "Metro Innovation Hub", "Silver Lake Music Collective",
    "Eastgate Wellness Institute"};

constexpr std::array<std::string_view, 6> kCues = {"Reciprocity", "Consistency", "Social Proof",
                                                   "Authority",   "Liking",      "Scarcity"};

std::size_t number_after(std::string_view s, std::string_view marker, std::size_t fallback) {
  const auto p = s.find(marker);
  if (p == std::string_view::npos) return fallback;
  std::size_t i = p + marker.size(), v = 0;
  bool any = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    v = v * 10 + static_cast<std::size_t>(s[i++] - '0');
    any = true;
  }
  return any ? v : fallback;
}

std::string between(std::string_view s, std::string_view open, std::string_view close) {
  const auto a = s.rfind(open);
  if (a == std::string_view::npos) return {};
  const auto start = a + open.size();
  const auto b = s.find(close, start);
  return std::string(s.substr(start, b == std::string_view::npos ? s.size() - start : b - start));
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 32);
  return s;
}

std::string slug(std::string_view s) {
  std::string out;
  for (char c : s)
    if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::tolower(c)));
  return out;
}

std::string mock_interests(std::string_view prompt, Rng& rng) {
  const std::size_t m = number_after(prompt, "give me ", 3);
  std::vector<std::size_t> order(kInterests.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform(i)]);
  std::string out = "Here are the interests I inferred:\n";
  for (std::size_t k = 0; k < m; ++k) {
    std::string interest(kInterests[order[k % order.size()]]);
    if (k >= order.size()) interest += " (group " + std::to_string(k / order.size() + 1) + ")";
    out += std::to_string(k + 1) + ". " + capitalize(interest) +
           " - Source: " + std::string(kSources[rng.uniform(kSources.size())]) + "\n";
  }
  return out;
}

std::string mock_activities(std::string_view prompt, Rng& rng) {
  const std::size_t n = number_after(prompt, "help me generate ", 3);
  const std::string interest = text::ascii_lower(between(prompt, "interest: ", ", help me generate"));
  std::string out;
  const std::size_t f0 = rng.uniform(kActivityForms.size());
  const std::size_t o0 = rng.uniform(kOrganizations.size());
  for (std::size_t k = 0; k < n; ++k) {
    std::string act(kActivityForms[(f0 + k) % kActivityForms.size()]);
    act.replace(act.find("{}"), 2, interest);
    if (k >= kActivityForms.size()) act += " " + std::to_string(k / kActivityForms.size() + 1);
    out += std::to_string(k + 1) + ". Activity: " + capitalize(act) +
           "; Organization: " + std::string(kOrganizations[(o0 + k) % kOrganizations.size()]) + "\n";
  }
  return out;
}

std::string mock_email(std::string_view prompt, Rng& rng) {
  const std::string interest = between(prompt, ", interest: ", ", write him an email");
  std::string pair = between(prompt, "identity as: ", "\n");
  if (!pair.empty() && pair.back() == '.') pair.pop_back();
  std::string activity = between(pair, "Activity: ", ";");
  std::string org = between(pair, "Organization: ", "\n");
  static constexpr std::array<std::string_view, 4> kSenders = {"Jordan Lee", "Sam Rivera",
                                                               "Alex Morgan", "Taylor Brooks"};
  static constexpr std::array<std::string_view, 3> kDeadlines = {"Friday", "the end of the month",
                                                                 "next Wednesday"};
  std::string out;
  out += "Dear friend,\n\n";
  out += "I came across your profile and noticed your interest in " + text::ascii_lower(interest) + ". ";
  out += "On behalf of " + org + ", I would like to personally invite you to our " +
         text::ascii_lower(activity) + ". ";
  out += "Several members of our community have already signed up, and places are limited.\n\n";
  out += "Please complete the short registration form at https://www." + slug(org) +
         ".org/register before " + std::string(kDeadlines[rng.uniform(kDeadlines.size())]) + ".\n\n";
  out += "Best regards,\n" + std::string(kSenders[rng.uniform(kSenders.size())]) + "\n" + org + "\n";
  return out;
}

std::string mock_persuasion(Rng& rng) {
  std::string out;
  for (auto cue : kCues)
    out += std::string(cue) + ": " + std::to_string(1 + rng.uniform(5)) + "\n";
  return out;
}

}  // namespace

std::string MockGenerationClient::generate(std::string_view prompt) {
  Rng rng(mix_seed(seed_, fnv1a64(prompt)));
  if (prompt.rfind("Given the list of information about an individual:", 0) == 0)
    return mock_interests(prompt, rng);
  if (prompt.rfind("I am a professional trying to connect", 0) == 0)
    return mock_activities(prompt, rng);
  if (prompt.rfind("Given his profile:", 0) == 0) return mock_email(prompt, rng);
  if (prompt.find("persuasion") != std::string_view::npos) return mock_persuasion(rng);
  return "I can help with that.";
}

AdapterGenerationClient::AdapterGenerationClient(std::shared_ptr<JsonLineTransport> transport,
                                                 std::chrono::milliseconds deadline)
    : transport_(std::move(transport)), deadline_(deadline) {}

std::string AdapterGenerationClient::generate(std::string_view prompt) {
  std::string error;
  auto resp = transport_->call({{"id", next_request_id()}, {"prompt", prompt}}, deadline_, &error);
  if (!resp) throw GenerationError("generation adapter: " + error);
  const auto it = resp->find("text");
  if (it == resp->end() || !it->is_string())
    throw GenerationError("generation adapter: protocol error: missing text");
  return it->get<std::string>();
}

}  // namespace refmail::spearmail
