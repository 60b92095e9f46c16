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
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "refmail/kb/knowledge_base.hpp"
#include "refmail/spearmail/client.hpp"

namespace refmail::spearmail {

inline constexpr std::string_view kSyntheticHeader = "X-SpearMail-Synthetic";
inline constexpr std::string_view kErrorMarker = "<generation-error>";

struct ProfileSpec {
  std::string profile_text;
  std::size_t m = 6;
  std::size_t n = 5;
  std::string recipient = "recipient@example.org";
};

struct ActivityPair {
  std::string activity;
  std::string organization;
  bool organization_in_kb = false;
  bool ok = true;
};

struct GeneratedEmail {
  std::size_t interest_index = 0;
  std::size_t activity_index = 0;
  std::string interest;
  ActivityPair pair;
  std::string subject;
  std::string sender_name;
  std::string sender_address;
  std::string recipient;
  std::string body;
  bool ok = true;
  std::string error;

  // RFC 5322 message with the synthetic watermark header.
  std::string to_eml() const;
};

struct GenerationPlan {
  std::vector<std::string> interests;                // size m
  std::vector<std::vector<ActivityPair>> activities;  // m x n
  std::vector<GeneratedEmail> emails;                 // m * n, row-major
  std::vector<std::string> errors;
  bool complete() const { return errors.empty(); }
};

struct GenerationOptions {
  std::size_t retries = 2;  // extra attempts per client call
  std::uint64_t seed = 0;
  const kb::KnowledgeBase* kb = nullptr;
};

// Interests, then n activity pairs per interest, then one email per pair.
// Failed stages leave error-marked entries; the shape is always m x n.
// Throws std::invalid_argument when m or n is zero.
GenerationPlan generate_plan(const ProfileSpec& spec, GenerationClient& client,
                             const GenerationOptions& options = {});

// Parsers for client replies; tolerant of list markers and surrounding prose.
std::vector<std::string> parse_interests(std::string_view reply);
std::vector<ActivityPair> parse_activities(std::string_view reply);

// Every http(s) URL replaced by https://example.invalid/<k>.
std::string neutralize_links(std::string_view body);

// Writes new/, cur/ and tmp/ under `dir` and one file per successful email
// into new/. File names depend only on profile and pair indices. Returns the
// number of files written.
std::size_t write_maildir(const std::filesystem::path& dir, const std::vector<GenerationPlan>& plans);

}  // namespace refmail::spearmail
