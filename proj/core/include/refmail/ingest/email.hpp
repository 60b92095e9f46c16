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

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "refmail/ingest/extractors.hpp"
#include "refmail/ingest/public_suffix.hpp"

namespace refmail::ingest {

// One unparsed RFC 5322 message and where it came from.
struct RawEmail {
  std::string bytes;
  std::string source_id;
};

enum class SegmentKind { kPlain, kHtmlExtracted, kAttachmentExtracted };

std::string_view to_string(SegmentKind kind);

struct BodySegment {
  SegmentKind kind = SegmentKind::kPlain;
  std::string text;

  friend bool operator==(const BodySegment&, const BodySegment&) = default;
};

// Normalized view of one message. Missing fields are empty strings or empty
// sets; all text is well-formed UTF-8.
struct ParsedEmail {
  std::string source_id;
  std::string sender_name;
  std::string sender_address;
  std::string sender_domain;  // registrable, lowercase; empty if unknown
  std::set<std::string> recipient_domains;
  std::string subject;
  std::vector<BodySegment> body_segments;
  std::string authentication_results;  // echoed verbatim, never validated
  std::vector<std::string> diagnostics;

  // Body segments joined by blank lines; the text the tagger sees.
  std::string body_text() const;
};

// Total over arbitrary input: never throws on malformed messages, recording
// diagnostics instead.
ParsedEmail parse_eml(const RawEmail& raw, const TextExtractorRegistry& extractors,
                      const PublicSuffixList& suffixes);

// Header-level helpers, exposed for tests and the mailbox readers.
struct Mailbox {
  std::string display_name;
  std::string address;
};

// Parses an address-list header value ("A <a@x>, b@y, \"C, D\" <c@z>").
std::vector<Mailbox> parse_address_list(std::string_view value);

// Decodes RFC 2047 encoded words ("=?utf-8?B?...?=") into UTF-8.
std::string decode_encoded_words(std::string_view value);

std::string decode_base64(std::string_view in);
std::string decode_quoted_printable(std::string_view in);

// Converts bytes in the declared charset to UTF-8, falling back to a lossy
// UTF-8 decode. `known` is false when the charset was not recognized.
std::string to_utf8(std::string_view bytes, std::string_view charset, bool* known = nullptr);

}  // namespace refmail::ingest
