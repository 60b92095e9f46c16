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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>

namespace refmail::ingest {

// Raised when no registrable domain can be derived. Carries the raw input.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string raw, const std::string& reason)
      : std::runtime_error(reason + ": '" + raw + "'"), raw_(std::move(raw)) {}
  const std::string& raw_input() const noexcept { return raw_; }

 private:
  std::string raw_;
};

// Public-suffix rule set in the publicsuffix.org text format: one rule per
// line, `//` comments, `*.` wildcards and `!` exceptions. Unlisted TLDs fall
// back to the implicit `*` rule.
class PublicSuffixList {
 public:
  PublicSuffixList() = default;

  static PublicSuffixList parse(std::string_view text);
  static PublicSuffixList load(const std::filesystem::path& path);

  // Lowercased registrable domain (public suffix plus one label), or nullopt
  // if `host` is itself a public suffix or is not a well-formed host name.
  // Punycode labels are matched against Unicode rules; the output keeps the
  // input's label form.
  std::optional<std::string> registrable_domain(std::string_view host) const;

  // Number of labels in the public suffix of `host` (at least 1).
  std::size_t suffix_label_count(std::string_view host) const;

  std::size_t rule_count() const { return exact_.size() + wildcard_.size() + exception_.size(); }

 private:
  std::unordered_set<std::string> exact_;
  std::unordered_set<std::string> wildcard_;   // stores "X" for rule "*.X"
  std::unordered_set<std::string> exception_;  // stores "X" for rule "!X"
};

// Accepts an address ("Name <user@host>", "user@host") or a bare host and
// returns its registrable domain. Throws DomainError on malformed input.
std::string extract_registrable_domain(std::string_view address_or_host,
                                       const PublicSuffixList& suffixes);

// RFC 3492 decoding of the part after "xn--". Returns nullopt on bad input.
std::optional<std::u32string> punycode_decode(std::string_view encoded);

}  // namespace refmail::ingest
