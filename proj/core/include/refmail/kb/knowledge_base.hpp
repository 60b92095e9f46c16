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
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "refmail/ingest/public_suffix.hpp"

namespace refmail::kb {

inline constexpr std::string_view kInternalId = "internal";
inline constexpr std::string_view kInternalName = "Internal";

struct KbEntry {
  std::string id;
  std::string name;
  std::vector<std::string> aliases;
  std::set<std::string> domains;
  bool internal = false;

  friend bool operator==(const KbEntry&, const KbEntry&) = default;
};

// Load/build failure. `details` lists every problem found (collisions, bad
// lines), one per element.
class KbError : public std::runtime_error {
 public:
  KbError(const std::string& what, std::vector<std::string> details)
      : std::runtime_error(what), details_(std::move(details)) {}
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  std::vector<std::string> details_;
};

enum class Severity { kWarning, kError };

struct KbDiagnostic {
  Severity severity = Severity::kWarning;
  std::string entry_id;
  std::string message;
  std::string suggestion;  // e.g. the registrable form of a domain

  std::string to_string() const;
};

// Immutable, validated set of entries with exactly one internal entry.
class KnowledgeBase {
 public:
  // Canonicalizes entries, injects the internal entry if none is present and
  // indexes aliases. Throws KbError on alias collisions (after case folding),
  // duplicate ids, several internal entries or an internal entry with domains.
  static KnowledgeBase build(std::vector<KbEntry> entries);

  const std::vector<KbEntry>& entries() const { return entries_; }  // sorted by id
  const KbEntry* find(std::string_view id) const;
  const KbEntry* resolve_alias(std::string_view alias) const;
  const KbEntry& internal_entry() const { return entries_[internal_index_]; }
  std::size_t alias_count() const { return alias_index_.size(); }

 private:
  std::vector<KbEntry> entries_;
  std::unordered_map<std::string, std::size_t> id_index_;
  std::unordered_map<std::string, std::size_t> alias_index_;  // folded alias -> entry
  std::size_t internal_index_ = 0;
};

// Trimmed name/aliases, case-folded alias dedupe (first spelling kept),
// lowercased domains, name as alias when the list is empty.
KbEntry canonicalize(KbEntry entry);

// Aliases used for an injected internal entry.
const std::vector<std::string>& default_internal_aliases();

// JSON lines `{"id","name","aliases","domains","internal"}`; blank lines are
// skipped. Throws KbError with the line number on malformed input.
std::vector<KbEntry> parse_kb_entries(std::istream& in, std::string_view source = "<input>");
KnowledgeBase load_kb(const std::filesystem::path& path);

// Canonical serialization: one compact object per line, entries by id, fixed
// key order. load_kb(save_kb(kb)) == kb.
std::string serialize_entry(const KbEntry& entry);
std::string serialize_kb(const KnowledgeBase& kb);
void save_kb(const KnowledgeBase& kb, std::ostream& out);
void save_kb(const KnowledgeBase& kb, const std::filesystem::path& path);

struct DomainLookup {
  std::set<std::string> domains;
  bool internal = false;
};

// Throws std::out_of_range for an unknown id.
DomainLookup lookup_domains(const KnowledgeBase& kb, std::string_view identity_id);

// Checkable curation problems; never throws.
std::vector<KbDiagnostic> validate_entries(const std::vector<KbEntry>& entries,
                                           const ingest::PublicSuffixList& psl);
std::vector<KbDiagnostic> validate_kb(const KnowledgeBase& kb, const ingest::PublicSuffixList& psl);

bool has_errors(const std::vector<KbDiagnostic>& diagnostics);

// New KB with `entry` added; throws KbError on collision or duplicate id.
KnowledgeBase add_entry(const KnowledgeBase& kb, KbEntry entry);

}  // namespace refmail::kb
