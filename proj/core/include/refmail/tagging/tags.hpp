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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "refmail/ingest/tokens.hpp"

namespace refmail::tagging {

enum class EntityClass : std::uint8_t { kIdentity, kAction };
enum class TagKind : std::uint8_t { kOutside, kBegin, kInside };

// Class-qualified BE/IE/O tag. Outside tags carry no class.
struct Tag {
  TagKind kind = TagKind::kOutside;
  EntityClass cls = EntityClass::kIdentity;

  static constexpr Tag outside() { return {}; }
  static constexpr Tag begin(EntityClass c) { return {TagKind::kBegin, c}; }
  static constexpr Tag inside(EntityClass c) { return {TagKind::kInside, c}; }

  constexpr bool is_outside() const { return kind == TagKind::kOutside; }

  friend constexpr bool operator==(Tag a, Tag b) {
    return a.kind == b.kind && (a.kind == TagKind::kOutside || a.cls == b.cls);
  }
};

using TagSequence = std::vector<Tag>;

// The five symbols of the tag alphabet in protocol order.
inline constexpr std::array<Tag, 5> kTagAlphabet = {
    Tag::outside(), Tag::begin(EntityClass::kIdentity), Tag::inside(EntityClass::kIdentity),
    Tag::begin(EntityClass::kAction), Tag::inside(EntityClass::kAction)};

// Wire names: "O", "BE-ID", "IE-ID", "BE-ACT", "IE-ACT".
std::string_view to_string(Tag tag);
std::optional<Tag> parse_tag(std::string_view name);
std::string_view to_string(EntityClass cls);

struct EntitySpan {
  EntityClass cls = EntityClass::kIdentity;
  std::size_t start_token = 0;
  std::size_t end_token = 0;  // inclusive
  std::string text;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

// Maximal runs opened by BE (or by an IE that does not continue a run of its
// own class) and extended by same-class IE. Sorted by start. Throws
// std::invalid_argument when the lengths differ.
std::vector<EntitySpan> decode_spans(const TagSequence& tags, const TokenSequence& tokens);

// Span boundaries only, for callers without a TokenSequence.
std::vector<EntitySpan> decode_spans(const TagSequence& tags);

// Inverse of decode_spans for non-overlapping spans.
TagSequence encode_spans(std::size_t length, const std::vector<EntitySpan>& spans);

std::vector<EntitySpan> spans_of(const std::vector<EntitySpan>& spans, EntityClass cls);

}  // namespace refmail::tagging
