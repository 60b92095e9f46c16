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

#include "refmail/tagging/tags.hpp"

#include <stdexcept>

namespace refmail::tagging {

std::string_view to_string(Tag tag) {
  switch (tag.kind) {
    case TagKind::kOutside: return "O";
    case TagKind::kBegin: return tag.cls == EntityClass::kIdentity ? "BE-ID" : "BE-ACT";
    case TagKind::kInside: return tag.cls == EntityClass::kIdentity ? "IE-ID" : "IE-ACT";
  }
  return "O";
}

std::optional<Tag> parse_tag(std::string_view name) {
  for (Tag t : kTagAlphabet)
    if (to_string(t) == name) return t;
  return std::nullopt;
}

std::string_view to_string(EntityClass cls) {
  return cls == EntityClass::kIdentity ? "identity" : "action";
}

std::vector<EntitySpan> decode_spans(const TagSequence& tags) {
  std::vector<EntitySpan> spans;
  bool open = false;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag t = tags[i];
    if (t.kind == TagKind::kOutside) {
      open = false;
      continue;
    }
    const bool continues = t.kind == TagKind::kInside && open && spans.back().cls == t.cls;
    if (continues) {
      spans.back().end_token = i;
      continue;
    }
    // BE, or an orphan / class-switching IE which is repaired into a BE.
    spans.push_back({t.cls, i, i, {}});
    open = true;
  }
  return spans;
}

std::vector<EntitySpan> decode_spans(const TagSequence& tags, const TokenSequence& tokens) {
  if (tags.size() != tokens.size())
    throw std::invalid_argument("decode_spans: " + std::to_string(tags.size()) + " tags for " +
                                std::to_string(tokens.size()) + " tokens");
  auto spans = decode_spans(tags);
  for (auto& s : spans) s.text = tokens.surface(s.start_token, s.end_token);
  return spans;
}

TagSequence encode_spans(std::size_t length, const std::vector<EntitySpan>& spans) {
  TagSequence tags(length, Tag::outside());
  for (const auto& s : spans) {
    if (s.start_token > s.end_token || s.end_token >= length)
      throw std::invalid_argument("encode_spans: span out of range");
    tags[s.start_token] = Tag::begin(s.cls);
    for (std::size_t i = s.start_token + 1; i <= s.end_token; ++i) tags[i] = Tag::inside(s.cls);
  }
  return tags;
}

std::vector<EntitySpan> spans_of(const std::vector<EntitySpan>& spans, EntityClass cls) {
  std::vector<EntitySpan> out;
  for (const auto& s : spans)
    if (s.cls == cls) out.push_back(s);
  return out;
}

}  // namespace refmail::tagging
