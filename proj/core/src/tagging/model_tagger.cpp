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

#include "refmail/tagging/model_tagger.hpp"

namespace refmail::tagging {

TaggerAdapter::TaggerAdapter(std::shared_ptr<JsonLineTransport> transport,
                             std::chrono::milliseconds deadline)
    : transport_(std::move(transport)), deadline_(deadline) {}

std::optional<TagSequence> TaggerAdapter::request(const TokenSequence& tokens,
                                                  std::string* error) const {
  auto fail = [&](std::string why) -> std::optional<TagSequence> {
    if (error) *error = std::move(why);
    return std::nullopt;
  };
  if (!transport_) return fail("no transport");
  Json req = {{"id", next_request_id()}, {"tokens", tokens.texts()}};
  std::string why;
  auto resp = transport_->call(req, deadline_, &why);
  if (!resp) return fail(why.empty() ? "no response" : why);
  const auto it = resp->find("tags");
  if (it == resp->end() || !it->is_array()) return fail("protocol error: missing tags array");
  if (it->size() != tokens.size())
    return fail("protocol error: " + std::to_string(it->size()) + " tags for " +
                std::to_string(tokens.size()) + " tokens");
  TagSequence tags;
  tags.reserve(it->size());
  for (const auto& t : *it) {
    if (!t.is_string()) return fail("protocol error: non-string tag");
    auto tag = parse_tag(t.get_ref<const std::string&>());
    if (!tag) return fail("protocol error: unknown tag " + t.get<std::string>());
    tags.push_back(*tag);
  }
  return tags;
}

ModelTagResult model_tag(const TokenSequence& tokens, const TaggerAdapter* adapter,
                         const BaselineTagger& fallback) {
  ModelTagResult r;
  if (adapter) {
    std::string error;
    if (auto tags = adapter->request(tokens, &error)) {
      r.spans = decode_spans(*tags, tokens);
      r.tags = std::move(*tags);
      return r;
    }
    r.diagnostic = "tagger adapter fallback: " + error;
  }
  r.used_fallback = adapter != nullptr;
  r.tags = fallback.tag(tokens);
  r.spans = fallback.spans(tokens);
  return r;
}

}  // namespace refmail::tagging
