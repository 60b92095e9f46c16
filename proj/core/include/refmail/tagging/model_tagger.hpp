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

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "refmail/ingest/tokens.hpp"
#include "refmail/tagging/baseline_tagger.hpp"
#include "refmail/tagging/tags.hpp"
#include "refmail/util/line_json.hpp"

namespace refmail::tagging {

// Client for an external sequence tagger speaking
//   {"id", "tokens": [...]}  ->  {"id", "tags": [...]}
// Shareable across threads; the transport serializes calls.
class TaggerAdapter {
 public:
  explicit TaggerAdapter(std::shared_ptr<JsonLineTransport> transport,
                         std::chrono::milliseconds deadline = std::chrono::milliseconds(500));

  // nullopt on timeout, transport failure or protocol violation; `error`
  // receives the reason.
  std::optional<TagSequence> request(const TokenSequence& tokens, std::string* error) const;

  std::chrono::milliseconds deadline() const { return deadline_; }

 private:
  std::shared_ptr<JsonLineTransport> transport_;
  std::chrono::milliseconds deadline_;
};

struct ModelTagResult {
  TagSequence tags;
  std::vector<EntitySpan> spans;
  bool used_fallback = false;
  std::string diagnostic;  // empty unless the fallback was taken
};

// Adapter tags when available; otherwise exactly the baseline result.
ModelTagResult model_tag(const TokenSequence& tokens, const TaggerAdapter* adapter,
                         const BaselineTagger& fallback);

}  // namespace refmail::tagging
