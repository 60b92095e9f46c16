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

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "refmail/util/line_json.hpp"

namespace refmail::ingest {

struct ExtractionResult {
  std::string text;
  std::vector<std::string> diagnostics;
};

// Turns a decoded attachment payload into text. Implementations must treat
// the payload as inert data.
using TextExtractor =
    std::function<ExtractionResult(std::string_view mime_type, std::string_view payload)>;

// Maps MIME type patterns ("application/pdf", "image/*", "*/*") to extractors.
// Read-only after construction; lookups are thread-safe.
class TextExtractorRegistry {
 public:
  TextExtractorRegistry() = default;

  TextExtractorRegistry& add(std::string pattern, TextExtractor extractor);

  // Most specific match: exact type, then "major/*", then "*/*". Unknown
  // types resolve to a no-op extractor that records a diagnostic.
  const TextExtractor& find(std::string_view mime_type) const;
  bool has_extractor_for(std::string_view mime_type) const;

  // Registry with the built-in plain-text and HTML attachment extractors.
  static TextExtractorRegistry with_defaults();

 private:
  std::vector<std::pair<std::string, TextExtractor>> entries_;
};

// Extractor that forwards the payload to an external process over the
// line-delimited JSON protocol:
//   request  {"id": ..., "mime_type": ..., "payload_base64": ...}
//   response {"id": ..., "text": ...}
TextExtractor make_adapter_extractor(std::shared_ptr<JsonLineTransport> transport,
                                     std::chrono::milliseconds deadline);

std::string base64_encode(std::string_view bytes);

}  // namespace refmail::ingest
