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

#include "refmail/ingest/extractors.hpp"

#include <array>

#include "refmail/ingest/email.hpp"
#include "refmail/ingest/html_text.hpp"
#include "refmail/util/text.hpp"

namespace refmail::ingest {

namespace {

bool pattern_matches(std::string_view pattern, std::string_view type) {
  if (pattern == "*/*" || pattern == "*") return true;
  if (pattern.size() >= 2 && pattern.substr(pattern.size() - 2) == "/*") {
    const auto major = pattern.substr(0, pattern.size() - 1);  // keeps the '/'
    return text::starts_with_icase(type, major);
  }
  return text::iequals(pattern, type);
}

int specificity(std::string_view pattern) {
  if (pattern == "*/*" || pattern == "*") return 0;
  if (pattern.size() >= 2 && pattern.substr(pattern.size() - 2) == "/*") return 1;
  return 2;
}

const TextExtractor& noop_extractor() {
  static const TextExtractor noop = [](std::string_view mime_type, std::string_view) {
    return ExtractionResult{{}, {"no text extractor for " + std::string(mime_type)}};
  };
  return noop;
}

}  // namespace

TextExtractorRegistry& TextExtractorRegistry::add(std::string pattern, TextExtractor extractor) {
  entries_.emplace_back(text::ascii_lower(pattern), std::move(extractor));
  return *this;
}

const TextExtractor& TextExtractorRegistry::find(std::string_view mime_type) const {
  const TextExtractor* best = nullptr;
  int best_rank = -1;
  // Later registrations override earlier ones at equal specificity.
  for (const auto& [pattern, extractor] : entries_) {
    if (!pattern_matches(pattern, mime_type)) continue;
    const int rank = specificity(pattern);
    if (rank >= best_rank) {
      best_rank = rank;
      best = &extractor;
    }
  }
  return best ? *best : noop_extractor();
}

bool TextExtractorRegistry::has_extractor_for(std::string_view mime_type) const {
  return &find(mime_type) != &noop_extractor();
}

TextExtractorRegistry TextExtractorRegistry::with_defaults() {
  TextExtractorRegistry registry;
  registry.add("text/*", [](std::string_view, std::string_view payload) {
    return ExtractionResult{to_utf8(payload, ""), {}};
  });
  registry.add("text/html", [](std::string_view, std::string_view payload) {
    auto html = html_to_text(to_utf8(payload, ""));
    ExtractionResult result{std::move(html.text), {}};
    if (html.hidden_elements > 0)
      result.diagnostics.push_back("html attachment: dropped " +
                                   std::to_string(html.hidden_elements) + " hidden element(s)");
    return result;
  });
  return registry;
}

std::string base64_encode(std::string_view bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                            (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                            static_cast<unsigned char>(bytes[i + 2]);
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back(kAlphabet[v & 63]);
  }
  if (i < bytes.size()) {
    std::uint32_t v = static_cast<unsigned char>(bytes[i]) << 16;
    if (i + 1 < bytes.size()) v |= static_cast<unsigned char>(bytes[i + 1]) << 8;
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=');
    out.push_back('=');
  }
  return out;
}

TextExtractor make_adapter_extractor(std::shared_ptr<JsonLineTransport> transport,
                                     std::chrono::milliseconds deadline) {
  return [transport = std::move(transport), deadline](std::string_view mime_type,
                                                      std::string_view payload) {
    Json request = {{"id", next_request_id()},
                    {"mime_type", std::string(mime_type)},
                    {"payload_base64", base64_encode(payload)}};
    std::string error;
    const auto response = transport->call(request, deadline, &error);
    if (!response) return ExtractionResult{{}, {"extractor adapter failed: " + error}};
    const auto it = response->find("text");
    if (it == response->end() || !it->is_string())
      return ExtractionResult{{}, {"extractor adapter: response without text"}};
    return ExtractionResult{text::sanitize_utf8(it->get<std::string>()), {}};
  };
}

}  // namespace refmail::ingest
