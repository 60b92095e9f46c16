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

#include "refmail/ingest/tokens.hpp"

#include "refmail/ingest/email.hpp"
#include "refmail/util/text.hpp"

namespace refmail {

namespace {

enum class CharClass { kSpace, kWord, kConnector, kPunct };

bool is_unicode_punct(char32_t c) {
  return (c >= 0xA1 && c <= 0xBF && c != 0xAA && c != 0xB5 && c != 0xBA) || c == 0xD7 ||
         c == 0xF7 || (c >= 0x2010 && c <= 0x205E) || (c >= 0x3000 && c <= 0x303F) ||
         (c >= 0xFF01 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) ||
         (c >= 0x2190 && c <= 0x2BFF);
}

CharClass classify(char32_t c) {
  if (text::is_unicode_space(c)) return CharClass::kSpace;
  if (c < 0x80) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'))
      return CharClass::kWord;
    switch (c) {
      case '&': case '\'': case '-': case '.': case '_': case '/': case '@': case '+':
        return CharClass::kConnector;
      default:
        return c < 0x20 ? CharClass::kSpace : CharClass::kPunct;
    }
  }
  if (c == 0x2019 || c == 0x2010 || c == 0x2011) return CharClass::kConnector;
  if (is_unicode_punct(c)) return CharClass::kPunct;
  return CharClass::kWord;
}

struct Cp {
  char32_t c;
  std::size_t begin;
  std::size_t end;
  CharClass cls;
};

std::vector<Cp> code_points(std::string_view s) {
  std::vector<Cp> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b = static_cast<unsigned char>(s[i]);
    std::size_t len = b < 0x80 ? 1 : (b & 0xE0) == 0xC0 ? 2 : (b & 0xF0) == 0xE0 ? 3 : (b & 0xF8) == 0xF0 ? 4 : 1;
    if (i + len > s.size()) len = 1;
    const auto decoded = text::decode_utf8(s.substr(i, len));
    const char32_t c = decoded.size() == 1 ? decoded[0] : text::kReplacementChar;
    if (decoded.size() != 1) len = 1;
    out.push_back({c, i, i + len, classify(c)});
    i += len;
  }
  return out;
}

bool looks_like_url_chunk(std::string_view chunk) {
  return text::starts_with_icase(chunk, "http://") || text::starts_with_icase(chunk, "https://") ||
         text::starts_with_icase(chunk, "www.") || text::starts_with_icase(chunk, "mailto:") ||
         text::starts_with_icase(chunk, "hxxp");
}

bool looks_like_address(std::string_view chunk) {
  const auto at = chunk.find('@');
  return at != std::string_view::npos && at > 0 && chunk.find('.', at) != std::string_view::npos;
}

constexpr std::string_view kTrailingUrlPunct = ".,;:!?)]}>\"'";
constexpr std::string_view kLeadingUrlPunct = "([{<\"'";

void tokenize_chunk(std::string_view text, const std::vector<Cp>& cps, std::size_t a, std::size_t b,
                    std::vector<std::pair<std::size_t, std::size_t>>& out) {
  const std::string_view chunk = text.substr(cps[a].begin, cps[b - 1].end - cps[a].begin);
  std::string_view core = chunk;
  std::size_t lead = 0;
  while (!core.empty() && kLeadingUrlPunct.find(core.front()) != std::string_view::npos) {
    core.remove_prefix(1);
    ++lead;
  }
  std::string_view trimmed = core;
  while (!trimmed.empty() && kTrailingUrlPunct.find(trimmed.back()) != std::string_view::npos)
    trimmed.remove_suffix(1);
  if (!trimmed.empty() && (looks_like_url_chunk(trimmed) || looks_like_address(trimmed))) {
    const std::size_t base = cps[a].begin;
    for (std::size_t k = 0; k < lead; ++k) out.emplace_back(base + k, base + k + 1);
    const std::size_t url_begin = base + lead;
    out.emplace_back(url_begin, url_begin + trimmed.size());
    for (std::size_t k = url_begin + trimmed.size(); k < base + chunk.size(); ++k)
      out.emplace_back(k, k + 1);
    return;
  }

  std::size_t i = a;
  while (i < b) {
    if (cps[i].cls != CharClass::kWord) {
      out.emplace_back(cps[i].begin, cps[i].end);
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < b) {
      if (cps[j].cls == CharClass::kWord) {
        ++j;
      } else if (cps[j].cls == CharClass::kConnector && j + 1 < b && cps[j + 1].cls == CharClass::kWord) {
        j += 2;
      } else {
        break;
      }
    }
    out.emplace_back(cps[i].begin, cps[j - 1].end);
    i = j;
  }
}

void append_field(TokenSequence& seq, Field field, std::string_view sentinel, std::size_t limit) {
  const std::string_view source = seq.field_text(field);
  if (text::trim(source).empty()) return;
  const auto spans = tokenize(source);
  if (spans.empty()) return;
  seq.tokens.push_back({std::string(sentinel), field, true, 0, 0});
  std::size_t count = 0;
  for (const auto& [b, e] : spans) {
    if (limit && ++count > limit) break;
    seq.tokens.push_back({std::string(source.substr(b, e - b)), field, false, b, e});
  }
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> tokenize(std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto cps = code_points(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    if (cps[i].cls == CharClass::kSpace) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && cps[j].cls != CharClass::kSpace) ++j;
    tokenize_chunk(text, cps, i, j, out);
    i = j;
  }
  return out;
}

bool is_url_token(std::string_view token) {
  return looks_like_url_chunk(token) ||
         (token.find('.') != std::string_view::npos && token.find('/') != std::string_view::npos &&
          token.find('@') == std::string_view::npos && token.find(' ') == std::string_view::npos &&
          token.size() > 4 && token.front() != '/' && token.front() != '.');
}

bool is_word_token(std::string_view token) {
  if (token.empty()) return false;
  const auto cps = text::decode_utf8(token);
  return classify(cps.front()) == CharClass::kWord;
}

std::string_view TokenSequence::field_text(Field f) const {
  switch (f) {
    case Field::kSubject: return subject;
    case Field::kFrom: return from;
    case Field::kBody: return body;
  }
  return body;
}

std::vector<std::string> TokenSequence::texts() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

std::string TokenSequence::surface(std::size_t first, std::size_t last) const {
  std::string out;
  std::size_t i = first;
  while (i <= last && i < tokens.size()) {
    std::size_t j = i;
    if (!tokens[i].sentinel) {
      while (j + 1 <= last && j + 1 < tokens.size() && !tokens[j + 1].sentinel &&
             tokens[j + 1].field == tokens[i].field)
        ++j;
    }
    if (!out.empty()) out.push_back(' ');
    if (tokens[i].sentinel) {
      out += tokens[i].text;
    } else {
      const auto src = field_text(tokens[i].field);
      out += src.substr(tokens[i].begin, tokens[j].end - tokens[i].begin);
    }
    i = j + 1;
  }
  return out;
}

TokenSequence flatten_to_tokens(const ingest::ParsedEmail& email, std::size_t max_body_tokens) {
  TokenSequence seq;
  seq.subject = email.subject;
  seq.from = email.sender_name;
  seq.body = email.body_text();
  append_field(seq, Field::kSubject, kSubjectSentinel, 0);
  append_field(seq, Field::kFrom, kFromSentinel, 0);
  append_field(seq, Field::kBody, kBodySentinel, max_body_tokens);
  return seq;
}

TokenSequence tokens_from_words(const std::vector<std::string>& words) {
  TokenSequence seq;
  for (const auto& w : words) {
    if (!seq.body.empty()) seq.body.push_back(' ');
    const std::size_t b = seq.body.size();
    seq.body += w;
    seq.tokens.push_back({w, Field::kBody, false, b, seq.body.size()});
  }
  return seq;
}

}  // namespace refmail
