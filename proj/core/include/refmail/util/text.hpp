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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace refmail::text {

inline constexpr char32_t kReplacementChar = 0xFFFD;

// Decodes UTF-8, replacing every ill-formed subsequence with U+FFFD.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

// Re-encodes `bytes` as well-formed UTF-8 (lossy).
std::string sanitize_utf8(std::string_view bytes);
bool is_valid_utf8(std::string_view bytes);

// ISO-8859-1 and windows-1252 to UTF-8.
std::string latin1_to_utf8(std::string_view bytes);
std::string cp1252_to_utf8(std::string_view bytes);

std::string ascii_lower(std::string_view s);
std::string ascii_upper(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool starts_with_icase(std::string_view s, std::string_view prefix);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

bool is_unicode_space(char32_t c);

// Lowercases and strips diacritics for Latin, Greek and Cyrillic letters.
char32_t fold_char(char32_t c);

// Case-folded, accent-stripped, whitespace-collapsed form used for alias
// comparison and n-gram extraction.
std::u32string fold_for_matching(std::string_view utf8);
std::string fold_key(std::string_view utf8);

}  // namespace refmail::text
