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
#include <string>
#include <string_view>

namespace refmail::ingest {

struct HtmlText {
  std::string text;
  // Elements dropped because they would not be rendered visibly
  // (display:none, visibility:hidden, zero font size, `hidden`, ...).
  std::size_t hidden_elements = 0;
};

// Visible text of an HTML document. Script, style, head and template content
// is skipped, block elements become line breaks, entities are decoded and
// zero-width characters are removed. Never throws.
HtmlText html_to_text(std::string_view html);

// Decodes character references in `s` (named subset plus numeric forms).
std::string decode_html_entities(std::string_view s);

}  // namespace refmail::ingest
