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

#include "refmail/ingest/html_text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <vector>

#include "refmail/util/text.hpp"

namespace refmail::ingest {

namespace {

struct NamedEntity {
  std::string_view name;
  char32_t cp;
};

constexpr std::array<NamedEntity, 36> kEntities = {{
    {"amp", '&'},       {"lt", '<'},         {"gt", '>'},         {"quot", '"'},
    {"apos", '\''},     {"nbsp", 0xA0},      {"copy", 0xA9},      {"reg", 0xAE},
    {"trade", 0x2122},  {"hellip", 0x2026},  {"mdash", 0x2014},   {"ndash", 0x2013},
    {"lsquo", 0x2018},  {"rsquo", 0x2019},   {"ldquo", 0x201C},   {"rdquo", 0x201D},
    {"bull", 0x2022},   {"middot", 0xB7},    {"euro", 0x20AC},    {"pound", 0xA3},
    {"yen", 0xA5},      {"cent", 0xA2},      {"sect", 0xA7},      {"deg", 0xB0},
    {"laquo", 0xAB},    {"raquo", 0xBB},     {"zwnj", 0x200C},    {"zwj", 0x200D},
    {"shy", 0xAD},      {"times", 0xD7},     {"eacute", 0xE9},    {"egrave", 0xE8},
    {"aacute", 0xE1},   {"uuml", 0xFC},      {"ouml", 0xF6},      {"auml", 0xE4},
}};

constexpr std::array<std::string_view, 14> kVoidElements = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr"};

constexpr std::array<std::string_view, 31> kBlockElements = {
    "address", "article", "aside", "blockquote", "br", "center", "dd", "div",
    "dl", "dt", "fieldset", "figcaption", "figure", "footer", "form", "h1",
    "h2", "h3", "h4", "h5", "h6", "header", "hr", "li", "main",
    "nav", "ol", "p", "pre", "section", "table"};

constexpr std::array<std::string_view, 6> kSkippedElements = {"script", "style", "head",
                                                              "title", "template", "xml"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view name) {
  return std::find(set.begin(), set.end(), name) != set.end();
}

bool is_block(std::string_view name) {
  return contains(kBlockElements, name) || name == "tr" || name == "ul" || name == "tbody" ||
         name == "thead" || name == "tfoot" || name == "caption";
}

bool is_zero_width(char32_t c) {
  return c == 0x200B || c == 0x200C || c == 0x200D || c == 0x2060 || c == 0xFEFF || c == 0xAD;
}

struct Tag {
  std::string name;
  bool closing = false;
  bool self_closing = false;
  bool hidden = false;
};

std::string strip_spaces_lower(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

bool zero_length_value(std::string_view css, std::string_view property) {
  std::size_t pos = 0;
  while ((pos = css.find(property, pos)) != std::string_view::npos) {
    const bool at_boundary = pos == 0 || css[pos - 1] == ';' || css[pos - 1] == '{';
    pos += property.size();
    if (!at_boundary) continue;
    std::string_view rest = css.substr(pos);
    const auto end = rest.find_first_of(";}");
    rest = rest.substr(0, end);
    if (const auto imp = rest.find("!important"); imp != std::string_view::npos)
      rest = rest.substr(0, imp);
    std::size_t k = 0;
    while (k < rest.size() && (rest[k] == '0' || rest[k] == '.')) ++k;
    const bool zero = k > 0 && std::all_of(rest.begin() + static_cast<std::ptrdiff_t>(k), rest.end(),
                                           [](char c) { return (c >= 'a' && c <= 'z') || c == '%'; });
    if (zero) return true;
  }
  return false;
}

bool style_hides(std::string_view style_attr) {
  const std::string css = strip_spaces_lower(style_attr);
  if (css.find("display:none") != std::string::npos) return true;
  if (css.find("visibility:hidden") != std::string::npos) return true;
  if (zero_length_value(css, "font-size:")) return true;
  if (zero_length_value(css, "opacity:")) return true;
  if (zero_length_value(css, "max-height:") && css.find("overflow:hidden") != std::string::npos)
    return true;
  return false;
}

// Parses the tag starting at html[pos] == '<'. Returns the index one past the
// closing '>' (or html.size() for an unterminated tag).
std::size_t parse_tag(std::string_view html, std::size_t pos, Tag& tag) {
  std::size_t i = pos + 1;
  if (i < html.size() && html[i] == '/') {
    tag.closing = true;
    ++i;
  }
  const std::size_t name_start = i;
  while (i < html.size() && (std::isalnum(static_cast<unsigned char>(html[i])) ||
                             html[i] == '-' || html[i] == ':'))
    ++i;
  tag.name = text::ascii_lower(html.substr(name_start, i - name_start));

  while (i < html.size() && html[i] != '>') {
    const char c = html[i];
    if (c == '/' && i + 1 < html.size() && html[i + 1] == '>') {
      tag.self_closing = true;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c)) || c == '/') {
      ++i;
      continue;
    }
    const std::size_t attr_start = i;
    while (i < html.size() && html[i] != '=' && html[i] != '>' &&
           !std::isspace(static_cast<unsigned char>(html[i])) && html[i] != '/')
      ++i;
    const std::string attr = text::ascii_lower(html.substr(attr_start, i - attr_start));
    while (i < html.size() && std::isspace(static_cast<unsigned char>(html[i]))) ++i;
    std::string_view value;
    if (i < html.size() && html[i] == '=') {
      ++i;
      while (i < html.size() && std::isspace(static_cast<unsigned char>(html[i]))) ++i;
      if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
        const char quote = html[i++];
        const std::size_t vstart = i;
        while (i < html.size() && html[i] != quote) ++i;
        value = html.substr(vstart, i - vstart);
        if (i < html.size()) ++i;
      } else {
        const std::size_t vstart = i;
        while (i < html.size() && html[i] != '>' && !std::isspace(static_cast<unsigned char>(html[i])))
          ++i;
        value = html.substr(vstart, i - vstart);
      }
    }
    if (attr == "hidden") tag.hidden = true;
    if (attr == "style" && style_hides(decode_html_entities(value))) tag.hidden = true;
    if (attr.empty() && i == attr_start) ++i;
  }
  return i < html.size() ? i + 1 : html.size();
}

class TextSink {
 public:
  void text(std::string_view raw) {
    for (char32_t c : text::decode_utf8(decode_html_entities(raw))) {
      if (is_zero_width(c)) continue;
      if (text::is_unicode_space(c)) {
        pending_space_ = true;
        continue;
      }
      if (pending_space_ && !line_.empty()) line_.push_back(' ');
      pending_space_ = false;
      text::append_utf8(line_, c);
    }
  }

  void line_break() {
    flush_line();
    pending_space_ = false;
  }

  std::string finish() {
    flush_line();
    return std::move(out_);
  }

 private:
  void flush_line() {
    if (line_.empty()) return;
    if (!out_.empty()) out_.push_back('\n');
    out_ += line_;
    line_.clear();
  }

  std::string out_;
  std::string line_;
  bool pending_space_ = false;
};

}  // namespace

std::string decode_html_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(s[i++]);
      continue;
    }
    const std::string_view name = s.substr(i + 1, semi - i - 1);
    char32_t cp = 0;
    if (!name.empty() && name[0] == '#') {
      std::uint32_t value = 0;
      const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
      const std::string_view digits = name.substr(hex ? 2 : 1);
      const auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), value, hex ? 16 : 10);
      if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty())
        cp = value == 0 ? text::kReplacementChar : static_cast<char32_t>(value);
    } else {
      for (const auto& e : kEntities)
        if (e.name == name) cp = e.cp;
    }
    if (cp == 0) {
      out.push_back(s[i++]);
      continue;
    }
    text::append_utf8(out, cp);
    i = semi + 1;
  }
  return out;
}

HtmlText html_to_text(std::string_view html) {
  HtmlText result;
  TextSink sink;
  struct Open {
    std::string name;
    bool hidden;
  };
  std::vector<Open> stack;
  int hidden_depth = 0;

  const auto pop_to = [&](std::size_t index) {
    while (stack.size() > index) {
      if (stack.back().hidden) --hidden_depth;
      stack.pop_back();
    }
  };

  std::size_t i = 0;
  std::size_t text_start = 0;
  const auto flush_text = [&](std::size_t end) {
    if (end > text_start && hidden_depth == 0) sink.text(html.substr(text_start, end - text_start));
  };

  while (i < html.size()) {
    if (html[i] != '<') {
      ++i;
      continue;
    }
    const char next = i + 1 < html.size() ? html[i + 1] : '\0';
    if (html.substr(i, 4) == "<!--") {
      flush_text(i);
      const auto end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      text_start = i;
      continue;
    }
    if (next == '!' || next == '?') {
      flush_text(i);
      const auto end = html.find('>', i);
      i = end == std::string_view::npos ? html.size() : end + 1;
      text_start = i;
      continue;
    }
    if (!(std::isalpha(static_cast<unsigned char>(next)) || next == '/')) {
      ++i;  // a literal '<'
      continue;
    }

    flush_text(i);
    Tag tag;
    i = parse_tag(html, i, tag);
    text_start = i;
    if (tag.name.empty()) continue;

    if (contains(kSkippedElements, tag.name) && !tag.closing && !tag.self_closing) {
      // Raw-text content: jump to the matching end tag.
      const std::string close = "</" + tag.name;
      std::size_t j = i;
      while (true) {
        const auto lt = html.find("</", j);
        if (lt == std::string_view::npos) {
          j = html.size();
          break;
        }
        if (text::starts_with_icase(html.substr(lt), close)) {
          const auto gt = html.find('>', lt);
          j = gt == std::string_view::npos ? html.size() : gt + 1;
          break;
        }
        j = lt + 2;
      }
      i = text_start = j;
      continue;
    }

    if (tag.closing) {
      for (std::size_t k = stack.size(); k-- > 0;) {
        if (stack[k].name == tag.name) {
          pop_to(k);
          break;
        }
      }
      if (is_block(tag.name) || tag.name == "td" || tag.name == "th") sink.line_break();
      continue;
    }

    // Implied end tags for the common unclosed cases.
    if (!stack.empty()) {
      const std::string& top = stack.back().name;
      if ((top == "p" && is_block(tag.name)) || (top == "li" && tag.name == "li") ||
          ((top == "td" || top == "th") && (tag.name == "td" || tag.name == "th" || tag.name == "tr")))
        pop_to(stack.size() - 1);
      if (tag.name == "tr" && !stack.empty() && stack.back().name == "tr") pop_to(stack.size() - 1);
    }

    if (is_block(tag.name)) sink.line_break();
    if (tag.name == "td" || tag.name == "th") sink.text(" ");

    const bool is_void = contains(kVoidElements, tag.name);
    if (tag.hidden) ++result.hidden_elements;
    if (is_void || tag.self_closing) continue;
    stack.push_back({tag.name, tag.hidden});
    if (tag.hidden) ++hidden_depth;
  }
  flush_text(html.size());
  result.text = sink.finish();
  return result;
}

}  // namespace refmail::ingest
