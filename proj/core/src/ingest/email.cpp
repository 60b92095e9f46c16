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

#include "refmail/ingest/email.hpp"

#include <algorithm>
#include <optional>

#include "refmail/ingest/html_text.hpp"
#include "refmail/util/text.hpp"

namespace refmail::ingest {

namespace {

constexpr int kMaxDepth = 16;
constexpr std::size_t kMaxParts = 512;

struct HeaderField {
  std::string name;  // lowercase
  std::string value;
};

struct HeaderBlock {
  std::vector<HeaderField> fields;

  std::optional<std::string_view> get(std::string_view name) const {
    for (const auto& f : fields)
      if (f.name == name) return std::string_view(f.value);
    return std::nullopt;
  }

  std::vector<std::string_view> all(std::string_view name) const {
    std::vector<std::string_view> out;
    for (const auto& f : fields)
      if (f.name == name) out.emplace_back(f.value);
    return out;
  }
};

// Reads one line (without terminator) starting at `pos`; advances `pos` past
// the terminator.
std::string_view next_line(std::string_view s, std::size_t& pos) {
  const std::size_t start = pos;
  const auto nl = s.find('\n', pos);
  std::size_t end = nl == std::string_view::npos ? s.size() : nl;
  pos = nl == std::string_view::npos ? s.size() : nl + 1;
  if (end > start && s[end - 1] == '\r') --end;
  return s.substr(start, end - start);
}

HeaderBlock parse_headers(std::string_view msg, std::string_view& body,
                          std::vector<std::string>& diagnostics) {
  HeaderBlock block;
  std::size_t pos = 0;
  bool first = true;
  while (pos < msg.size()) {
    const std::size_t line_start = pos;
    const std::string_view line = next_line(msg, pos);
    if (line.empty()) {
      body = msg.substr(pos);
      return block;
    }
    if (first && line.rfind("From ", 0) == 0) {
      first = false;
      continue;  // mbox envelope line
    }
    first = false;
    if ((line[0] == ' ' || line[0] == '\t') && !block.fields.empty()) {
      block.fields.back().value += ' ';
      block.fields.back().value += text::trim(line);
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos || colon == 0 ||
        line.substr(0, colon).find_first_of(" \t") != std::string_view::npos) {
      if (block.fields.empty() && line_start == 0) {
        // Not a header at all: treat the whole input as a body.
        diagnostics.push_back("no header block found");
        body = msg;
        return block;
      }
      diagnostics.push_back("skipped malformed header line");
      continue;
    }
    block.fields.push_back({text::ascii_lower(text::trim(line.substr(0, colon))),
                            std::string(text::trim(line.substr(colon + 1)))});
  }
  body = {};
  return block;
}

struct ContentType {
  std::string type = "text/plain";
  std::vector<std::pair<std::string, std::string>> params;

  std::string param(std::string_view name) const {
    for (const auto& [k, v] : params)
      if (k == name) return v;
    return {};
  }
  bool is(std::string_view t) const { return type == t; }
  bool major(std::string_view m) const { return type.rfind(m, 0) == 0; }
};

ContentType parse_content_type(std::string_view value) {
  ContentType ct;
  std::size_t i = 0;
  const auto semi = value.find(';');
  std::string type = text::ascii_lower(text::trim(value.substr(0, semi)));
  if (type.find('/') != std::string::npos) ct.type = std::move(type);
  if (semi == std::string_view::npos) return ct;
  i = semi + 1;
  while (i < value.size()) {
    while (i < value.size() && (value[i] == ' ' || value[i] == '\t' || value[i] == ';')) ++i;
    const std::size_t key_start = i;
    while (i < value.size() && value[i] != '=' && value[i] != ';') ++i;
    std::string key = text::ascii_lower(text::trim(value.substr(key_start, i - key_start)));
    std::string val;
    if (i < value.size() && value[i] == '=') {
      ++i;
      while (i < value.size() && value[i] == ' ') ++i;
      if (i < value.size() && value[i] == '"') {
        ++i;
        while (i < value.size() && value[i] != '"') {
          if (value[i] == '\\' && i + 1 < value.size()) ++i;
          val.push_back(value[i++]);
        }
        if (i < value.size()) ++i;
      } else {
        const std::size_t vstart = i;
        while (i < value.size() && value[i] != ';') ++i;
        val = std::string(text::trim(value.substr(vstart, i - vstart)));
      }
    }
    // RFC 2231 extended parameter: charset''percent-encoded
    if (!key.empty() && key.back() == '*') {
      key.pop_back();
      if (const auto q = val.find("''"); q != std::string::npos) val = val.substr(q + 2);
    }
    if (!key.empty()) ct.params.emplace_back(std::move(key), std::move(val));
  }
  return ct;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string header_text(std::string_view raw) {
  return text::sanitize_utf8(decode_encoded_words(raw));
}

struct PartContext {
  const TextExtractorRegistry& extractors;
  std::vector<BodySegment>& segments;
  std::vector<std::string>& diagnostics;
  std::size_t parts_seen = 0;
};

std::vector<std::string_view> split_multipart(std::string_view body, std::string_view boundary,
                                              bool& closed) {
  std::vector<std::string_view> parts;
  const std::string delimiter = "--" + std::string(boundary);
  std::size_t pos = 0;
  std::optional<std::size_t> part_start;
  closed = false;
  while (pos < body.size()) {
    const std::size_t line_start = pos;
    const std::string_view line = next_line(body, pos);
    if (line.rfind(delimiter, 0) != 0) continue;
    const std::string_view rest = text::trim(line.substr(delimiter.size()));
    const bool is_close = rest.rfind("--", 0) == 0;
    if (!is_close && !rest.empty()) continue;
    if (part_start) {
      std::size_t end = line_start;
      // The line break before a delimiter belongs to the delimiter.
      if (end > *part_start && body[end - 1] == '\n') --end;
      if (end > *part_start && body[end - 1] == '\r') --end;
      parts.push_back(body.substr(*part_start, end - *part_start));
    }
    if (is_close) {
      closed = true;
      return parts;
    }
    part_start = pos;
  }
  if (part_start && *part_start < body.size()) parts.push_back(body.substr(*part_start));
  return parts;
}

void parse_entity(const HeaderBlock& headers, std::string_view body, PartContext& ctx, int depth);

void parse_part_bytes(std::string_view part, PartContext& ctx, int depth) {
  std::string_view body;
  std::vector<std::string> header_diags;
  const HeaderBlock headers = parse_headers(part, body, header_diags);
  parse_entity(headers, body, ctx, depth);
}

std::string decode_transfer(std::string_view body, std::string_view encoding,
                            std::vector<std::string>& diagnostics) {
  const std::string enc = text::ascii_lower(text::trim(encoding));
  if (enc == "base64") return decode_base64(body);
  if (enc == "quoted-printable") return decode_quoted_printable(body);
  if (!enc.empty() && enc != "7bit" && enc != "8bit" && enc != "binary")
    diagnostics.push_back("unknown transfer encoding '" + enc + "', using raw bytes");
  return std::string(body);
}

void parse_entity(const HeaderBlock& headers, std::string_view body, PartContext& ctx, int depth) {
  if (++ctx.parts_seen > kMaxParts) {
    if (ctx.parts_seen == kMaxParts + 1) ctx.diagnostics.push_back("too many MIME parts, rest skipped");
    return;
  }
  if (depth > kMaxDepth) {
    ctx.diagnostics.push_back("MIME nesting too deep, part skipped");
    return;
  }
  ContentType ct;
  if (auto v = headers.get("content-type")) ct = parse_content_type(*v);
  const std::string disposition =
      text::ascii_lower(text::trim(headers.get("content-disposition").value_or("")));
  const bool attachment = disposition.rfind("attachment", 0) == 0;

  if (ct.major("multipart/")) {
    const std::string boundary = ct.param("boundary");
    if (boundary.empty()) {
      ctx.diagnostics.push_back("multipart without boundary, treated as text");
      if (!text::trim(body).empty()) ctx.segments.push_back({SegmentKind::kPlain, to_utf8(body, "")});
      return;
    }
    bool closed = false;
    const auto parts = split_multipart(body, boundary, closed);
    if (!closed) ctx.diagnostics.push_back("multipart body missing closing boundary");
    if (ct.is("multipart/alternative")) {
      // Alternatives are ordered by increasing fidelity: keep the last one
      // that yields any text.
      std::vector<BodySegment> chosen;
      for (const auto& part : parts) {
        std::vector<BodySegment> local;
        PartContext sub{ctx.extractors, local, ctx.diagnostics, ctx.parts_seen};
        parse_part_bytes(part, sub, depth + 1);
        ctx.parts_seen = sub.parts_seen;
        const bool has_text = std::any_of(local.begin(), local.end(),
                                          [](const BodySegment& s) { return !s.text.empty(); });
        if (has_text) chosen = std::move(local);
      }
      for (auto& s : chosen) ctx.segments.push_back(std::move(s));
    } else {
      for (const auto& part : parts) parse_part_bytes(part, ctx, depth + 1);
    }
    return;
  }

  const std::string payload =
      decode_transfer(body, headers.get("content-transfer-encoding").value_or(""), ctx.diagnostics);

  if (ct.is("message/rfc822") && !attachment) {
    parse_part_bytes(payload, ctx, depth + 1);
    return;
  }

  if (!attachment && (ct.is("text/plain") || ct.is("text/html"))) {
    bool known = true;
    const std::string charset = ct.param("charset");
    std::string decoded = to_utf8(payload, charset, &known);
    if (!known) ctx.diagnostics.push_back("unknown charset '" + charset + "', decoded lossily");
    if (ct.is("text/html")) {
      auto html = html_to_text(decoded);
      if (html.hidden_elements > 0)
        ctx.diagnostics.push_back("html: dropped " + std::to_string(html.hidden_elements) +
                                  " hidden element(s)");
      if (!html.text.empty()) ctx.segments.push_back({SegmentKind::kHtmlExtracted, std::move(html.text)});
    } else if (!text::trim(decoded).empty()) {
      ctx.segments.push_back({SegmentKind::kPlain, std::move(decoded)});
    }
    return;
  }

  try {
    const auto& extractor = ctx.extractors.find(ct.type);
    ExtractionResult extracted = extractor(ct.type, payload);
    for (auto& d : extracted.diagnostics) ctx.diagnostics.push_back(std::move(d));
    ctx.segments.push_back({SegmentKind::kAttachmentExtracted, text::sanitize_utf8(extracted.text)});
  } catch (const std::exception& e) {
    ctx.diagnostics.push_back("extractor for " + ct.type + " failed: " + e.what());
    ctx.segments.push_back({SegmentKind::kAttachmentExtracted, {}});
  }
}

void add_recipient_domains(std::string_view value, const PublicSuffixList& suffixes,
                           ParsedEmail& email) {
  for (const auto& mb : parse_address_list(value)) {
    if (mb.address.empty()) continue;
    try {
      email.recipient_domains.insert(extract_registrable_domain(mb.address, suffixes));
    } catch (const DomainError& e) {
      email.diagnostics.push_back(std::string("recipient: ") + e.what());
    }
  }
}

}  // namespace

std::string_view to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::kPlain: return "plain";
    case SegmentKind::kHtmlExtracted: return "html_extracted";
    case SegmentKind::kAttachmentExtracted: return "attachment_extracted";
  }
  return "plain";
}

std::string ParsedEmail::body_text() const {
  std::string out;
  for (const auto& seg : body_segments) {
    if (seg.text.empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += seg.text;
  }
  return out;
}

std::string decode_base64(std::string_view in) {
  std::string out;
  out.reserve(in.size() * 3 / 4);
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : in) {
    int v;
    if (c >= 'A' && c <= 'Z') v = c - 'A';
    else if (c >= 'a' && c <= 'z') v = c - 'a' + 26;
    else if (c >= '0' && c <= '9') v = c - '0' + 52;
    else if (c == '+' || c == '-') v = 62;
    else if (c == '/' || c == '_') v = 63;
    else if (c == '=') break;
    else continue;
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

std::string decode_quoted_printable(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const char c = in[i];
    if (c != '=') {
      out.push_back(c);
      continue;
    }
    // Soft line break: '=' followed by optional whitespace and a newline.
    std::size_t j = i + 1;
    while (j < in.size() && (in[j] == ' ' || in[j] == '\t')) ++j;
    if (j < in.size() && (in[j] == '\n' || in[j] == '\r')) {
      if (in[j] == '\r' && j + 1 < in.size() && in[j + 1] == '\n') ++j;
      i = j;
      continue;
    }
    if (j >= in.size()) break;
    if (i + 2 < in.size() && hex_value(in[i + 1]) >= 0 && hex_value(in[i + 2]) >= 0) {
      out.push_back(static_cast<char>(hex_value(in[i + 1]) * 16 + hex_value(in[i + 2])));
      i += 2;
    } else {
      out.push_back('=');
    }
  }
  return out;
}

std::string to_utf8(std::string_view bytes, std::string_view charset_in, bool* known) {
  std::string charset = text::ascii_lower(text::trim(charset_in));
  if (!charset.empty() && charset.front() == '"') charset = charset.substr(1);
  if (!charset.empty() && charset.back() == '"') charset.pop_back();
  if (known) *known = true;
  if (charset.empty() || charset == "us-ascii" || charset == "ascii") {
    // Undeclared: accept UTF-8, otherwise assume the most common legacy code page.
    return text::is_valid_utf8(bytes) ? std::string(bytes) : text::cp1252_to_utf8(bytes);
  }
  if (charset == "utf-8" || charset == "utf8") return text::sanitize_utf8(bytes);
  if (charset == "iso-8859-1" || charset == "latin1" || charset == "latin-1" ||
      charset == "iso8859-1" || charset == "l1")
    return text::latin1_to_utf8(bytes);
  if (charset == "windows-1252" || charset == "cp1252" || charset == "iso-8859-15")
    return text::cp1252_to_utf8(bytes);
  if (known) *known = false;
  return text::sanitize_utf8(bytes);
}

std::string decode_encoded_words(std::string_view value) {
  std::string out;
  std::size_t i = 0;
  bool last_was_word = false;
  std::size_t pending_ws_start = std::string::npos;
  while (i < value.size()) {
    if (value.substr(i, 2) == "=?") {
      const auto q1 = value.find('?', i + 2);
      const auto q2 = q1 == std::string_view::npos ? q1 : value.find('?', q1 + 1);
      const auto end = q2 == std::string_view::npos ? q2 : value.find("?=", q2 + 1);
      if (end != std::string_view::npos && q2 == q1 + 2) {
        std::string charset(value.substr(i + 2, q1 - i - 2));
        if (const auto star = charset.find('*'); star != std::string::npos) charset.resize(star);
        const char mode = static_cast<char>(std::toupper(static_cast<unsigned char>(value[q1 + 1])));
        const std::string_view payload = value.substr(q2 + 1, end - q2 - 1);
        std::string raw;
        if (mode == 'B') {
          raw = decode_base64(payload);
        } else if (mode == 'Q') {
          for (std::size_t k = 0; k < payload.size(); ++k) {
            if (payload[k] == '_') {
              raw.push_back(' ');
            } else if (payload[k] == '=' && k + 2 < payload.size() &&
                       hex_value(payload[k + 1]) >= 0 && hex_value(payload[k + 2]) >= 0) {
              raw.push_back(static_cast<char>(hex_value(payload[k + 1]) * 16 + hex_value(payload[k + 2])));
              k += 2;
            } else {
              raw.push_back(payload[k]);
            }
          }
        } else {
          out.push_back(value[i++]);
          continue;
        }
        // Whitespace between adjacent encoded words is dropped.
        if (last_was_word && pending_ws_start != std::string::npos) out.resize(pending_ws_start);
        out += to_utf8(raw, charset);
        i = end + 2;
        last_was_word = true;
        pending_ws_start = std::string::npos;
        continue;
      }
    }
    const char c = value[i++];
    if (c == ' ' || c == '\t') {
      if (pending_ws_start == std::string::npos) pending_ws_start = out.size();
    } else {
      last_was_word = false;
      pending_ws_start = std::string::npos;
    }
    out.push_back(c);
  }
  return out;
}

std::vector<Mailbox> parse_address_list(std::string_view value) {
  // Split on commas outside quotes, angle brackets and comments.
  std::vector<std::string_view> items;
  int angle = 0, paren = 0;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const char c = value[i];
    if (quoted) {
      if (c == '\\') ++i;
      else if (c == '"') quoted = false;
      continue;
    }
    if (c == '"') quoted = true;
    else if (c == '<') ++angle;
    else if (c == '>' && angle > 0) --angle;
    else if (c == '(') ++paren;
    else if (c == ')' && paren > 0) --paren;
    else if ((c == ',' || c == ';') && angle == 0 && paren == 0) {
      items.push_back(value.substr(start, i - start));
      start = i + 1;
    }
  }
  items.push_back(value.substr(start));

  std::vector<Mailbox> out;
  for (std::string_view item : items) {
    item = text::trim(item);
    if (item.empty()) continue;
    // Group syntax "name: a@b" -- drop the group label.
    {
      bool q = false;
      for (std::size_t i = 0; i < item.size(); ++i) {
        const char c = item[i];
        if (c == '"') q = !q;
        if (q) continue;
        if (c == '<' || c == '@') break;
        if (c == ':') {
          item = text::trim(item.substr(i + 1));
          break;
        }
      }
    }
    if (item.empty()) continue;

    Mailbox mb;
    std::string display;
    const auto lt = item.rfind('<');
    if (lt != std::string_view::npos) {
      const auto gt = item.find('>', lt);
      mb.address = std::string(text::trim(item.substr(lt + 1, gt == std::string_view::npos ? std::string_view::npos : gt - lt - 1)));
      display = std::string(text::trim(item.substr(0, lt)));
    } else {
      // Bare address, possibly with a trailing "(comment)" used as a name.
      std::string_view addr = item;
      if (const auto lp = item.find('('); lp != std::string_view::npos) {
        const auto rp = item.find(')', lp);
        display = std::string(item.substr(lp + 1, rp == std::string_view::npos ? std::string_view::npos : rp - lp - 1));
        addr = text::trim(item.substr(0, lp));
      }
      if (addr.find('@') != std::string_view::npos) {
        mb.address = std::string(addr);
      } else {
        display = std::string(addr);
      }
    }
    if (display.size() >= 2 && display.front() == '"' && display.back() == '"') {
      std::string unq;
      for (std::size_t i = 1; i + 1 < display.size(); ++i) {
        if (display[i] == '\\' && i + 2 < display.size()) ++i;
        unq.push_back(display[i]);
      }
      display = std::move(unq);
    }
    mb.display_name = std::string(text::trim(header_text(display)));
    out.push_back(std::move(mb));
  }
  return out;
}

ParsedEmail parse_eml(const RawEmail& raw, const TextExtractorRegistry& extractors,
                      const PublicSuffixList& suffixes) {
  ParsedEmail email;
  email.source_id = raw.source_id;
  if (raw.bytes.empty()) {
    email.diagnostics.push_back("empty message");
    return email;
  }
  std::string_view body;
  const HeaderBlock headers = parse_headers(raw.bytes, body, email.diagnostics);

  if (auto from = headers.get("from")) {
    const auto boxes = parse_address_list(*from);
    if (!boxes.empty()) {
      email.sender_name = boxes.front().display_name;
      email.sender_address = text::sanitize_utf8(boxes.front().address);
      if (!email.sender_address.empty()) {
        try {
          email.sender_domain = extract_registrable_domain(email.sender_address, suffixes);
        } catch (const DomainError& e) {
          email.diagnostics.push_back(std::string("sender: ") + e.what());
        }
      } else {
        email.diagnostics.push_back("sender: From header has no address");
      }
    }
  } else {
    email.diagnostics.push_back("sender: no From header");
  }

  for (const char* name : {"to", "cc", "delivered-to", "x-original-to"})
    for (auto v : headers.all(name)) add_recipient_domains(v, suffixes, email);

  if (auto subject = headers.get("subject")) email.subject = std::string(text::trim(header_text(*subject)));

  {
    const auto results = headers.all("authentication-results");
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (i) email.authentication_results += " | ";
      email.authentication_results += text::sanitize_utf8(results[i]);
    }
  }

  PartContext ctx{extractors, email.body_segments, email.diagnostics};
  parse_entity(headers, body, ctx, 0);
  return email;
}

}  // namespace refmail::ingest
