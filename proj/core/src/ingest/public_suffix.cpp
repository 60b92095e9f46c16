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

#include "refmail/ingest/public_suffix.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "refmail/util/text.hpp"

namespace refmail::ingest {

namespace {

constexpr std::uint32_t kBase = 36, kTMin = 1, kTMax = 26, kSkew = 38, kDamp = 700;
constexpr std::uint32_t kInitialBias = 72, kInitialN = 128;

std::uint32_t adapt(std::uint32_t delta, std::uint32_t num_points, bool first) {
  delta = first ? delta / kDamp : delta / 2;
  delta += delta / num_points;
  std::uint32_t k = 0;
  while (delta > ((kBase - kTMin) * kTMax) / 2) {
    delta /= kBase - kTMin;
    k += kBase;
  }
  return k + (((kBase - kTMin + 1) * delta) / (delta + kSkew));
}

int digit_value(char c) {
  if (c >= '0' && c <= '9') return c - '0' + 26;
  if (c >= 'a' && c <= 'z') return c - 'a';
  if (c >= 'A' && c <= 'Z') return c - 'A';
  return -1;
}

// Lowercases a rule or host label and maps punycode labels to Unicode so that
// both spellings hit the same rule.
std::string canonical_label(std::string_view label) {
  std::string lower = text::ascii_lower(label);
  if (lower.rfind("xn--", 0) == 0) {
    if (auto decoded = punycode_decode(std::string_view(lower).substr(4))) {
      for (char32_t& c : *decoded) c = text::fold_char(c);
      return text::encode_utf8(*decoded);
    }
  }
  return lower;
}

bool valid_label(std::string_view label) {
  if (label.empty() || label.size() > 253) return false;
  for (char c : label) {
    const auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || u == 0x7F) return false;
    if (c == '@' || c == '/' || c == '\\' || c == '<' || c == '>' || c == '"' || c == ',' ||
        c == ';' || c == ':' || c == '(' || c == ')' || c == '[' || c == ']')
      return false;
  }
  return true;
}

std::string join(const std::vector<std::string>& labels, std::size_t from) {
  std::string out;
  for (std::size_t i = from; i < labels.size(); ++i) {
    if (i > from) out.push_back('.');
    out += labels[i];
  }
  return out;
}

bool is_ipv4(std::string_view host) {
  int dots = 0;
  int digits = 0;
  for (char c : host) {
    if (c == '.') {
      if (digits == 0) return false;
      ++dots;
      digits = 0;
    } else if (c >= '0' && c <= '9') {
      if (++digits > 3) return false;
    } else {
      return false;
    }
  }
  return dots == 3 && digits > 0;
}

}  // namespace

std::optional<std::u32string> punycode_decode(std::string_view input) {
  std::u32string output;
  std::size_t basic_end = input.rfind('-');
  if (basic_end == std::string_view::npos) basic_end = 0;
  for (std::size_t i = 0; i < basic_end; ++i) {
    if (static_cast<unsigned char>(input[i]) >= 0x80) return std::nullopt;
    output.push_back(static_cast<unsigned char>(input[i]));
  }
  std::uint32_t n = kInitialN, bias = kInitialBias, i = 0;
  std::size_t pos = basic_end > 0 ? basic_end + 1 : 0;
  while (pos < input.size()) {
    const std::uint32_t old_i = i;
    std::uint32_t w = 1;
    for (std::uint32_t k = kBase;; k += kBase) {
      if (pos >= input.size()) return std::nullopt;
      const int digit = digit_value(input[pos++]);
      if (digit < 0) return std::nullopt;
      if (static_cast<std::uint64_t>(digit) * w > UINT32_MAX - i) return std::nullopt;
      i += static_cast<std::uint32_t>(digit) * w;
      const std::uint32_t t = k <= bias ? kTMin : (k >= bias + kTMax ? kTMax : k - bias);
      if (static_cast<std::uint32_t>(digit) < t) break;
      if (static_cast<std::uint64_t>(w) * (kBase - t) > UINT32_MAX) return std::nullopt;
      w *= kBase - t;
    }
    const auto count = static_cast<std::uint32_t>(output.size() + 1);
    bias = adapt(i - old_i, count, old_i == 0);
    if (i / count > UINT32_MAX - n) return std::nullopt;
    n += i / count;
    i %= count;
    if (n > 0x10FFFF || (n >= 0xD800 && n <= 0xDFFF)) return std::nullopt;
    output.insert(output.begin() + i, static_cast<char32_t>(n));
    ++i;
  }
  return output;
}

PublicSuffixList PublicSuffixList::parse(std::string_view text) {
  PublicSuffixList psl;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text::trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.rfind("//", 0) == 0) continue;
    // Rules end at the first whitespace.
    if (const auto ws = line.find_first_of(" \t"); ws != std::string_view::npos)
      line = line.substr(0, ws);

    bool exception = false;
    bool wildcard = false;
    if (line.front() == '!') {
      exception = true;
      line.remove_prefix(1);
    } else if (line.rfind("*.", 0) == 0) {
      wildcard = true;
      line.remove_prefix(2);
    }
    std::vector<std::string> labels;
    for (auto part : text::split(line, '.')) labels.push_back(canonical_label(part));
    const std::string rule = join(labels, 0);
    if (rule.empty()) continue;
    if (exception)
      psl.exception_.insert(rule);
    else if (wildcard)
      psl.wildcard_.insert(rule);
    else
      psl.exact_.insert(rule);
    if (start > text.size()) break;
  }
  return psl;
}

PublicSuffixList PublicSuffixList::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open public suffix list: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::size_t PublicSuffixList::suffix_label_count(std::string_view host) const {
  std::vector<std::string> labels;
  for (auto part : text::split(host, '.')) labels.push_back(canonical_label(part));
  const std::size_t n = labels.size();
  if (n == 0) return 0;

  // Exception rules win over everything else.
  for (std::size_t i = 0; i < n; ++i) {
    if (exception_.count(join(labels, i))) return n - i - 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (exact_.count(join(labels, i))) return n - i;
    if (i + 1 < n && wildcard_.count(join(labels, i + 1))) return n - i;
  }
  return 1;
}

std::optional<std::string> PublicSuffixList::registrable_domain(std::string_view host) const {
  if (host.empty() || host.front() == '.') return std::nullopt;
  if (host.back() == '.') host.remove_suffix(1);
  if (host.empty()) return std::nullopt;

  const std::string lower = text::ascii_lower(host);
  if (is_ipv4(lower)) return lower;
  const auto parts = text::split(lower, '.');
  for (auto part : parts)
    if (!valid_label(part)) return std::nullopt;

  const std::size_t suffix = suffix_label_count(lower);
  if (suffix >= parts.size()) return std::nullopt;
  std::string out;
  for (std::size_t i = parts.size() - suffix - 1; i < parts.size(); ++i) {
    if (!out.empty()) out.push_back('.');
    out += parts[i];
  }
  return out;
}

std::string extract_registrable_domain(std::string_view address_or_host,
                                       const PublicSuffixList& suffixes) {
  const std::string raw(address_or_host);
  std::string_view s = text::trim(address_or_host);
  if (const auto lt = s.rfind('<'); lt != std::string_view::npos) {
    const auto gt = s.find('>', lt);
    s = s.substr(lt + 1, gt == std::string_view::npos ? std::string_view::npos : gt - lt - 1);
  }
  s = text::trim(s);
  std::string_view host = s;
  if (const auto at = s.rfind('@'); at != std::string_view::npos) {
    if (at == 0) throw DomainError(raw, "address has an empty local part");
    host = s.substr(at + 1);
  }
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
    if (is_ipv4(host)) return std::string(host);
    throw DomainError(raw, "unsupported address literal");
  }
  if (host.empty()) throw DomainError(raw, "missing host part");
  auto domain = suffixes.registrable_domain(host);
  if (!domain) throw DomainError(raw, "no registrable domain");
  return *domain;
}

}  // namespace refmail::ingest
