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

#include "refmail/adversarial/mutators.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "refmail/ingest/tokens.hpp"
#include "refmail/util/rng.hpp"
#include "refmail/util/text.hpp"

namespace refmail::adversarial {

namespace {

bool is_ascii_upper(char32_t c) { return c >= 'A' && c <= 'Z'; }
bool is_ascii_lower(char32_t c) { return c >= 'a' && c <= 'z'; }

char32_t draw_letter(char32_t original, Rng& rng) {
  const bool upper = is_ascii_upper(original);
  const char32_t lower = upper ? original - 'A' + 'a' : original;
  char32_t c;
  if (is_ascii_lower(lower)) {
    // 25 letters other than the original.
    c = 'a' + static_cast<char32_t>(rng.uniform(25));
    if (c >= lower) ++c;
  } else {
    c = 'a' + static_cast<char32_t>(rng.uniform(26));
  }
  return upper ? c - 'a' + 'A' : c;
}

Mutation not_applied(MutationKind kind, std::string_view text, ByteSpan target, std::uint64_t seed,
                     std::string note) {
  return {kind, target, seed, std::string(text), false, std::move(note)};
}

std::string recase_like(std::string_view model, std::string_view word) {
  bool any_lower = false, any_upper = false;
  for (char c : model) {
    any_lower |= c >= 'a' && c <= 'z';
    any_upper |= c >= 'A' && c <= 'Z';
  }
  if (any_upper && !any_lower && model.size() > 1) return text::ascii_upper(word);
  std::string out(word);
  if (!model.empty() && model[0] >= 'A' && model[0] <= 'Z' && !out.empty() && out[0] >= 'a' &&
      out[0] <= 'z')
    out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

}  // namespace

std::string_view to_string(CharMutation kind) {
  switch (kind) {
    case CharMutation::kDelete: return "delete";
    case CharMutation::kReplace: return "replace";
    case CharMutation::kSwitch: return "switch";
    case CharMutation::kRepeat: return "repeat";
  }
  return "delete";
}

std::string_view to_string(MutationKind kind) {
  switch (kind) {
    case MutationKind::kDelete: return "delete";
    case MutationKind::kReplace: return "replace";
    case MutationKind::kSwitch: return "switch";
    case MutationKind::kRepeat: return "repeat";
    case MutationKind::kConcatSent: return "concat_sent";
    case MutationKind::kSynonymSwap: return "synonym_swap";
  }
  return "delete";
}

std::optional<CharMutation> parse_char_mutation(std::string_view name) {
  for (CharMutation k : kAllCharMutations)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

MutationKind as_kind(CharMutation kind) { return static_cast<MutationKind>(kind); }

std::vector<std::size_t> eligible_positions(CharMutation kind, std::u32string_view s) {
  std::vector<std::size_t> out;
  const std::size_t n = s.size();
  if (n < 4) return out;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (text::is_unicode_space(s[i])) continue;
    if (kind == CharMutation::kSwitch) {
      if (i + 2 >= n || text::is_unicode_space(s[i + 1]) || s[i] == s[i + 1]) continue;
    }
    out.push_back(i);
  }
  return out;
}

Mutation mutate_chars_at(CharMutation kind, std::string_view text_in, std::size_t pos,
                         char32_t replacement, std::uint64_t seed) {
  const ByteSpan whole{0, text_in.size()};
  auto s = text::decode_utf8(text_in);
  const auto elig = eligible_positions(kind, s);
  bool ok = false;
  for (std::size_t e : elig) ok |= e == pos;
  if (!ok)
    return not_applied(as_kind(kind), text_in, whole, seed,
                       elig.empty() ? "no eligible interior position" : "position not eligible");
  switch (kind) {
    case CharMutation::kDelete: s.erase(pos, 1); break;
    case CharMutation::kRepeat: s.insert(pos, 1, s[pos]); break;
    case CharMutation::kSwitch: std::swap(s[pos], s[pos + 1]); break;
    case CharMutation::kReplace: {
      if (replacement == 0 || replacement == s[pos]) {
        Rng rng(mix_seed(seed, 0x5265706cULL));
        replacement = draw_letter(s[pos], rng);
      }
      s[pos] = replacement;
      break;
    }
  }
  return {as_kind(kind), whole, seed, text::encode_utf8(s), true, {}};
}

Mutation mutate_chars(CharMutation kind, std::string_view text_in, std::uint64_t seed) {
  const auto s = text::decode_utf8(text_in);
  const auto elig = eligible_positions(kind, s);
  if (elig.empty())
    return not_applied(as_kind(kind), text_in, {0, text_in.size()}, seed,
                       "no eligible interior position");
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(kind)));
  const std::size_t pos = elig[rng.uniform(elig.size())];
  char32_t repl = 0;
  if (kind == CharMutation::kReplace) repl = draw_letter(s[pos], rng);
  return mutate_chars_at(kind, text_in, pos, repl, seed);
}

Mutation concat_sentence(std::string_view body, ByteSpan action) {
  if (action.begin > action.end || action.end > body.size())
    throw std::out_of_range("concat_sentence: span outside text");
  std::size_t i = action.begin;
  while (i > 0 && (body[i - 1] == ' ' || body[i - 1] == '\t' || body[i - 1] == '\n' ||
                   body[i - 1] == '\r'))
    --i;
  const std::size_t term_end = i;
  while (i > 0 && is_terminator(body[i - 1])) --i;
  const std::size_t term_begin = i;
  if (term_begin == term_end)
    return not_applied(MutationKind::kConcatSent, body, action, 0, "no preceding terminator");
  std::size_t k = term_begin;
  while (k > 0 && (body[k - 1] == ' ' || body[k - 1] == '\n' || body[k - 1] == '\r' ||
                   body[k - 1] == '\t'))
    --k;
  if (k == 0) return not_applied(MutationKind::kConcatSent, body, action, 0, "no preceding sentence");
  std::string out;
  out.reserve(body.size());
  out.append(body.substr(0, term_begin));
  out.append(body.substr(term_end, action.begin - term_end));
  std::string span(body.substr(action.begin, action.end - action.begin));
  if (!span.empty() && span[0] >= 'A' && span[0] <= 'Z') span[0] = static_cast<char>(span[0] + 32);
  out += span;
  out.append(body.substr(action.end));
  return {MutationKind::kConcatSent, action, 0, std::move(out), true, {}};
}

SynonymTable SynonymTable::from_json_text(std::string_view json_text) {
  const auto j = nlohmann::json::parse(json_text);
  if (!j.is_object()) throw std::runtime_error("synonym table must be a JSON object");
  SynonymTable t;
  for (const auto& [verb, syns] : j.items()) t.add(verb, syns.get<std::vector<std::string>>());
  return t;
}

SynonymTable SynonymTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open synonym table " + path.string());
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return from_json_text(body);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad synonym table " + path.string() + ": " + e.what());
  }
}

void SynonymTable::add(std::string_view verb, std::vector<std::string> synonyms) {
  auto key = text::ascii_lower(text::trim(verb));
  std::vector<std::string> clean;
  for (auto& s : synonyms) {
    auto v = text::ascii_lower(text::trim(s));
    if (!v.empty() && v != key) clean.push_back(std::move(v));
  }
  if (key.empty() || clean.empty()) return;
  table_[key] = std::move(clean);
}

const std::vector<std::string>* SynonymTable::lookup(std::string_view verb) const {
  auto it = table_.find(text::ascii_lower(verb));
  return it == table_.end() ? nullptr : &it->second;
}

std::vector<std::string> SynonymTable::vocabulary() const {
  std::set<std::string> all;
  for (const auto& [k, v] : table_) {
    all.insert(k);
    all.insert(v.begin(), v.end());
  }
  return {all.begin(), all.end()};
}

std::optional<ByteSpan> head_verb(std::string_view action_text) {
  for (auto [b, e] : tokenize(action_text))
    if (is_word_token(action_text.substr(b, e - b))) return ByteSpan{b, e};
  return std::nullopt;
}

Mutation synonym_swap(std::string_view action_text, const SynonymTable& table, std::uint64_t seed) {
  const ByteSpan whole{0, action_text.size()};
  const auto head = head_verb(action_text);
  if (!head) return not_applied(MutationKind::kSynonymSwap, action_text, whole, seed, "no head verb");
  const auto verb = action_text.substr(head->begin, head->end - head->begin);
  const auto* syns = table.lookup(verb);
  if (!syns)
    return not_applied(MutationKind::kSynonymSwap, action_text, whole, seed,
                       "verb not in synonym table");
  Rng rng(mix_seed(seed, fnv1a64(text::ascii_lower(verb))));
  const auto& pick = (*syns)[rng.uniform(syns->size())];
  std::string out(action_text.substr(0, head->begin));
  out += recase_like(verb, pick);
  out.append(action_text.substr(head->end));
  return {MutationKind::kSynonymSwap, whole, seed, std::move(out), true, {}};
}

}  // namespace refmail::adversarial
