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

#include "refmail/tagging/baseline_tagger.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "refmail/util/text.hpp"

namespace refmail::tagging {

namespace {

std::vector<std::string> folded_alias_tokens(std::string_view alias) {
  std::vector<std::string> out;
  for (auto [b, e] : tokenize(alias)) out.push_back(text::fold_key(alias.substr(b, e - b)));
  return out;
}

bool is_sentence_break(std::string_view tok) {
  return tok == "." || tok == "!" || tok == "?" || tok == ";" || tok == ":";
}

const std::vector<std::string>& default_verbs() {
  static const std::vector<std::string> v = {
      "access", "accept", "activate", "approve", "authenticate", "call", "change", "check",
      "claim", "click", "complete", "confirm", "contact", "download", "enter", "fill",
      "follow", "go", "install", "log", "login", "open", "pay", "print", "provide",
      "reactivate", "read", "redeem", "register", "reply", "reset", "respond", "restore",
      "review", "scan", "secure", "see", "send", "sign", "submit", "tap", "unlock", "update",
      "upgrade", "validate", "verify", "view", "visit"};
  return v;
}

const std::vector<std::string>& default_objects() {
  static const std::vector<std::string> v = {
      "account", "attachment", "below", "button", "code", "credentials", "details", "document",
      "file", "form", "here", "invoice", "link", "login", "mailbox", "message", "page",
      "password", "payment", "portal", "url", "website"};
  return v;
}

}  // namespace

ActionLexicon ActionLexicon::defaults() {
  ActionLexicon lex;
  lex.verbs.insert(default_verbs().begin(), default_verbs().end());
  lex.objects.insert(default_objects().begin(), default_objects().end());
  return lex;
}

ActionLexicon ActionLexicon::from_json_text(std::string_view json_text) {
  const auto j = nlohmann::json::parse(json_text);
  ActionLexicon lex;
  for (const auto& v : j.at("verbs")) lex.verbs.insert(text::fold_key(v.get<std::string>()));
  for (const auto& o : j.at("objects")) lex.objects.insert(text::fold_key(o.get<std::string>()));
  if (j.contains("window")) lex.window = j.at("window").get<std::size_t>();
  if (j.contains("url_is_object")) lex.url_is_object = j.at("url_is_object").get<bool>();
  return lex;
}

ActionLexicon ActionLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open action lexicon " + path.string());
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return from_json_text(body);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad action lexicon " + path.string() + ": " + e.what());
  }
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open gazetteer " + path.string());
  Gazetteer g;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    g.add(t);
  }
  return g;
}

void Gazetteer::add(std::string_view alias) {
  auto toks = folded_alias_tokens(alias);
  if (toks.empty()) return;
  std::string key;
  for (const auto& t : toks) key += t + '\x1f';
  if (!seen_.insert(key).second) return;
  by_first_[toks.front()].push_back(aliases_.size());
  for (const auto& t : toks) index_token(t);
  aliases_.push_back(std::move(toks));
}

void Gazetteer::index_token(const std::string& token) {
  if (!tokens_.insert(token).second) return;
  const auto cps = text::decode_utf8(token);
  deletes_[token].push_back(token);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    std::u32string d = cps;
    d.erase(i, 1);
    auto& bucket = deletes_[text::encode_utf8(d)];
    if (bucket.empty() || bucket.back() != token) bucket.push_back(token);
  }
}

const std::vector<std::size_t>* Gazetteer::starting_with(const std::string& folded_token) const {
  auto it = by_first_.find(folded_token);
  return it == by_first_.end() ? nullptr : &it->second;
}

std::vector<std::string> Gazetteer::fuzzy_candidates(const std::string& folded,
                                                     std::size_t min_chars) const {
  std::vector<std::string> out;
  const auto cps = text::decode_utf8(folded);
  if (cps.size() + 1 < min_chars) return out;
  auto consider = [&](const std::string& key) {
    auto it = deletes_.find(key);
    if (it == deletes_.end()) return;
    for (const auto& g : it->second) {
      if (g == folded) continue;
      const auto gc = text::decode_utf8(g);
      if (gc.size() < min_chars) continue;
      if (damerau_levenshtein(cps, gc, 1) <= 1 &&
          std::find(out.begin(), out.end(), g) == out.end())
        out.push_back(g);
    }
  };
  consider(folded);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    std::u32string d = cps;
    d.erase(i, 1);
    consider(text::encode_utf8(d));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t damerau_levenshtein(std::u32string_view a, std::u32string_view b, std::size_t limit) {
  const std::size_t n = a.size(), m = b.size();
  if ((n > m ? n - m : m - n) > limit) return limit + 1;
  std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1])
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
    }
  }
  return std::min(d[n][m], limit + 1);
}

BaselineTagger::BaselineTagger(Gazetteer gazetteer, ActionLexicon lexicon, BaselineOptions options)
    : gazetteer_(std::move(gazetteer)), lexicon_(std::move(lexicon)), options_(options) {}

std::vector<EntitySpan> BaselineTagger::identity_spans(const TokenSequence& tokens) const {
  const std::size_t n = tokens.size();
  std::vector<std::string> folded(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!tokens[i].sentinel) folded[i] = text::fold_key(tokens[i].text);
  std::vector<std::optional<std::vector<std::string>>> fuzzy(n);
  auto fuzzy_of = [&](std::size_t i) -> const std::vector<std::string>& {
    if (!fuzzy[i]) fuzzy[i] = gazetteer_.fuzzy_candidates(folded[i], options_.fuzzy_min_chars);
    return *fuzzy[i];
  };
  auto token_matches = [&](std::size_t i, const std::string& alias_tok, bool& exact) {
    if (folded[i] == alias_tok) return true;
    if (!options_.fuzzy) return false;
    const auto& f = fuzzy_of(i);
    if (std::binary_search(f.begin(), f.end(), alias_tok)) {
      exact = false;
      return true;
    }
    return false;
  };

  std::vector<EntitySpan> spans;
  std::size_t i = 0;
  while (i < n) {
    if (tokens[i].sentinel || !is_word_token(tokens[i].text)) {
      ++i;
      continue;
    }
    std::vector<std::string> firsts = {folded[i]};
    if (options_.fuzzy)
      for (const auto& f : fuzzy_of(i)) firsts.push_back(f);
    std::size_t best_len = 0;
    bool best_exact = false;
    for (const auto& first : firsts) {
      const auto* ids = gazetteer_.starting_with(first);
      if (!ids) continue;
      for (std::size_t id : *ids) {
        const auto& alias = gazetteer_.aliases()[id];
        const std::size_t len = alias.size();
        if (i + len > n) continue;
        bool ok = true, exact = true;
        for (std::size_t k = 0; k < len && ok; ++k) {
          const auto& tk = tokens[i + k];
          ok = !tk.sentinel && tk.field == tokens[i].field && token_matches(i + k, alias[k], exact);
        }
        if (!ok) continue;
        if (len > best_len || (len == best_len && exact && !best_exact)) {
          best_len = len;
          best_exact = exact;
        }
      }
    }
    if (best_len == 0) {
      ++i;
      continue;
    }
    spans.push_back({EntityClass::kIdentity, i, i + best_len - 1, tokens.surface(i, i + best_len - 1)});
    i += best_len;
  }
  return spans;
}

std::vector<EntitySpan> BaselineTagger::action_spans(const TokenSequence& tokens) const {
  const std::size_t n = tokens.size();
  auto is_object = [&](const Token& t) {
    if (lexicon_.url_is_object && is_url_token(t.text)) return true;
    const auto f = text::fold_key(t.text);
    if (lexicon_.objects.count(f)) return true;
    return f.size() > 3 && f.back() == 's' && lexicon_.objects.count(f.substr(0, f.size() - 1));
  };
  std::vector<EntitySpan> spans;
  std::size_t i = 0;
  while (i < n) {
    const Token& v = tokens[i];
    if (v.sentinel || !is_word_token(v.text) || !lexicon_.verbs.count(text::fold_key(v.text))) {
      ++i;
      continue;
    }
    std::size_t end = 0;
    for (std::size_t j = i + 1; j < n && j <= i + lexicon_.window; ++j) {
      const Token& t = tokens[j];
      if (t.sentinel || t.field != v.field || is_sentence_break(t.text)) break;
      if (is_object(t)) {
        end = j;
        break;
      }
    }
    if (end == 0) {
      ++i;
      continue;
    }
    spans.push_back({EntityClass::kAction, i, end, tokens.surface(i, end)});
    i = end + 1;
  }
  return spans;
}

std::vector<EntitySpan> BaselineTagger::spans(const TokenSequence& tokens) const {
  auto out = identity_spans(tokens);
  auto act = action_spans(tokens);
  out.insert(out.end(), act.begin(), act.end());
  std::stable_sort(out.begin(), out.end(), [](const EntitySpan& a, const EntitySpan& b) {
    return a.start_token < b.start_token;
  });
  return out;
}

TagSequence BaselineTagger::tag(const TokenSequence& tokens) const {
  TagSequence tags(tokens.size(), Tag::outside());
  auto write = [&](const EntitySpan& s) {
    tags[s.start_token] = Tag::begin(s.cls);
    for (std::size_t k = s.start_token + 1; k <= s.end_token; ++k) tags[k] = Tag::inside(s.cls);
  };
  for (const auto& s : action_spans(tokens)) write(s);
  for (const auto& s : identity_spans(tokens)) write(s);
  // An action span cut by an identity resumes with IE-ACT; make it explicit.
  for (std::size_t k = 0; k < tags.size(); ++k) {
    if (tags[k].kind == TagKind::kInside &&
        (k == 0 || tags[k - 1].is_outside() || tags[k - 1].cls != tags[k].cls))
      tags[k] = Tag::begin(tags[k].cls);
  }
  return tags;
}

}  // namespace refmail::tagging
