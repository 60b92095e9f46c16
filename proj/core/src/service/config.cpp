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

#include "refmail/service/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "refmail/util/text.hpp"

#ifndef REFMAIL_DEFAULT_DATA_DIR
#define REFMAIL_DEFAULT_DATA_DIR "data"
#endif

namespace refmail::service {

namespace {

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects a number, got \"" + v + "\"");
  }
}

std::size_t to_size(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d < 0 || d != static_cast<double>(static_cast<std::size_t>(d)))
    throw ConfigError("config: " + key + " expects a non-negative integer, got \"" + v + "\"");
  return static_cast<std::size_t>(d);
}

}  // namespace

void ScanConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw ConfigError("threshold must be in [0, 1]");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (max_message_size == 0) throw ConfigError("max_message_size must be > 0");
  if (embed_dims == 0) throw ConfigError("embed_dims must be > 0");
}

std::string default_data_dir() {
  if (const char* env = std::getenv("REFMAIL_DATA_DIR"); env && *env) return env;
  return REFMAIL_DEFAULT_DATA_DIR;
}

std::filesystem::path ScanConfig::resolved_psl() const {
  if (!psl_path.empty()) return psl_path;
  return std::filesystem::path(data_dir.empty() ? default_data_dir() : data_dir) /
         "public_suffix_list.dat";
}

std::filesystem::path ScanConfig::resolved_lexicon() const {
  if (!lexicon_path.empty()) return lexicon_path;
  return std::filesystem::path(data_dir.empty() ? default_data_dir() : data_dir) /
         "action_lexicon.json";
}

bool parse_bool(std::string_view s) {
  const auto v = text::ascii_lower(text::trim(s));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected a boolean, got \"" + std::string(s) + "\"");
}

std::map<std::string, std::string> parse_config_text(std::string_view body) {
  std::map<std::string, std::string> out;
  std::string section;
  std::size_t lineno = 0;
  for (auto raw : text::split(body, '\n')) {
    ++lineno;
    std::string line(text::trim(raw));
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quotes = !in_quotes;
      if (line[i] == '#' && !in_quotes) {
        line.resize(i);
        break;
      }
    }
    line = std::string(text::trim(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": bad section");
      section = std::string(text::trim(std::string_view(line).substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key(text::trim(std::string_view(line).substr(0, eq)));
    std::string value(text::trim(std::string_view(line).substr(eq + 1)));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    out[section.empty() ? key : section + "." + key] = value;
  }
  return out;
}

std::map<std::string, std::string> load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_config(ScanConfig& c, const std::map<std::string, std::string>& values) {
  for (const auto& [k, v] : values) {
    if (k == "kb") c.kb_path = v;
    else if (k == "threshold") c.threshold = to_double(k, v);
    else if (k == "require_action") c.require_action = parse_bool(v);
    else if (k == "workers") c.workers = to_size(k, v);
    else if (k == "format") {
      try {
        c.format = ingest::parse_input_format(v);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    }
    else if (k == "output") c.output = v;
    else if (k == "adapter_tagger") c.adapter_tagger = v;
    else if (k == "adapter_embed") c.adapter_embed = v;
    else if (k == "adapter_extractor") c.adapter_extractor = v;
    else if (k == "embed_dims") c.embed_dims = to_size(k, v);
    else if (k == "adapter_deadline_ms") c.adapter_deadline = std::chrono::milliseconds(to_size(k, v));
    else if (k == "max_message_size") c.max_message_size = to_size(k, v);
    else if (k == "max_body_tokens") c.max_body_tokens = to_size(k, v);
    else if (k == "data_dir") c.data_dir = v;
    else if (k == "psl") c.psl_path = v;
    else if (k == "lexicon") c.lexicon_path = v;
    else if (k == "gazetteer") c.gazetteer_path = v;
    else throw ConfigError("config: unknown key \"" + k + "\"");
  }
}

std::string resolve_kb_path(const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  if (const char* env = std::getenv("REFMAIL_KB"); env && *env) return env;
  throw ConfigError("no knowledge base: pass --kb or set REFMAIL_KB");
}

}  // namespace refmail::service
