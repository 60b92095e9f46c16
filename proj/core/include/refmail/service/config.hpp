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

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "refmail/ingest/mailbox.hpp"

namespace refmail::service {

inline constexpr std::size_t kDefaultMaxMessageSize = 25u * 1024u * 1024u;
inline constexpr double kDefaultThreshold = 0.83;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScanConfig {
  std::string kb_path;
  std::vector<std::string> inputs;  // empty or "-" reads stdin
  std::optional<ingest::InputFormat> format;  // unset: detect per input
  double threshold = kDefaultThreshold;
  bool require_action = true;
  std::optional<std::string> adapter_tagger;
  std::optional<std::string> adapter_embed;
  std::optional<std::string> adapter_extractor;
  std::size_t embed_dims = 256;  // vector length expected from the embedding adapter
  std::chrono::milliseconds adapter_deadline{500};
  std::string output;  // empty: stdout
  std::size_t workers = 1;
  std::size_t max_message_size = kDefaultMaxMessageSize;
  std::size_t max_body_tokens = 20000;
  std::string data_dir;        // bundled resources
  std::string psl_path;        // default: <data_dir>/public_suffix_list.dat
  std::string lexicon_path;    // default: <data_dir>/action_lexicon.json
  std::string gazetteer_path;  // optional extra aliases; KB aliases are always used

  // Throws ConfigError on out-of-range values.
  void validate() const;

  std::filesystem::path resolved_psl() const;
  std::filesystem::path resolved_lexicon() const;
};

// Compiled-in resource directory, overridable with REFMAIL_DATA_DIR.
std::string default_data_dir();

// `key = value` lines; '#' comments; optional double quotes; `[section]`
// headers prefix later keys with "section.". Throws ConfigError with the line.
std::map<std::string, std::string> parse_config_text(std::string_view text);
std::map<std::string, std::string> load_config_file(const std::filesystem::path& path);

// Applies known keys (kb, threshold, require_action, workers, format, output,
// adapter_tagger, adapter_embed, adapter_extractor, embed_dims,
// adapter_deadline_ms, max_message_size, max_body_tokens, data_dir, psl,
// lexicon, gazetteer). Unknown keys are a ConfigError.
void apply_config(ScanConfig& config, const std::map<std::string, std::string>& values);

// Explicit path, else $REFMAIL_KB; throws ConfigError when neither is set.
std::string resolve_kb_path(const std::string& explicit_path);

bool parse_bool(std::string_view s);

}  // namespace refmail::service
