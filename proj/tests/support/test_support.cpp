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

#include "test_support.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <stdexcept>

#include "refmail/service/config.hpp"

#ifndef REFMAIL_TEST_DATA_DIR
#error "REFMAIL_TEST_DATA_DIR must be defined"
#endif

namespace refmail::testing {

namespace fs = std::filesystem;

fs::path data_dir() { return REFMAIL_TEST_DATA_DIR; }
fs::path fixture_dir() { return REFMAIL_TEST_FIXTURE_DIR; }
fs::path fixture_kb_path() { return data_dir() / "kb" / "fixture_kb.jsonl"; }
std::string mock_adapter_path() { return REFMAIL_MOCK_ADAPTER; }

const ingest::PublicSuffixList& psl() {
  static const auto list = ingest::PublicSuffixList::load(data_dir() / "public_suffix_list.dat");
  return list;
}

std::shared_ptr<const kb::KnowledgeBase> fixture_kb() {
  static const auto kb = std::make_shared<const kb::KnowledgeBase>(kb::load_kb(fixture_kb_path()));
  return kb;
}

std::shared_ptr<const identity::IdentityMatcher> fixture_matcher() {
  static const auto m = std::make_shared<const identity::IdentityMatcher>(fixture_kb());
  return m;
}

const tagging::BaselineTagger& fixture_tagger() {
  static const auto t = service::make_baseline_tagger(
      *fixture_kb(), tagging::ActionLexicon::load(data_dir() / "action_lexicon.json"));
  return t;
}

double calibrated_threshold() {
  service::ScanConfig cfg;
  service::apply_config(cfg, service::load_config_file(data_dir() / "refmail.conf"));
  return cfg.threshold;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, std::string_view content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("refmail-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string build_message(const MessageSpec& s) {
  std::string m;
  if (s.from_name.empty()) {
    m += "From: <" + s.from_address + ">\r\n";
  } else {
    m += "From: \"" + s.from_name + "\" <" + s.from_address + ">\r\n";
  }
  m += "To: " + s.to + "\r\nSubject: " + s.subject + "\r\n";
  for (const auto& h : s.extra_headers) m += h + "\r\n";
  m += "MIME-Version: 1.0\r\nContent-Type: text/plain; charset=utf-8\r\n\r\n" + s.body + "\r\n";
  return m;
}

ingest::ParsedEmail parse(const std::string& raw, const std::string& id) {
  static const auto registry = ingest::TextExtractorRegistry::with_defaults();
  return ingest::parse_eml({raw, id}, registry, psl());
}

service::ScanConfig fixture_scan_config() {
  service::ScanConfig cfg;
  cfg.data_dir = data_dir().string();
  cfg.kb_path = fixture_kb_path().string();
  cfg.threshold = calibrated_threshold();
  return cfg;
}

}  // namespace refmail::testing
