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

// Line-delimited JSON adapter used by the tests. One process, one mode:
//   tagger-baseline  tags with the native baseline (needs --kb, --data-dir)
//   tagger-outside   tags every token O
//   wrong-length     one tag too few
//   bad-tag          emits an unknown tag name
//   garbage          answers with a non-JSON line
//   slow             sleeps --delay-ms before a baseline-shaped all-O answer
//   embed            native char embedding of "phrase"
//   embed-bad-dims   vector of length 3
//   extract          {"text": "extracted <mime>: <payload>"}
//   generate         mock generation client over "prompt"
//   exit             reads one line and exits without answering
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <thread>

#include "refmail/identity/char_embedding.hpp"
#include "refmail/ingest/extractors.hpp"
#include "refmail/kb/knowledge_base.hpp"
#include "refmail/service/scanner.hpp"
#include "refmail/spearmail/client.hpp"
#include "refmail/tagging/baseline_tagger.hpp"
#include "refmail/util/line_json.hpp"

namespace {

std::string decode_b64(const std::string& in) {
  static const std::string chars =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  unsigned val = 0;
  int bits = -8;
  for (char c : in) {
    const auto pos = chars.find(c);
    if (pos == std::string::npos) continue;
    val = (val << 6) + static_cast<unsigned>(pos);
    bits += 6;
    if (bits >= 0) {
      out.push_back(static_cast<char>((val >> bits) & 0xFF));
      bits -= 8;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using refmail::Json;
  if (argc < 2) {
    std::cerr << "usage: mock_adapter MODE [--kb P] [--data-dir D] [--delay-ms N]\n";
    return 2;
  }
  const std::string mode = argv[1];
  std::string kb_path, data_dir;
  int delay_ms = 0;
  for (int i = 2; i + 1 < argc; i += 2) {
    const std::string k = argv[i];
    if (k == "--kb") kb_path = argv[i + 1];
    if (k == "--data-dir") data_dir = argv[i + 1];
    if (k == "--delay-ms") delay_ms = std::atoi(argv[i + 1]);
  }

  std::unique_ptr<refmail::tagging::BaselineTagger> tagger;
  if (mode == "tagger-baseline") {
    const auto kb = refmail::kb::load_kb(kb_path);
    const auto lex = refmail::tagging::ActionLexicon::load(data_dir + "/action_lexicon.json");
    tagger = std::make_unique<refmail::tagging::BaselineTagger>(
        refmail::service::make_baseline_tagger(kb, lex));
  }
  refmail::spearmail::MockGenerationClient gen(7);

  std::string line;
  while (std::getline(std::cin, line)) {
    if (mode == "exit") return 0;
    const Json req = Json::parse(line, nullptr, false);
    Json resp = {{"id", req.is_object() ? req.value("id", std::string()) : std::string()}};
    if (mode == "garbage") {
      std::cout << "this is not json\n" << std::flush;
      continue;
    }
    if (mode == "slow") std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));

    if (req.contains("tokens")) {
      const auto words = req.at("tokens").get<std::vector<std::string>>();
      Json tags = Json::array();
      if (mode == "tagger-baseline") {
        // Rebuild field structure from the sentinels so results match the
        // in-process baseline, which never matches across sentinels.
        refmail::TokenSequence seq;
        for (const auto& w : words) {
          const bool sentinel = w == refmail::kSubjectSentinel || w == refmail::kFromSentinel ||
                                w == refmail::kBodySentinel;
          refmail::Token t{w, refmail::Field::kBody, sentinel, seq.body.size(), 0};
          if (!seq.body.empty()) ++t.begin;
          seq.body += (seq.body.empty() ? "" : " ") + w;
          t.end = seq.body.size();
          seq.tokens.push_back(t);
        }
        for (const auto& t : tagger->tag(seq)) tags.push_back(std::string(refmail::tagging::to_string(t)));
      } else {
        for (std::size_t i = 0; i < words.size(); ++i) tags.push_back("O");
        if (mode == "wrong-length" && !tags.empty()) tags.erase(tags.size() - 1);
        if (mode == "bad-tag" && !tags.empty()) tags[0] = "B-PER";
      }
      resp["tags"] = tags;
    } else if (req.contains("phrase")) {
      if (mode == "embed-bad-dims") {
        resp["vector"] = {1.0, 0.0, 0.0};
      } else {
        resp["vector"] = refmail::identity::embed(req.at("phrase").get<std::string>()).vector;
      }
    } else if (req.contains("payload_base64")) {
      resp["text"] = "extracted " + req.value("mime_type", std::string()) + ": " +
                     decode_b64(req.at("payload_base64").get<std::string>());
    } else if (req.contains("prompt")) {
      resp["text"] = gen.generate(req.at("prompt").get<std::string>());
    }
    std::cout << resp.dump() << "\n" << std::flush;
  }
  return 0;
}
