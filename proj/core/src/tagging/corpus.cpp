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

#include "refmail/tagging/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "refmail/util/text.hpp"

namespace refmail::tagging {

std::vector<LabeledSample> read_labeled_corpus(std::istream& in) {
  std::vector<LabeledSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    auto fail = [&](const std::string& why) {
      return std::runtime_error("labeled corpus line " + std::to_string(lineno) + ": " + why);
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw fail(e.what());
    }
    LabeledSample s;
    try {
      s.tokens = j.at("tokens").get<std::vector<std::string>>();
      for (const auto& t : j.at("tags")) {
        auto tag = parse_tag(t.get<std::string>());
        if (!tag) throw fail("unknown tag " + t.get<std::string>());
        s.tags.push_back(*tag);
      }
    } catch (const nlohmann::json::exception& e) {
      throw fail(e.what());
    }
    if (s.tokens.size() != s.tags.size()) throw fail("tokens and tags differ in length");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<LabeledSample> load_labeled_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open labeled corpus " + path.string());
  return read_labeled_corpus(in);
}

void write_labeled_corpus(std::ostream& out, const std::vector<LabeledSample>& samples) {
  for (const auto& s : samples) {
    nlohmann::ordered_json j;
    j["tokens"] = s.tokens;
    auto& tags = j["tags"] = nlohmann::ordered_json::array();
    for (Tag t : s.tags) tags.push_back(std::string(to_string(t)));
    out << j.dump() << '\n';
  }
}

}  // namespace refmail::tagging
