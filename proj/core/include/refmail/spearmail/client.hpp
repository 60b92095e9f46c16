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
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "refmail/util/line_json.hpp"

namespace refmail::spearmail {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text in, text out. Implementations throw GenerationError on failure.
class GenerationClient {
 public:
  virtual ~GenerationClient() = default;
  virtual std::string generate(std::string_view prompt) = 0;
};

// Offline stand-in. The reply depends only on (seed, prompt): it recognizes
// the interest, activity, email and persuasion prompts and answers in the
// shapes the parsers expect.
class MockGenerationClient final : public GenerationClient {
 public:
  explicit MockGenerationClient(std::uint64_t seed = 0) : seed_(seed) {}
  std::string generate(std::string_view prompt) override;

 private:
  std::uint64_t seed_;
};

// {"id","prompt"} -> {"id","text"} over the line-JSON transport.
class AdapterGenerationClient final : public GenerationClient {
 public:
  AdapterGenerationClient(std::shared_ptr<JsonLineTransport> transport,
                          std::chrono::milliseconds deadline = std::chrono::milliseconds(30000));
  std::string generate(std::string_view prompt) override;

 private:
  std::shared_ptr<JsonLineTransport> transport_;
  std::chrono::milliseconds deadline_;
};

}  // namespace refmail::spearmail
