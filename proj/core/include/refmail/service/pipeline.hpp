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

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "refmail/ingest/email.hpp"
#include "refmail/service/config.hpp"
#include "refmail/service/scanner.hpp"
#include "refmail/verdict/verdict.hpp"

namespace refmail::service {

struct SourceItem {
  ingest::RawEmail raw;
  bool oversize = false;
  std::size_t size = 0;               // bytes, when known
  std::optional<std::string> error;   // set when the message could not be read
};

// Pull-based reader; nullopt at end of input.
using MessageSource = std::function<std::optional<SourceItem>()>;
using VerdictSink = std::function<void(const verdict::Verdict&)>;

struct PipelineStats {
  std::size_t messages = 0;
  std::size_t phishing = 0;
  std::size_t max_in_flight = 0;  // read but not yet written
};

// One reader (the calling thread), `workers` scan threads and one ordered
// writer. At most `window` messages (default 2 x workers) are held at once,
// so memory stays bounded by window x max message size. The sink sees
// verdicts in input order. Exceptions from the sink are rethrown.
PipelineStats run_pipeline(const Scanner& scanner, const MessageSource& source,
                           const VerdictSink& sink, std::size_t workers, std::size_t window = 0);

// Messages named by the config's inputs, in order: directories as maildirs,
// "-" or no input as stdin, files as eml or mbox (by --format, else by a
// leading "From " line).
MessageSource open_source(const ScanConfig& config);

}  // namespace refmail::service
