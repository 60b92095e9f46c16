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
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "refmail/ingest/email.hpp"

namespace refmail::ingest {

enum class InputFormat { kEml, kMbox, kMaildir, kStream };

InputFormat parse_input_format(std::string_view name);
std::string_view to_string(InputFormat format);

// Throws std::runtime_error if the file cannot be read.
RawEmail read_eml_file(const std::filesystem::path& path);

// Messages of a maildir (`cur/` and `new/`, or a flat directory of files),
// sorted by path so scans are reproducible.
std::vector<std::filesystem::path> list_maildir(const std::filesystem::path& dir);

// Splits an mbox stream into messages one at a time, so memory stays bounded
// by `max_message_size`. Handles mboxrd ">From " unquoting. Also used for
// the service stream format.
class MboxReader {
 public:
  struct Message {
    RawEmail raw;
    bool oversize = false;
  };

  MboxReader(std::istream& in, std::string source_prefix, std::size_t max_message_size);

  std::optional<Message> next();

 private:
  std::istream& in_;
  std::string prefix_;
  std::size_t max_size_;
  std::size_t index_ = 0;
  std::optional<std::string> pending_from_line_;
  bool started_ = false;
  bool eof_ = false;
};

}  // namespace refmail::ingest
