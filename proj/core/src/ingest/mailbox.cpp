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

#include "refmail/ingest/mailbox.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "refmail/util/text.hpp"

namespace refmail::ingest {

namespace fs = std::filesystem;

InputFormat parse_input_format(std::string_view name) {
  const std::string n = text::ascii_lower(name);
  if (n == "eml") return InputFormat::kEml;
  if (n == "mbox") return InputFormat::kMbox;
  if (n == "maildir") return InputFormat::kMaildir;
  if (n == "stream") return InputFormat::kStream;
  throw std::invalid_argument("unknown input format: " + std::string(name));
}

std::string_view to_string(InputFormat format) {
  switch (format) {
    case InputFormat::kEml: return "eml";
    case InputFormat::kMbox: return "mbox";
    case InputFormat::kMaildir: return "maildir";
    case InputFormat::kStream: return "stream";
  }
  return "eml";
}

RawEmail read_eml_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw std::runtime_error("read error on " + path.string());
  return RawEmail{buf.str(), path.string()};
}

std::vector<fs::path> list_maildir(const fs::path& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  const bool is_maildir = fs::is_directory(dir / "cur", ec) || fs::is_directory(dir / "new", ec);
  const auto collect = [&](const fs::path& d) {
    std::error_code iter_ec;
    for (fs::directory_iterator it(d, iter_ec), end; !iter_ec && it != end; it.increment(iter_ec)) {
      const auto name = it->path().filename().string();
      if (!name.empty() && name[0] == '.') continue;
      if (it->is_regular_file(iter_ec)) files.push_back(it->path());
    }
  };
  if (is_maildir) {
    for (const char* sub : {"cur", "new"})
      if (fs::is_directory(dir / sub, ec)) collect(dir / sub);
  } else if (fs::is_directory(dir, ec)) {
    collect(dir);
  } else {
    throw std::runtime_error("not a directory: " + dir.string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

MboxReader::MboxReader(std::istream& in, std::string source_prefix, std::size_t max_message_size)
    : in_(in), prefix_(std::move(source_prefix)), max_size_(max_message_size) {}

namespace {

bool is_from_line(std::string_view line) { return line.rfind("From ", 0) == 0; }

// mboxrd: ">From ", ">>From ", ... lose one '>'.
std::string_view unquote_from(std::string_view line) {
  std::size_t k = 0;
  while (k < line.size() && line[k] == '>') ++k;
  if (k > 0 && line.substr(k).rfind("From ", 0) == 0) return line.substr(1);
  return line;
}

}  // namespace

std::optional<MboxReader::Message> MboxReader::next() {
  if (eof_) return std::nullopt;
  Message msg;
  std::string& bytes = msg.raw.bytes;
  std::string line;
  bool have_content = false;
  bool prev_blank = true;
  std::size_t trailing_blank = 0;

  // Skip the leading envelope line if present.
  if (!started_) {
    started_ = true;
    if (std::getline(in_, line)) {
      if (!is_from_line(line)) {
        pending_from_line_ = line;
      }
    } else {
      eof_ = true;
      return std::nullopt;
    }
  }

  const auto append = [&](std::string_view l) {
    if (msg.oversize) return;
    if (bytes.size() + l.size() + 1 > max_size_) {
      msg.oversize = true;
      bytes.clear();
      bytes.shrink_to_fit();
      return;
    }
    bytes.append(l);
    bytes.push_back('\n');
  };

  if (pending_from_line_) {
    const std::string first = std::move(*pending_from_line_);
    pending_from_line_.reset();
    append(unquote_from(first));
    have_content = true;
    prev_blank = text::trim(first).empty();
  }

  while (std::getline(in_, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_from_line(line) && prev_blank && have_content) {
      // Boundary: drop the blank separator line(s) that precede it.
      if (!msg.oversize && trailing_blank > 0 && bytes.size() >= trailing_blank)
        bytes.resize(bytes.size() - trailing_blank);
      msg.raw.source_id = prefix_ + "#" + std::to_string(index_++);
      return msg;
    }
    if (is_from_line(line) && !have_content) continue;
    append(unquote_from(line));
    have_content = true;
    prev_blank = line.empty();
    trailing_blank = line.empty() ? trailing_blank + 1 : 0;
  }
  eof_ = true;
  if (!have_content) return std::nullopt;
  if (!msg.oversize && trailing_blank > 0 && bytes.size() >= trailing_blank)
    bytes.resize(bytes.size() - trailing_blank);
  msg.raw.source_id = prefix_ + "#" + std::to_string(index_++);
  return msg;
}

}  // namespace refmail::ingest
