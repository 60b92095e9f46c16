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

#include "refmail/service/pipeline.hpp"

#include <condition_variable>
#include <deque>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "refmail/ingest/mailbox.hpp"

namespace refmail::service {

namespace fs = std::filesystem;

PipelineStats run_pipeline(const Scanner& scanner, const MessageSource& source,
                           const VerdictSink& sink, std::size_t workers, std::size_t window) {
  if (workers == 0) workers = 1;
  if (window == 0) window = workers * 2;

  std::mutex mu;
  std::condition_variable cv_jobs, cv_done, cv_slots;
  std::deque<std::pair<std::size_t, SourceItem>> jobs;
  std::map<std::size_t, verdict::Verdict> done;
  std::size_t in_flight = 0, next_write = 0, total = 0;
  bool input_finished = false, abort = false;
  std::exception_ptr failure;
  PipelineStats stats;

  auto worker = [&] {
    for (;;) {
      std::pair<std::size_t, SourceItem> job;
      {
        std::unique_lock lock(mu);
        cv_jobs.wait(lock, [&] { return !jobs.empty() || input_finished || abort; });
        if (abort || jobs.empty()) return;
        job = std::move(jobs.front());
        jobs.pop_front();
      }
      const SourceItem& item = job.second;
      verdict::Verdict v;
      try {
        if (item.error) v = scanner.unreadable(item.raw.source_id, *item.error);
        else if (item.oversize) v = scanner.oversize(item.raw.source_id, item.size);
        else v = scanner.scan(item.raw);
      } catch (const std::exception& e) {
        v = scanner.unreadable(item.raw.source_id, std::string("scan failed: ") + e.what());
      }
      {
        std::lock_guard lock(mu);
        done.emplace(job.first, std::move(v));
      }
      cv_done.notify_one();
    }
  };

  auto writer = [&] {
    for (;;) {
      verdict::Verdict v;
      {
        std::unique_lock lock(mu);
        cv_done.wait(lock, [&] {
          return abort || done.count(next_write) || (input_finished && next_write == total);
        });
        if (abort || (input_finished && next_write == total && !done.count(next_write))) return;
        auto it = done.find(next_write);
        v = std::move(it->second);
        done.erase(it);
      }
      try {
        sink(v);
      } catch (...) {
        std::lock_guard lock(mu);
        failure = std::current_exception();
        abort = true;
        cv_jobs.notify_all();
        cv_slots.notify_all();
        return;
      }
      {
        std::lock_guard lock(mu);
        ++next_write;
        --in_flight;
        ++stats.messages;
        if (v.decision == verdict::Decision::kPhishing) ++stats.phishing;
      }
      cv_slots.notify_one();
      cv_done.notify_all();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  std::thread out(writer);

  std::exception_ptr read_failure;
  try {
    for (std::size_t index = 0;; ++index) {
      {
        std::unique_lock lock(mu);
        cv_slots.wait(lock, [&] { return in_flight < window || abort; });
        if (abort) break;
      }
      auto item = source();
      if (!item) break;
      {
        std::lock_guard lock(mu);
        jobs.emplace_back(index, std::move(*item));
        ++in_flight;
        ++total;
        if (in_flight > stats.max_in_flight) stats.max_in_flight = in_flight;
      }
      cv_jobs.notify_one();
    }
  } catch (...) {
    read_failure = std::current_exception();
  }
  {
    std::lock_guard lock(mu);
    input_finished = true;
    if (read_failure) abort = true;
  }
  cv_jobs.notify_all();
  cv_done.notify_all();
  for (auto& t : pool) t.join();
  cv_done.notify_all();
  out.join();
  if (failure) std::rethrow_exception(failure);
  if (read_failure) std::rethrow_exception(read_failure);
  return stats;
}

namespace {

class FileSource {
 public:
  explicit FileSource(const ScanConfig& c) : config_(c) {
    for (const auto& in : c.inputs) pending_.push_back(in);
    if (pending_.empty()) pending_.push_back("-");
  }

  std::optional<SourceItem> next() {
    for (;;) {
      if (mbox_) {
        if (auto m = mbox_->next()) {
          SourceItem item;
          item.size = m->raw.bytes.size();
          item.raw = std::move(m->raw);
          item.oversize = m->oversize;
          if (item.oversize) item.raw.bytes.clear();
          return item;
        }
        mbox_.reset();
        stream_.reset();
      }
      if (!files_.empty()) {
        auto p = std::move(files_.front());
        files_.pop_front();
        return read_file(p);
      }
      if (pending_.empty()) return std::nullopt;
      const std::string input = std::move(pending_.front());
      pending_.pop_front();
      if (auto item = open_input(input)) return item;
    }
  }

 private:
  std::optional<SourceItem> open_input(const std::string& input) {
    using ingest::InputFormat;
    if (input == "-") {
      mbox_ = std::make_unique<ingest::MboxReader>(std::cin, "stdin", config_.max_message_size);
      return std::nullopt;
    }
    std::error_code ec;
    const bool dir = fs::is_directory(input, ec);
    if (dir || config_.format == InputFormat::kMaildir) {
      if (!dir) return error_item(input, "not a directory");
      for (auto& f : ingest::list_maildir(input)) files_.push_back(f.string());
      return std::nullopt;
    }
    bool mbox = config_.format == InputFormat::kMbox || config_.format == InputFormat::kStream;
    if (!config_.format) {
      std::ifstream probe(input, std::ios::binary);
      char head[5] = {};
      probe.read(head, 5);
      mbox = probe.gcount() == 5 && std::string_view(head, 5) == "From ";
    }
    if (mbox) {
      auto f = std::make_unique<std::ifstream>(input, std::ios::binary);
      if (!*f) return error_item(input, "cannot open");
      mbox_ = std::make_unique<ingest::MboxReader>(*f, input, config_.max_message_size);
      stream_ = std::move(f);
      return std::nullopt;
    }
    return read_file(input);
  }

  std::optional<SourceItem> read_file(const std::string& path) {
    std::error_code ec;
    const auto size = fs::file_size(path, ec);
    if (ec) return error_item(path, ec.message());
    if (size > config_.max_message_size) {
      SourceItem item;
      item.raw.source_id = path;
      item.oversize = true;
      item.size = size;
      return item;
    }
    try {
      SourceItem item;
      item.raw = ingest::read_eml_file(path);
      item.size = item.raw.bytes.size();
      return item;
    } catch (const std::exception& e) {
      return error_item(path, e.what());
    }
  }

  static SourceItem error_item(const std::string& id, const std::string& why) {
    SourceItem item;
    item.raw.source_id = id;
    item.error = why;
    return item;
  }

  ScanConfig config_;
  std::deque<std::string> pending_;
  std::deque<std::string> files_;
  std::unique_ptr<std::istream> stream_;
  std::unique_ptr<ingest::MboxReader> mbox_;
};

}  // namespace

MessageSource open_source(const ScanConfig& config) {
  auto src = std::make_shared<FileSource>(config);
  return [src] { return src->next(); };
}

}  // namespace refmail::service
