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
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace refmail {

using Json = nlohmann::json;

// One JSON object per line in each direction. Responses are matched to
// requests by their "id" field; stale responses (from a request that already
// timed out) are discarded.
class JsonLineTransport {
 public:
  virtual ~JsonLineTransport() = default;

  // Returns nullopt on timeout, I/O failure or malformed response; `error`
  // (when non-null) receives a short reason.
  virtual std::optional<Json> call(const Json& request, std::chrono::milliseconds deadline,
                                   std::string* error) = 0;
};

// Shared implementation over a pair of file descriptors.
class FdJsonLineTransport : public JsonLineTransport {
 public:
  FdJsonLineTransport(const FdJsonLineTransport&) = delete;
  FdJsonLineTransport& operator=(const FdJsonLineTransport&) = delete;
  ~FdJsonLineTransport() override;

  std::optional<Json> call(const Json& request, std::chrono::milliseconds deadline,
                           std::string* error) override;

 protected:
  FdJsonLineTransport(int read_fd, int write_fd);
  void close_fds();

 private:
  bool write_all(std::string_view data, std::string* error);

  std::mutex mu_;
  int read_fd_ = -1;
  int write_fd_ = -1;
  std::string buffer_;
  bool broken_ = false;
};

// Spawns `/bin/sh -c command` and talks to it over stdin/stdout.
class ProcessTransport final : public FdJsonLineTransport {
 public:
  ~ProcessTransport() override;

 private:
  ProcessTransport(int read_fd, int write_fd, int pid);
  int pid_ = -1;

  friend std::unique_ptr<ProcessTransport> spawn_process(const std::string& command);
};

// Connects to a local stream socket.
class UnixSocketTransport final : public FdJsonLineTransport {
 private:
  explicit UnixSocketTransport(int fd);
  friend std::unique_ptr<UnixSocketTransport> connect_unix(const std::string& path);
};

// Both throw std::runtime_error when the channel cannot be opened.
std::unique_ptr<ProcessTransport> spawn_process(const std::string& command);
std::unique_ptr<UnixSocketTransport> connect_unix(const std::string& path);

// Endpoint syntax: "exec:<shell command>" or "unix:<socket path>".
// Throws std::runtime_error if the endpoint cannot be opened.
std::unique_ptr<JsonLineTransport> open_endpoint(std::string_view endpoint);

std::string next_request_id();

}  // namespace refmail
