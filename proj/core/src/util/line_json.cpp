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

#include "refmail/util/line_json.hpp"

#include <atomic>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <stdexcept>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace refmail {

namespace {

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

}  // namespace

FdJsonLineTransport::FdJsonLineTransport(int read_fd, int write_fd)
    : read_fd_(read_fd), write_fd_(write_fd) {
  ignore_sigpipe();
}

FdJsonLineTransport::~FdJsonLineTransport() { close_fds(); }

void FdJsonLineTransport::close_fds() {
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  if (read_fd_ >= 0) ::close(read_fd_);
  read_fd_ = write_fd_ = -1;
}

bool FdJsonLineTransport::write_all(std::string_view data, std::string* error) {
  while (!data.empty()) {
    const ssize_t n = ::write(write_fd_, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      if (error) *error = errno_text("write");
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

std::optional<Json> FdJsonLineTransport::call(const Json& request,
                                              std::chrono::milliseconds deadline,
                                              std::string* error) {
  using Clock = std::chrono::steady_clock;
  std::lock_guard lock(mu_);
  if (broken_ || read_fd_ < 0) {
    if (error) *error = "adapter channel closed";
    return std::nullopt;
  }
  const std::string id = request.value("id", std::string());
  if (!write_all(request.dump() + "\n", error)) {
    broken_ = true;
    return std::nullopt;
  }

  const auto until = Clock::now() + deadline;
  while (true) {
    for (auto nl = buffer_.find('\n'); nl != std::string::npos; nl = buffer_.find('\n')) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (line.empty()) continue;
      Json response = Json::parse(line, nullptr, /*allow_exceptions=*/false);
      if (response.is_discarded() || !response.is_object()) {
        if (error) *error = "protocol error: malformed response line";
        return std::nullopt;
      }
      const auto it = response.find("id");
      if (it != response.end() && it->is_string() && it->get<std::string>() == id) return response;
      // Response to an earlier, abandoned request.
    }

    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(until - Clock::now());
    if (remaining.count() <= 0) {
      if (error) *error = "timeout after " + std::to_string(deadline.count()) + " ms";
      return std::nullopt;
    }
    pollfd pfd{read_fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      if (error) *error = errno_text("poll");
      return std::nullopt;
    }
    if (rc == 0) continue;
    char chunk[8192];
    const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      if (error) *error = errno_text("read");
      broken_ = true;
      return std::nullopt;
    }
    if (n == 0) {
      if (error) *error = "adapter closed its output";
      broken_ = true;
      return std::nullopt;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::unique_ptr<ProcessTransport> spawn_process(const std::string& command) {
  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw std::runtime_error(errno_text("pipe"));
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw std::runtime_error(errno_text("pipe"));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);

  const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
  pid_t pid = -1;
  const int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char* const*>(argv),
                             environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(to_child[0]);
  ::close(from_child[1]);
  if (rc != 0) {
    ::close(to_child[1]);
    ::close(from_child[0]);
    throw std::runtime_error("posix_spawn failed: " + std::string(std::strerror(rc)));
  }
  return std::unique_ptr<ProcessTransport>(new ProcessTransport(from_child[0], to_child[1], pid));
}

ProcessTransport::ProcessTransport(int read_fd, int write_fd, int pid)
    : FdJsonLineTransport(read_fd, write_fd), pid_(pid) {}

ProcessTransport::~ProcessTransport() {
  close_fds();
  if (pid_ > 0) {
    // Give the child a moment to exit on EOF before killing it.
    for (int i = 0; i < 20; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
      ::usleep(5000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }
}

std::unique_ptr<UnixSocketTransport> connect_unix(const std::string& path) {
  sockaddr_un addr{};
  if (path.size() >= sizeof addr.sun_path) throw std::runtime_error("socket path too long: " + path);
  const int fd = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw std::runtime_error(errno_text("socket"));
  addr.sun_family = AF_UNIX;
  std::memcpy(addr.sun_path, path.data(), path.size());
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string msg = errno_text(("connect " + path).c_str());
    ::close(fd);
    throw std::runtime_error(msg);
  }
  return std::unique_ptr<UnixSocketTransport>(new UnixSocketTransport(fd));
}

UnixSocketTransport::UnixSocketTransport(int fd) : FdJsonLineTransport(fd, fd) {}

std::unique_ptr<JsonLineTransport> open_endpoint(std::string_view endpoint) {
  if (endpoint.rfind("exec:", 0) == 0) return spawn_process(std::string(endpoint.substr(5)));
  if (endpoint.rfind("unix:", 0) == 0) return connect_unix(std::string(endpoint.substr(5)));
  throw std::runtime_error("unsupported adapter endpoint (want exec:<cmd> or unix:<path>): " +
                           std::string(endpoint));
}

std::string next_request_id() {
  static std::atomic<unsigned long long> counter{0};
  return "r" + std::to_string(counter.fetch_add(1) + 1);
}

}  // namespace refmail
