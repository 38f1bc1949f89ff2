// Copyright 2026 The agentpath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <memory>
#include <string>
#include <string_view>
#include <thread>

#include <httplib.h>

#include "agentpath/error.hpp"
#include "agentpath/harness.hpp"

namespace agentpath {

/// Talks to an agent process over its standard streams: one JSON document
/// per line in each direction.
class ProcessConnector final : public Connector {
 public:
  explicit ProcessConnector(const std::string& command) {
    // Writes to a dead agent must surface as errors, not kill the evaluator.
    ::signal(SIGPIPE, SIG_IGN);

    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
      throw Error(ErrorCode::ConnectorFailure, std::string("pipe: ") + std::strerror(errno));
    }
    pid_ = ::fork();
    if (pid_ < 0) throw Error(ErrorCode::ConnectorFailure, std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
  }

  ProcessConnector(const ProcessConnector&) = delete;
  ProcessConnector& operator=(const ProcessConnector&) = delete;

  ~ProcessConnector() override {
    if (write_fd_ >= 0) ::close(write_fd_);
    if (read_fd_ >= 0) ::close(read_fd_);
    if (pid_ > 0) {
      for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
    }
  }

  Json exchange(const Json& request, std::chrono::milliseconds timeout) override {
    write_all(request.dump() + "\n");
    const std::string line = read_line(timeout);
    Json reply = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (reply.is_discarded()) throw Error(ErrorCode::ProtocolError, "agent reply is not JSON");
    return reply;
  }

 private:
  void write_all(std::string_view data) {
    while (!data.empty()) {
      const ssize_t n = ::write(write_fd_, data.data(), data.size());
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::ConnectorFailure, std::string("write to agent: ") + std::strerror(errno));
      }
      data.remove_prefix(static_cast<std::size_t>(n));
    }
  }

  std::string read_line(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw Error(ErrorCode::ConnectorTimeout, "agent did not reply in time");
      pollfd pfd{read_fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (ready < 0 && errno == EINTR) continue;
      if (ready == 0) throw Error(ErrorCode::ConnectorTimeout, "agent did not reply in time");
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) throw Error(ErrorCode::ConnectorFailure, "agent closed its output");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  std::string buffer_;
};

/// Posts each request to an HTTP endpoint; the response body is the reply.
class HttpConnector final : public Connector {
 public:
  explicit HttpConnector(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorCode::ConnectorFailure, "bad url " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    base_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
  }

  Json exchange(const Json& request, std::chrono::milliseconds timeout) override {
    httplib::Client client(base_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    client.set_connection_timeout(secs.count(), usecs.count());
    auto res = client.Post(path_, request.dump(), "application/json");
    if (!res) {
      if (res.error() == httplib::Error::Read) {
        throw Error(ErrorCode::ConnectorTimeout, "no reply from " + base_ + path_);
      }
      throw Error(ErrorCode::ConnectorFailure, "request to " + base_ + path_ + " failed: " +
                                                   httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw Error(ErrorCode::ProtocolError, "agent answered HTTP " + std::to_string(res->status));
    }
    Json reply = Json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (reply.is_discarded()) throw Error(ErrorCode::ProtocolError, "agent reply is not JSON");
    return reply;
  }

 private:
  std::string base_;
  std::string path_;
};

/// URLs select the HTTP mode; anything else is run as a shell command.
inline ConnectorFactory connector_factory(const std::string& endpoint) {
  if (endpoint.rfind("http://", 0) == 0 || endpoint.rfind("https://", 0) == 0) {
    return [endpoint] { return std::make_unique<HttpConnector>(endpoint); };
  }
  return [endpoint] { return std::make_unique<ProcessConnector>(endpoint); };
}

}  // namespace agentpath
