// Copyright 2026 The PointCert Authors.
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

#include "pointcert/external.hpp"

#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "pointcert/errors.hpp"

extern char** environ;

namespace pointcert {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

ExternalProcess::ExternalProcess(const std::string& command,
                                 std::chrono::milliseconds timeout)
    : command_(command), timeout_(timeout) {
  // A socket pair instead of two pipes: send() with MSG_NOSIGNAL reports a
  // dead child as EPIPE rather than raising SIGPIPE in this process.
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw ClassifierBackendError("socketpair failed: " +
                                 std::string(std::strerror(errno)));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);

  // Own process group, so the shell and everything it starts die together.
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
  pid_t pid = -1;
  const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, &attr,
                               const_cast<char* const*>(argv), environ);
  posix_spawnattr_destroy(&attr);
  posix_spawn_file_actions_destroy(&actions);
  ::close(fds[1]);
  if (rc != 0) {
    ::close(fds[0]);
    throw ClassifierBackendError("cannot spawn '" + command +
                                 "': " + std::strerror(rc));
  }
  fd_ = fds[0];
  pid_ = pid;
}

ExternalProcess::~ExternalProcess() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_WR);
  }
  if (pid_ > 0) {
    int status = 0;
    const auto deadline = Clock::now() + std::chrono::milliseconds(500);
    while (::waitpid(pid_, &status, WNOHANG) == 0) {
      if (Clock::now() >= deadline) {
        ::kill(-pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    // Stragglers left by the shell.
    ::kill(-pid_, SIGKILL);
  }
  if (fd_ >= 0) ::close(fd_);
}

void ExternalProcess::send_line(const std::string& line) {
  std::string data = line;
  data.push_back('\n');
  std::size_t off = 0;
  while (off < data.size()) {
    const auto n =
        ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ClassifierBackendError("write to backend '" + command_ +
                                   "' failed: " + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string ExternalProcess::read_line() {
  const auto deadline = Clock::now() + timeout_;
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (left.count() <= 0) {
      throw ClassifierBackendError("backend '" + command_ + "' timed out after " +
                                   std::to_string(timeout_.count()) + " ms");
    }
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw ClassifierBackendError("poll failed: " +
                                   std::string(std::strerror(errno)));
    }
    if (ready == 0) continue;
    char chunk[65536];
    const auto n = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ClassifierBackendError("read from backend failed: " +
                                   std::string(std::strerror(errno)));
    }
    if (n == 0) {
      throw ClassifierBackendError("backend '" + command_ +
                                   "' closed its output");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

namespace {

json parse_line(const ExternalProcess& proc, const std::string& line) {
  try {
    auto doc = json::parse(line);
    if (!doc.is_object()) throw ClassifierBackendError("not a JSON object");
    return doc;
  } catch (const json::exception& e) {
    throw ClassifierBackendError("backend '" + proc.command() +
                                 "' sent malformed JSON: " + e.what());
  }
}

}  // namespace

std::optional<std::size_t> read_hello(ExternalProcess& proc) {
  const auto doc = parse_line(proc, proc.read_line());
  if (doc.value("type", "") != "hello") {
    throw ClassifierBackendError("backend '" + proc.command() +
                                 "' did not start with a hello line");
  }
  const auto version = doc.find("protocol");
  if (version == doc.end() || !version->is_number_integer() ||
      version->get<int>() != kProtocolVersion) {
    throw ClassifierBackendError("backend '" + proc.command() +
                                 "' speaks an unsupported protocol version");
  }
  const auto classes = doc.find("classes");
  if (classes == doc.end()) return std::nullopt;
  if (!classes->is_number_unsigned()) {
    throw ClassifierBackendError("hello 'classes' must be a positive integer");
  }
  return classes->get<std::size_t>();
}

json round_trip(ExternalProcess& proc, const json& request,
                const std::string& expected_type) {
  proc.send_line(request.dump());
  const auto doc = parse_line(proc, proc.read_line());
  const auto id = request.at("id").get<std::uint64_t>();
  const auto rid = doc.find("id");
  if (rid == doc.end() || !rid->is_number_unsigned() ||
      rid->get<std::uint64_t>() != id) {
    throw ClassifierBackendError("backend '" + proc.command() +
                                 "' answered request " + std::to_string(id) +
                                 " with a different id");
  }
  const std::string type = doc.value("type", "");
  if (type == "error") {
    throw ClassifierBackendError("backend '" + proc.command() +
                                 "' reported: " + doc.value("message", "?"));
  }
  if (type != expected_type) {
    throw ClassifierBackendError("backend '" + proc.command() +
                                 "' sent response type '" + type +
                                 "', expected '" + expected_type + "'");
  }
  return doc;
}

json points_to_json(const PointCloud& cloud) {
  json points = json::array();
  for (const auto& p : cloud.points()) {
    points.push_back(std::vector<double>(p.coords().begin(), p.coords().end()));
  }
  return points;
}

PointCloud points_from_json(const json& points) {
  if (!points.is_array()) {
    throw ClassifierBackendError("'points' must be an array");
  }
  std::vector<Point> out;
  out.reserve(points.size());
  try {
    for (const auto& coords : points) {
      out.emplace_back(coords.get<std::vector<double>>());
    }
    return PointCloud(std::move(out));
  } catch (const json::exception& e) {
    throw ClassifierBackendError(std::string("malformed point array: ") +
                                 e.what());
  } catch (const Error& e) {
    throw ClassifierBackendError(std::string("invalid points: ") + e.what());
  }
}

ExternalClassifier::ExternalClassifier(std::string command,
                                       std::size_t classes,
                                       std::chrono::milliseconds timeout)
    : classes_(classes),
      proc_(std::make_unique<ExternalProcess>(command, timeout)) {
  const auto advertised = read_hello(*proc_);
  if (!advertised) {
    throw ClassifierBackendError("backend '" + command +
                                 "' did not advertise a class count");
  }
  if (*advertised != classes) {
    throw ClassifierBackendError(
        "backend '" + command + "' advertises " + std::to_string(*advertised) +
        " classes, expected " + std::to_string(classes));
  }
}

std::string ExternalClassifier::describe() const {
  return "external:" + proc_->command();
}

Label ExternalClassifier::do_classify(const PointCloud& cloud) const {
  std::lock_guard lock(mutex_);
  const std::uint64_t id = next_id_++;
  const json request = {
      {"type", "predict"}, {"id", id}, {"points", points_to_json(cloud)}};
  const auto doc = round_trip(*proc_, request, "label");
  const auto label = doc.find("label");
  if (label == doc.end() || !label->is_number_integer()) {
    throw ClassifierBackendError("label response without integer 'label'");
  }
  return Label(label->get<int>());
}

std::shared_ptr<ExternalClassifier> open_external(
    const std::string& command, std::size_t classes,
    std::chrono::milliseconds timeout) {
  return std::make_shared<ExternalClassifier>(command, classes, timeout);
}

}  // namespace pointcert
