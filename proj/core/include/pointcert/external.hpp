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

#pragma once

// Client side of the newline-delimited JSON protocol spoken by external
// classifier and completion processes over their stdin/stdout:
//
//   child -> {"type":"hello","protocol":1,"classes":<c>}      (first line)
//   parent -> {"type":"predict","id":<u64>,"points":[[...],...]}
//   child -> {"type":"label","id":<u64>,"label":<1..c>}
//   parent -> {"type":"complete","id":<u64>,"points":[[...],...]}
//   child -> {"type":"points","id":<u64>,"points":[[...],...]}
//   child -> {"type":"error","id":<u64>,"message":"..."}     (either request)
//
// Exactly one response per request, ids echo, unknown fields are ignored.

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "pointcert/classifier.hpp"

namespace pointcert {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::chrono::milliseconds kDefaultBackendTimeout{30'000};

/// A child process running `/bin/sh -c command` whose stdin and stdout are
/// connected to this process. Killed and reaped on destruction.
class ExternalProcess {
 public:
  ExternalProcess(const std::string& command,
                  std::chrono::milliseconds timeout);
  ~ExternalProcess();

  ExternalProcess(const ExternalProcess&) = delete;
  ExternalProcess& operator=(const ExternalProcess&) = delete;

  /// Writes `line` plus '\n'. Throws ClassifierBackendError if the child is gone.
  void send_line(const std::string& line);
  /// Next line without its '\n'. Throws ClassifierBackendError on EOF or timeout.
  std::string read_line();

  const std::string& command() const { return command_; }

 private:
  std::string command_;
  std::chrono::milliseconds timeout_;
  int fd_ = -1;
  int pid_ = -1;
  std::string buffer_;
};

/// Reads and validates the hello line; returns the advertised class count
/// (nullopt when the backend omits it).
std::optional<std::size_t> read_hello(ExternalProcess& proc);

/// Sends one request and returns its validated response object
/// ({"type": expected_type, "id": id, ...}). Error responses and protocol
/// violations throw ClassifierBackendError.
nlohmann::json round_trip(ExternalProcess& proc, const nlohmann::json& request,
                          const std::string& expected_type);

nlohmann::json points_to_json(const PointCloud& cloud);
/// Throws ClassifierBackendError on malformed point arrays.
PointCloud points_from_json(const nlohmann::json& points);

/// One protocol session against an external classifier. Requests on a
/// session are serialized; open several sessions for concurrency.
class ExternalClassifier final : public Classifier {
 public:
  ExternalClassifier(std::string command, std::size_t classes,
                     std::chrono::milliseconds timeout = kDefaultBackendTimeout);

  std::size_t classes() const override { return classes_; }
  std::string describe() const override;

 private:
  Label do_classify(const PointCloud& cloud) const override;

  std::size_t classes_;
  mutable std::mutex mutex_;
  mutable std::unique_ptr<ExternalProcess> proc_;
  mutable std::uint64_t next_id_ = 1;
};

/// Spawns `command`, performs the handshake and checks that the advertised
/// class count equals `classes`. Throws ClassifierBackendError on mismatch.
std::shared_ptr<ExternalClassifier> open_external(
    const std::string& command, std::size_t classes,
    std::chrono::milliseconds timeout = kDefaultBackendTimeout);

}  // namespace pointcert
