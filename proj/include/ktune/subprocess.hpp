// Copyright 2026 The ktune Authors.
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

#include <optional>
#include <string>
#include <sys/types.h>

namespace ktune {

// A child process started through `/bin/sh -c`, whose stdin and stdout are
// one end of a socket pair. stderr is inherited. Killing the handle kills
// the whole process group.
class Subprocess {
 public:
  enum class ReadStatus { kLine, kTimeout, kEof };

  static Subprocess spawn(const std::string& command);

  Subprocess(Subprocess&& other) noexcept;
  Subprocess& operator=(Subprocess&& other) noexcept;
  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;
  ~Subprocess();

  // Returns false if the peer is gone.
  bool write_line(const std::string& line);
  // Reads one '\n'-terminated line (terminator stripped). A negative timeout
  // waits forever.
  ReadStatus read_line(std::string& line, int timeout_ms);
  // Waits up to `timeout_ms` for exit; returns the exit status (128+signal
  // for signalled children) or nullopt if still running.
  std::optional<int> wait(int timeout_ms);
  void kill();
  bool running() const { return pid_ > 0 && !exit_status_; }
  pid_t pid() const { return pid_; }

 private:
  Subprocess() = default;
  void reset();

  pid_t pid_ = -1;
  int fd_ = -1;
  std::string buffer_;
  std::optional<int> exit_status_;
};

}  // namespace ktune
