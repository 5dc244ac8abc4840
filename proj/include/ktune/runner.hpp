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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ktune/executor.hpp"
#include "ktune/subprocess.hpp"

namespace ktune {

// JSON Lines messages exchanged with a benchmark runner, one object per line:
//
//   -> {"type":"hello","protocol":1}
//   <- {"type":"hello","protocol":1,"fingerprint":{...},"capabilities":["evaluate"]}
//   -> {"type":"evaluate","config":{...},"shape":{...},"warmups":3,"reps":10}
//   <- {"type":"result","status":"ok","compile_ms":412.0,"latencies_ms":[...]}
//   <- {"type":"result","status":"invalid","reason":"..."}
//   <- {"type":"result","status":"error","reason":"..."}
//   -> {"type":"shutdown"}                      runner exits 0
//
// Unknown fields are ignored. An unknown `type` is a protocol error.
namespace protocol {

struct Hello {
  EnvFingerprint fingerprint;
  std::vector<std::string> capabilities;
};

// Fingerprint fields the runner must report. space_digest and
// protocol_version are owned by the framework.
const std::vector<std::string>& runner_fingerprint_fields();

nlohmann::json hello_request();
nlohmann::json hello_reply(const EnvFingerprint& fp,
                           const std::vector<std::string>& capabilities);
nlohmann::json evaluate_request(const KernelConfig& config, const ShapeKey& shape,
                                const EvalPlan& plan);
nlohmann::json result_reply(const EvalOutcome& outcome);
nlohmann::json shutdown_request();

// Throws VersionMismatchError or ProtocolError.
Hello parse_hello_reply(const std::string& line, const std::string& space_digest);
// Protocol breaches become Failure(transient=false).
EvalOutcome parse_result(const std::string& line, int expected_reps, int warmups,
                         double wall_ms);

// Runner side of the protocol on top of any Evaluator. Returns the process
// exit code: 0 after shutdown or end of input, 1 on a malformed request.
int serve(std::istream& in, std::ostream& out, Evaluator& evaluator);

}  // namespace protocol

// Evaluator backed by an external runner process.
//
// Evaluations are strictly serialized. A runner that times out, dies, or
// breaks the protocol is killed and transparently restarted before the next
// evaluation; a restarted runner must report the same fingerprint.
class RunnerEvaluator final : public Evaluator {
 public:
  struct Options {
    int handshake_timeout_ms = 10000;
    int shutdown_timeout_ms = 2000;
  };

  // Spawns `command` and performs the handshake. Throws ProtocolError
  // (VersionMismatchError for protocol disagreement) on failure.
  RunnerEvaluator(std::string command, std::string space_digest);
  RunnerEvaluator(std::string command, std::string space_digest, Options options);
  ~RunnerEvaluator() override;

  const EnvFingerprint& fingerprint() const override { return hello_.fingerprint; }
  const std::vector<std::string>& capabilities() const { return hello_.capabilities; }
  EvalOutcome evaluate(const KernelConfig& config, const ShapeKey& shape,
                       const EvalPlan& plan) override;
  std::uint64_t evaluations() const override { return evaluations_; }
  int restarts() const { return restarts_; }

  // Sends shutdown and reaps the runner; returns its exit status, or -1 if
  // it had to be killed.
  int shutdown();

 private:
  protocol::Hello handshake();
  EvalOutcome breach(const std::string& reason, bool transient, double wall_ms);

  std::string command_;
  std::string space_digest_;
  Options options_;
  Subprocess process_;
  protocol::Hello hello_;
  bool needs_restart_ = false;
  std::uint64_t evaluations_ = 0;
  int restarts_ = 0;
};

}  // namespace ktune
