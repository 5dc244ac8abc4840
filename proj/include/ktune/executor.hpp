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
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ktune/configspace.hpp"
#include "ktune/value.hpp"

namespace ktune {

// Repetition plan for one evaluation.
struct EvalPlan {
  int warmups = 3;
  int reps = 10;
  int timeout_ms = 2000;
};

// One successful empirical evaluation. Compile time and run time are kept
// apart; wall_ms covers everything the evaluation cost, including overhead.
class Measurement {
 public:
  Measurement(double compile_ms, std::vector<double> latencies_ms, int warmups,
              double wall_ms);

  double compile_ms() const { return compile_ms_; }
  const std::vector<double>& latencies_ms() const { return latencies_ms_; }
  int warmups() const { return warmups_; }
  int reps() const { return static_cast<int>(latencies_ms_.size()); }
  double median_ms() const { return median_ms_; }
  double run_ms() const;
  double wall_ms() const { return wall_ms_; }

  nlohmann::json to_json() const;
  static Measurement from_json(const nlohmann::json& j);

 private:
  double compile_ms_;
  std::vector<double> latencies_ms_;
  int warmups_;
  double median_ms_;
  double wall_ms_;
};

double median(std::vector<double> xs);

struct Ok {
  Measurement measurement;
};
// The config cannot run on this platform (resource limits, platform rules).
struct Invalid {
  std::string reason;
  double wall_ms = 0.0;
};
// Crash, timeout or protocol breach. Transient failures may be retried.
struct Failure {
  std::string reason;
  bool transient = false;
  double wall_ms = 0.0;
};

using EvalOutcome = std::variant<Ok, Invalid, Failure>;

inline bool is_ok(const EvalOutcome& o) { return std::holds_alternative<Ok>(o); }
double wall_ms(const EvalOutcome& o);
std::string describe(const EvalOutcome& o);
nlohmann::json to_json(const EvalOutcome& o);
EvalOutcome outcome_from_json(const nlohmann::json& j);

// Everything a tuning result depends on. Two fingerprints are equal iff all
// fields are equal.
struct EnvFingerprint {
  std::string device_name;
  std::string driver_version;
  std::string toolchain_version;
  std::string runner_id;
  std::string runner_version;
  std::string kernel_source_digest;
  std::string space_digest;
  int protocol_version = 0;

  // Field names in wire order.
  static const std::vector<std::string>& field_names();

  nlohmann::json to_json() const;
  // Throws ProtocolError naming the first missing or empty field.
  static EnvFingerprint from_json(const nlohmann::json& j);
  std::string digest() const;

  friend bool operator==(const EnvFingerprint&, const EnvFingerprint&) = default;
};

// Anything that can empirically evaluate a config for a shape. An instance
// drives one device and is not thread-safe.
class Evaluator {
 public:
  virtual ~Evaluator() = default;

  virtual const EnvFingerprint& fingerprint() const = 0;
  virtual EvalOutcome evaluate(const KernelConfig& config, const ShapeKey& shape,
                               const EvalPlan& plan) = 0;
  // Number of evaluate() calls served so far.
  virtual std::uint64_t evaluations() const = 0;
};

}  // namespace ktune
