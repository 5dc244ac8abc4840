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

#include "ktune/runner.hpp"

#include <chrono>
#include <iostream>

#include "ktune/digest.hpp"
#include "ktune/error.hpp"

namespace ktune {
namespace protocol {
namespace {

nlohmann::json parse_line(const std::string& line) {
  auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw ProtocolError("malformed JSON from runner: `" + line.substr(0, 120) + "`");
  }
  return j;
}

std::string type_of_message(const nlohmann::json& j) {
  auto it = j.find("type");
  if (it == j.end() || !it->is_string()) {
    throw ProtocolError("message has no string `type` field");
  }
  return it->get<std::string>();
}

}  // namespace

const std::vector<std::string>& runner_fingerprint_fields() {
  static const std::vector<std::string> kFields = {
      "device_name", "driver_version", "toolchain_version",
      "runner_id",   "runner_version", "kernel_source_digest"};
  return kFields;
}

nlohmann::json hello_request() { return {{"type", "hello"}, {"protocol", kProtocolVersion}}; }

nlohmann::json hello_reply(const EnvFingerprint& fp,
                           const std::vector<std::string>& capabilities) {
  return {{"type", "hello"},
          {"protocol", kProtocolVersion},
          {"fingerprint", fp.to_json()},
          {"capabilities", capabilities}};
}

nlohmann::json evaluate_request(const KernelConfig& config, const ShapeKey& shape,
                                const EvalPlan& plan) {
  return {{"type", "evaluate"},
          {"config", config.to_json()},
          {"shape", shape.to_json()},
          {"warmups", plan.warmups},
          {"reps", plan.reps}};
}

nlohmann::json result_reply(const EvalOutcome& outcome) {
  if (const auto* ok = std::get_if<Ok>(&outcome)) {
    return {{"type", "result"},
            {"status", "ok"},
            {"compile_ms", ok->measurement.compile_ms()},
            {"latencies_ms", ok->measurement.latencies_ms()}};
  }
  if (const auto* inv = std::get_if<Invalid>(&outcome)) {
    return {{"type", "result"}, {"status", "invalid"}, {"reason", inv->reason}};
  }
  return {{"type", "result"},
          {"status", "error"},
          {"reason", std::get<Failure>(outcome).reason}};
}

nlohmann::json shutdown_request() { return {{"type", "shutdown"}}; }

Hello parse_hello_reply(const std::string& line, const std::string& space_digest) {
  auto j = parse_line(line);
  auto type = type_of_message(j);
  if (type != "hello") {
    throw ProtocolError("expected hello reply, got type `" + type + "`");
  }
  auto proto = j.find("protocol");
  if (proto == j.end() || !proto->is_number_integer()) {
    throw ProtocolError("hello reply has no integer `protocol` field");
  }
  if (proto->get<int>() != kProtocolVersion) {
    throw VersionMismatchError("runner speaks protocol " +
                               std::to_string(proto->get<int>()) +
                               ", framework speaks protocol " +
                               std::to_string(kProtocolVersion));
  }
  auto fp = j.find("fingerprint");
  if (fp == j.end() || !fp->is_object()) {
    throw ProtocolError("hello reply has no `fingerprint` object");
  }
  nlohmann::json full = nlohmann::json::object();
  for (const auto& name : runner_fingerprint_fields()) {
    if (auto it = fp->find(name); it != fp->end()) full[name] = *it;
  }
  full["space_digest"] = space_digest;
  full["protocol_version"] = kProtocolVersion;

  Hello hello;
  hello.fingerprint = EnvFingerprint::from_json(full);
  if (auto caps = j.find("capabilities"); caps != j.end() && caps->is_array()) {
    for (const auto& c : *caps) {
      if (c.is_string()) hello.capabilities.push_back(c.get<std::string>());
    }
  }
  bool can_evaluate = false;
  for (const auto& c : hello.capabilities) can_evaluate |= c == "evaluate";
  if (!can_evaluate) {
    throw ProtocolError("runner does not advertise the `evaluate` capability");
  }
  return hello;
}

EvalOutcome parse_result(const std::string& line, int expected_reps, int warmups,
                         double wall_ms) {
  auto fail = [&](const std::string& why) { return Failure{why, false, wall_ms}; };
  nlohmann::json j;
  std::string type;
  try {
    j = parse_line(line);
    type = type_of_message(j);
  } catch (const ProtocolError& e) {
    return fail(e.what());
  }
  if (type != "result") return fail("unexpected message type `" + type + "`");
  auto status = j.find("status");
  if (status == j.end() || !status->is_string()) {
    return fail("result has no string `status`");
  }
  auto reason = [&] {
    auto r = j.find("reason");
    return r != j.end() && r->is_string() ? r->get<std::string>() : std::string("unspecified");
  };
  const auto s = status->get<std::string>();
  if (s == "invalid") return Invalid{reason(), wall_ms};
  if (s == "error") return Failure{"runner error: " + reason(), false, wall_ms};
  if (s != "ok") return fail("unknown result status `" + s + "`");

  auto compile = j.find("compile_ms");
  auto lats = j.find("latencies_ms");
  if (compile == j.end() || !compile->is_number() || compile->get<double>() < 0.0) {
    return fail("result has no non-negative `compile_ms`");
  }
  if (lats == j.end() || !lats->is_array()) return fail("result has no `latencies_ms` array");
  std::vector<double> latencies;
  for (const auto& l : *lats) {
    if (!l.is_number() || !(l.get<double>() > 0.0)) {
      return fail("latencies must be positive numbers");
    }
    latencies.push_back(l.get<double>());
  }
  if (static_cast<int>(latencies.size()) != expected_reps) {
    return fail("runner returned " + std::to_string(latencies.size()) +
                " latencies, expected " + std::to_string(expected_reps));
  }
  return Ok{Measurement(compile->get<double>(), std::move(latencies), warmups, wall_ms)};
}

int serve(std::istream& in, std::ostream& out, Evaluator& evaluator) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("type")) {
      std::cerr << "runner: malformed request\n";
      return 1;
    }
    const auto type = j["type"].get<std::string>();
    if (type == "hello") {
      out << hello_reply(evaluator.fingerprint(), {"evaluate"}).dump() << '\n';
    } else if (type == "evaluate") {
      EvalOutcome outcome = Failure{"bad request", false};
      try {
        EvalPlan plan;
        plan.warmups = j.value("warmups", plan.warmups);
        plan.reps = j.value("reps", plan.reps);
        outcome = evaluator.evaluate(KernelConfig::from_json(j.at("config")),
                                     ShapeKey::from_json(j.at("shape")), plan);
      } catch (const std::exception& e) {
        outcome = Failure{e.what(), false};
      }
      out << result_reply(outcome).dump() << '\n';
    } else if (type == "shutdown") {
      out.flush();
      return 0;
    } else {
      std::cerr << "runner: unknown request type `" << type << "`\n";
      return 1;
    }
    out.flush();
  }
  return 0;
}

}  // namespace protocol

namespace {
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}
}  // namespace

RunnerEvaluator::RunnerEvaluator(std::string command, std::string space_digest)
    : RunnerEvaluator(std::move(command), std::move(space_digest), Options{}) {}

RunnerEvaluator::RunnerEvaluator(std::string command, std::string space_digest,
                                 Options options)
    : command_(std::move(command)),
      space_digest_(std::move(space_digest)),
      options_(options),
      process_(Subprocess::spawn(command_)) {
  hello_ = handshake();
}

RunnerEvaluator::~RunnerEvaluator() {
  try {
    shutdown();
  } catch (...) {
  }
}

protocol::Hello RunnerEvaluator::handshake() {
  if (!process_.write_line(protocol::hello_request().dump())) {
    throw ProtocolError("runner `" + command_ + "` closed its input before hello");
  }
  std::string line;
  switch (process_.read_line(line, options_.handshake_timeout_ms)) {
    case Subprocess::ReadStatus::kTimeout:
      process_.kill();
      throw ProtocolError("runner `" + command_ + "` did not answer hello within " +
                          std::to_string(options_.handshake_timeout_ms) + " ms");
    case Subprocess::ReadStatus::kEof:
      throw ProtocolError("runner `" + command_ + "` exited before answering hello");
    case Subprocess::ReadStatus::kLine:
      break;
  }
  try {
    return protocol::parse_hello_reply(line, space_digest_);
  } catch (...) {
    process_.kill();
    throw;
  }
}

EvalOutcome RunnerEvaluator::breach(const std::string& reason, bool transient,
                                    double wall_ms) {
  process_.kill();
  needs_restart_ = true;
  return Failure{reason, transient, wall_ms};
}

EvalOutcome RunnerEvaluator::evaluate(const KernelConfig& config, const ShapeKey& shape,
                                      const EvalPlan& plan) {
  ++evaluations_;
  if (needs_restart_) {
    process_ = Subprocess::spawn(command_);
    auto hello = handshake();
    if (!(hello.fingerprint == hello_.fingerprint)) {
      throw ProtocolError("runner fingerprint changed after restart");
    }
    needs_restart_ = false;
    ++restarts_;
  }
  auto start = Clock::now();
  if (!process_.write_line(protocol::evaluate_request(config, shape, plan).dump())) {
    return breach("runner is not accepting requests", false, elapsed_ms(start));
  }
  std::string line;
  switch (process_.read_line(line, plan.timeout_ms)) {
    case Subprocess::ReadStatus::kTimeout:
      return breach("timeout after " + std::to_string(plan.timeout_ms) + " ms", true,
                    elapsed_ms(start));
    case Subprocess::ReadStatus::kEof: {
      auto status = process_.wait(options_.shutdown_timeout_ms);
      return breach("runner died (exit status " +
                        (status ? std::to_string(*status) : std::string("unknown")) + ")",
                    false, elapsed_ms(start));
    }
    case Subprocess::ReadStatus::kLine:
      break;
  }
  double wall = elapsed_ms(start);
  auto outcome = protocol::parse_result(line, plan.reps, plan.warmups, wall);
  if (const auto* f = std::get_if<Failure>(&outcome);
      f != nullptr && f->reason.rfind("runner error: ", 0) != 0) {
    return breach(f->reason, false, wall);
  }
  return outcome;
}

int RunnerEvaluator::shutdown() {
  if (!process_.running()) {
    auto s = process_.wait(0);
    return s ? *s : -1;
  }
  process_.write_line(protocol::shutdown_request().dump());
  if (auto status = process_.wait(options_.shutdown_timeout_ms)) return *status;
  process_.kill();
  return -1;
}

}  // namespace ktune
