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

#include "ktune/executor.hpp"

#include <algorithm>
#include <numeric>

#include "ktune/digest.hpp"
#include "ktune/error.hpp"

namespace ktune {

double median(std::vector<double> xs) {
  if (xs.empty()) throw Error("median of empty list");
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

Measurement::Measurement(double compile_ms, std::vector<double> latencies_ms,
                         int warmups, double wall_ms)
    : compile_ms_(compile_ms),
      latencies_ms_(std::move(latencies_ms)),
      warmups_(warmups),
      median_ms_(0.0),
      wall_ms_(wall_ms) {
  if (!(compile_ms_ >= 0.0)) throw Error("compile_ms must be non-negative");
  if (latencies_ms_.empty()) throw Error("measurement needs at least one latency");
  for (double l : latencies_ms_) {
    if (!(l > 0.0)) throw Error("latencies must be positive");
  }
  if (warmups_ < 0) throw Error("warmups must be non-negative");
  median_ms_ = median(latencies_ms_);
  wall_ms_ = std::max(wall_ms_, compile_ms_ + run_ms());
}

double Measurement::run_ms() const {
  return std::accumulate(latencies_ms_.begin(), latencies_ms_.end(), 0.0);
}

nlohmann::json Measurement::to_json() const {
  return {{"compile_ms", compile_ms_},
          {"latencies_ms", latencies_ms_},
          {"warmups", warmups_},
          {"reps", reps()},
          {"median_ms", median_ms_},
          {"wall_ms", wall_ms_}};
}

Measurement Measurement::from_json(const nlohmann::json& j) {
  return Measurement(j.at("compile_ms").get<double>(),
                     j.at("latencies_ms").get<std::vector<double>>(),
                     j.at("warmups").get<int>(), j.value("wall_ms", 0.0));
}

double wall_ms(const EvalOutcome& o) {
  if (const auto* ok = std::get_if<Ok>(&o)) return ok->measurement.wall_ms();
  if (const auto* inv = std::get_if<Invalid>(&o)) return inv->wall_ms;
  return std::get<Failure>(o).wall_ms;
}

std::string describe(const EvalOutcome& o) {
  if (const auto* ok = std::get_if<Ok>(&o)) {
    return "ok median=" + std::to_string(ok->measurement.median_ms()) + "ms";
  }
  if (const auto* inv = std::get_if<Invalid>(&o)) return "invalid: " + inv->reason;
  const auto& f = std::get<Failure>(o);
  return std::string(f.transient ? "transient failure: " : "failure: ") + f.reason;
}

nlohmann::json to_json(const EvalOutcome& o) {
  if (const auto* ok = std::get_if<Ok>(&o)) {
    nlohmann::json j = ok->measurement.to_json();
    j["status"] = "ok";
    return j;
  }
  if (const auto* inv = std::get_if<Invalid>(&o)) {
    return {{"status", "invalid"}, {"reason", inv->reason}, {"wall_ms", inv->wall_ms}};
  }
  const auto& f = std::get<Failure>(o);
  return {{"status", "failure"},
          {"reason", f.reason},
          {"transient", f.transient},
          {"wall_ms", f.wall_ms}};
}

EvalOutcome outcome_from_json(const nlohmann::json& j) {
  const auto status = j.at("status").get<std::string>();
  if (status == "ok") return Ok{Measurement::from_json(j)};
  if (status == "invalid") {
    return Invalid{j.at("reason").get<std::string>(), j.value("wall_ms", 0.0)};
  }
  if (status == "failure") {
    return Failure{j.at("reason").get<std::string>(), j.value("transient", false),
                   j.value("wall_ms", 0.0)};
  }
  throw ParseError("unknown outcome status `" + status + "`");
}

const std::vector<std::string>& EnvFingerprint::field_names() {
  static const std::vector<std::string> kNames = {
      "device_name",    "driver_version",       "toolchain_version",
      "runner_id",      "runner_version",       "kernel_source_digest",
      "space_digest",   "protocol_version"};
  return kNames;
}

nlohmann::json EnvFingerprint::to_json() const {
  return {{"device_name", device_name},
          {"driver_version", driver_version},
          {"toolchain_version", toolchain_version},
          {"runner_id", runner_id},
          {"runner_version", runner_version},
          {"kernel_source_digest", kernel_source_digest},
          {"space_digest", space_digest},
          {"protocol_version", protocol_version}};
}

EnvFingerprint EnvFingerprint::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ProtocolError("fingerprint must be a JSON object");
  auto str = [&](const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
      throw ProtocolError(std::string("fingerprint field `") + key +
                          "` is missing or empty");
    }
    return it->get<std::string>();
  };
  EnvFingerprint fp;
  fp.device_name = str("device_name");
  fp.driver_version = str("driver_version");
  fp.toolchain_version = str("toolchain_version");
  fp.runner_id = str("runner_id");
  fp.runner_version = str("runner_version");
  fp.kernel_source_digest = str("kernel_source_digest");
  fp.space_digest = str("space_digest");
  auto it = j.find("protocol_version");
  if (it == j.end() || !it->is_number_integer() || it->get<int>() <= 0) {
    throw ProtocolError("fingerprint field `protocol_version` is missing or invalid");
  }
  fp.protocol_version = it->get<int>();
  return fp;
}

std::string EnvFingerprint::digest() const { return json_digest(to_json()); }

}  // namespace ktune
