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

// Runner that speaks the wire protocol over the synthetic cost model and
// misbehaves on request. Used by the protocol robustness tests.
//
//   fake_runner --profile P --space S [--mode M] [--state-dir D] [--fail-rate R]
//
// Modes:
//   ok             well-behaved
//   garbled        hello is fine, every result line is not JSON
//   wrong-version  hello advertises protocol 99
//   silent-hello   never answers hello
//   silent-eval    answers hello, never answers evaluate
//   die-mid        exits with status 3 on the second evaluate of each process
//   missing-field  hello fingerprint lacks driver_version
//   unknown-type   evaluate is answered with type "banana"
//   no-evaluate    hello advertises no capabilities
//   short-reply    ok result with one latency too few
//   error          every evaluate gets status "error"
//   bad-exit       shutdown exits with status 5
//   flaky          the first attempt at a config hangs with probability R,
//                  keyed on the config digest; attempts are counted in D so
//                  they survive restarts

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "ktune/digest.hpp"
#include "ktune/runner.hpp"
#include "ktune/synthetic.hpp"

namespace {

namespace fs = std::filesystem;

[[noreturn]] void hang() {
  for (;;) std::this_thread::sleep_for(std::chrono::hours(1));
}

void reply(const nlohmann::json& j) { std::cout << j.dump() << std::endl; }

int bump_attempts(const fs::path& dir, const std::string& digest) {
  fs::path p = dir / digest;
  int n = 0;
  if (std::ifstream in(p); in) in >> n;
  std::ofstream(p) << n + 1;
  return n + 1;
}

// Deterministic value in [0, 1) from a config digest.
double unit_from_digest(const std::string& digest) {
  std::uint64_t x = std::stoull(ktune::sha256_hex("flaky/" + digest).substr(0, 13), nullptr, 16);
  return static_cast<double>(x) / static_cast<double>(1ULL << 52);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fake benchmark runner"};
  std::string profile_path, space_path, mode = "ok", state_dir;
  double fail_rate = 0.1;
  app.add_option("--profile", profile_path)->required();
  app.add_option("--space", space_path)->required();
  app.add_option("--mode", mode);
  app.add_option("--state-dir", state_dir);
  app.add_option("--fail-rate", fail_rate);
  CLI11_PARSE(app, argc, argv);

  ktune::ConfigSpace space = ktune::load_space(space_path);
  ktune::SyntheticEvaluator evaluator(ktune::CostProfile::load(profile_path), space);
  int evaluations = 0;

  std::string line;
  while (std::getline(std::cin, line)) {
    auto req = nlohmann::json::parse(line, nullptr, false);
    std::string type = req.is_object() ? req.value("type", "") : "";
    if (type == "hello") {
      if (mode == "silent-hello") hang();
      auto msg = ktune::protocol::hello_reply(evaluator.fingerprint(), {"evaluate"});
      if (mode == "wrong-version") msg["protocol"] = 99;
      if (mode == "missing-field") msg["fingerprint"].erase("driver_version");
      if (mode == "no-evaluate") msg["capabilities"] = nlohmann::json::array();
      reply(msg);
    } else if (type == "evaluate") {
      ++evaluations;
      if (mode == "silent-eval") hang();
      if (mode == "die-mid" && evaluations == 2) std::exit(3);
      if (mode == "garbled") {
        std::cout << "{\"type\": \"result\", \"status\": ok" << std::endl;
        continue;
      }
      if (mode == "unknown-type") {
        reply({{"type", "banana"}});
        continue;
      }
      if (mode == "error") {
        reply({{"type", "result"}, {"status", "error"}, {"reason", "simulated failure"}});
        continue;
      }
      auto config = ktune::KernelConfig::from_json(req.at("config"));
      auto shape = ktune::ShapeKey::from_json(req.at("shape"));
      if (mode == "flaky" && !state_dir.empty() &&
          bump_attempts(state_dir, config.digest()) == 1 &&
          unit_from_digest(config.digest()) < fail_rate) {
        hang();
      }
      ktune::EvalPlan plan;
      plan.warmups = req.value("warmups", 3);
      plan.reps = req.value("reps", 10);
      auto msg = ktune::protocol::result_reply(evaluator.evaluate(config, shape, plan));
      if (mode == "short-reply" && msg.contains("latencies_ms")) {
        msg["latencies_ms"].erase(msg["latencies_ms"].size() - 1);
      }
      reply(msg);
    } else if (type == "shutdown") {
      return mode == "bad-exit" ? 5 : 0;
    } else {
      reply({{"type", "error"}, {"reason", "unknown request"}});
    }
  }
  return 0;
}
