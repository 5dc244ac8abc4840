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

#include <iostream>
#include <memory>

#include "cli.hpp"
#include "commands.hpp"
#include "ktune/digest.hpp"
#include "ktune/runner.hpp"
#include "ktune/subprocess.hpp"
#include "ktune/synthetic.hpp"

namespace ktune::cli {
namespace {

struct CheckFlags {
  std::string command;
  std::string synthetic;
  std::string space;
  std::string config;
  std::string shape;
  int warmups = 3;
  int reps = 10;
  int timeout_ms = 10000;
  bool json = false;
};

struct Assertion {
  std::string name;
  std::string status;  // pass | fail | skip
  std::string detail;
};

class Checker {
 public:
  void pass(const std::string& name, const std::string& detail = {}) {
    rows_.push_back({name, "pass", detail});
  }
  void fail(const std::string& name, const std::string& detail) {
    rows_.push_back({name, "fail", detail});
  }
  bool expect(const std::string& name, bool ok, const std::string& detail) {
    ok ? pass(name) : fail(name, detail);
    return ok;
  }
  void skip_rest(const std::vector<std::string>& names, const std::string& why) {
    for (const auto& n : names) rows_.push_back({n, "skip", why});
  }
  bool all_passed() const {
    for (const auto& r : rows_) {
      if (r.status != "pass") return false;
    }
    return true;
  }
  const std::vector<Assertion>& rows() const { return rows_; }

 private:
  std::vector<Assertion> rows_;
};

const std::vector<std::string> kEvaluateChecks = {"evaluate.reply", "evaluate.json",
                                                  "evaluate.type", "evaluate.status",
                                                  "evaluate.latencies"};
const std::vector<std::string> kHelloChecks = {"hello.reply",       "hello.json",
                                               "hello.type",        "hello.protocol",
                                               "hello.fingerprint", "hello.capabilities"};

std::vector<std::string> tail(const std::vector<std::string>& v, std::size_t from) {
  return {v.begin() + static_cast<std::ptrdiff_t>(from), v.end()};
}

// Reads one line and checks that it is a JSON object; `prefix` names the
// assertions. Returns nullopt after recording the failure.
std::optional<nlohmann::json> read_message(Subprocess& proc, Checker& c,
                                           const std::string& prefix,
                                           const std::vector<std::string>& rest,
                                           int timeout_ms) {
  std::string line;
  auto st = proc.read_line(line, timeout_ms);
  if (st != Subprocess::ReadStatus::kLine) {
    c.fail(prefix + ".reply", st == Subprocess::ReadStatus::kTimeout
                                  ? "no reply within " + std::to_string(timeout_ms) + " ms"
                                  : "runner closed its output");
    c.skip_rest(tail(rest, 2), "no reply");
    return std::nullopt;
  }
  c.pass(prefix + ".reply");
  auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    c.fail(prefix + ".json", "not a JSON object: `" + line.substr(0, 80) + "`");
    c.skip_rest(tail(rest, 2), "unparseable reply");
    return std::nullopt;
  }
  c.pass(prefix + ".json");
  return j;
}

bool check_hello(Subprocess& proc, Checker& c, int timeout_ms) {
  if (!proc.write_line(protocol::hello_request().dump())) {
    c.fail("hello.reply", "runner does not accept input");
    c.skip_rest(tail(kHelloChecks, 1), "no reply");
    return false;
  }
  auto j = read_message(proc, c, "hello", kHelloChecks, timeout_ms);
  if (!j) return false;
  bool ok = c.expect("hello.type", j->value("type", nlohmann::json()) == "hello",
                     "type is " + j->value("type", nlohmann::json()).dump());
  auto proto = j->value("protocol", nlohmann::json());
  ok &= c.expect("hello.protocol", proto.is_number_integer() && proto.get<int>() == kProtocolVersion,
                 "protocol is " + proto.dump() + ", expected " + std::to_string(kProtocolVersion));
  std::string missing;
  auto fp = j->value("fingerprint", nlohmann::json());
  for (const auto& name : protocol::runner_fingerprint_fields()) {
    if (!fp.is_object() || !fp.contains(name) || !fp[name].is_string() ||
        fp[name].get<std::string>().empty()) {
      missing += (missing.empty() ? "" : ", ") + name;
    }
  }
  ok &= c.expect("hello.fingerprint", missing.empty(), "missing or empty: " + missing);
  bool can_evaluate = false;
  if (auto caps = j->value("capabilities", nlohmann::json()); caps.is_array()) {
    for (const auto& cap : caps) can_evaluate |= cap == "evaluate";
  }
  ok &= c.expect("hello.capabilities", can_evaluate, "`evaluate` not advertised");
  return ok;
}

void check_evaluate(Subprocess& proc, Checker& c, const KernelConfig& config,
                    const ShapeKey& shape, const EvalPlan& plan) {
  if (!proc.write_line(protocol::evaluate_request(config, shape, plan).dump())) {
    c.fail("evaluate.reply", "runner does not accept input");
    c.skip_rest(tail(kEvaluateChecks, 1), "no reply");
    return;
  }
  auto j = read_message(proc, c, "evaluate", kEvaluateChecks, plan.timeout_ms);
  if (!j) return;
  c.expect("evaluate.type", j->value("type", nlohmann::json()) == "result",
           "type is " + j->value("type", nlohmann::json()).dump());
  auto status = j->value("status", nlohmann::json());
  if (!c.expect("evaluate.status", status == "ok" || status == "invalid",
                "status is " + status.dump() + " (" + j->value("reason", std::string()) + ")")) {
    c.skip_rest({"evaluate.latencies"}, "no measurement");
    return;
  }
  if (status == "invalid") {
    c.expect("evaluate.latencies", j->contains("reason") && (*j)["reason"].is_string(),
             "invalid result carries no reason");
    return;
  }
  auto outcome = protocol::parse_result(j->dump(), plan.reps, plan.warmups, 0.0);
  const auto* f = std::get_if<Failure>(&outcome);
  c.expect("evaluate.latencies", f == nullptr, f ? f->reason : "");
}

KernelConfig probe_config(const CheckFlags& f) {
  if (!f.config.empty()) return KernelConfig::from_json(nlohmann::json::parse(f.config));
  if (!f.space.empty()) {
    ConfigSpace space = load_space(f.space);
    std::optional<KernelConfig> first;
    for_each_config(space, [&](const KernelConfig& c) {
      first = c;
      return false;
    });
    if (!first) throw UsageError("space has no valid configuration to probe with");
    return *first;
  }
  return KernelConfig::from_json({{"BLOCK_SIZE", 1024}});
}

int run_check(const CheckFlags& f) {
  if (f.command.empty() == f.synthetic.empty()) {
    throw UsageError("runner-check needs a runner command or --synthetic");
  }
  std::string command = f.command;
  if (!f.synthetic.empty()) {
    if (f.space.empty()) throw UsageError("--synthetic needs --space");
    command = shell_quote(self_executable()) + " serve-synthetic --profile " +
              shell_quote(f.synthetic) + " --space " + shell_quote(f.space);
  }
  KernelConfig config = probe_config(f);
  ShapeKey shape = ShapeKey::parse(f.shape.empty() ? "n=98432" : f.shape);
  if (f.shape.empty() && !f.synthetic.empty()) {
    // Every dimension the profile's base cost reads, set to 1.
    nlohmann::json dims = nlohmann::json::object();
    for (const auto& [dim, coef] : CostProfile::load(f.synthetic).base_coefficients) dims[dim] = 1;
    if (!dims.empty()) shape = ShapeKey::from_json(dims);
  }
  EvalPlan plan{f.warmups, f.reps, f.timeout_ms};

  Checker c;
  std::optional<Subprocess> proc;
  try {
    proc.emplace(Subprocess::spawn(command));
    c.pass("spawn");
  } catch (const std::exception& e) {
    c.fail("spawn", e.what());
  }
  if (proc) {
    if (check_hello(*proc, c, f.timeout_ms)) {
      check_evaluate(*proc, c, config, shape, plan);
    } else {
      c.skip_rest(kEvaluateChecks, "handshake failed");
    }
    proc->write_line(protocol::shutdown_request().dump());
    auto status = proc->wait(f.timeout_ms);
    if (!status) proc->kill();
    c.expect("shutdown.exit", status && *status == 0,
             status ? "exit status " + std::to_string(*status) : "did not exit after shutdown");
  } else {
    c.skip_rest(kHelloChecks, "spawn failed");
    c.skip_rest(kEvaluateChecks, "spawn failed");
    c.skip_rest({"shutdown.exit"}, "spawn failed");
  }

  std::size_t failed = 0;
  for (const auto& r : c.rows()) failed += r.status != "pass";
  if (f.json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : c.rows()) {
      rows.push_back({{"assertion", r.name}, {"status", r.status}, {"detail", r.detail}});
    }
    std::cout << nlohmann::json{{"command", command}, {"failed", failed}, {"assertions", rows}}
                     .dump(2)
              << '\n';
  } else {
    for (const auto& r : c.rows()) {
      std::cout << (r.status == "pass" ? "PASS " : r.status == "fail" ? "FAIL " : "SKIP ")
                << r.name;
      if (!r.detail.empty()) std::cout << ": " << r.detail;
      std::cout << '\n';
    }
    std::cout << c.rows().size() - failed << "/" << c.rows().size() << " assertions passed\n";
  }
  return c.all_passed() ? kExitOk : kExitHard;
}

}  // namespace

void add_runner_check_command(CLI::App& app, int& exit_code) {
  auto flags = std::make_shared<CheckFlags>();
  auto* cmd = app.add_subcommand("runner-check", "Check a benchmark runner against the wire protocol");
  cmd->add_option("command", flags->command, "Runner command line (run through /bin/sh)");
  cmd->add_option("--synthetic", flags->synthetic, "Check the built-in synthetic runner with this profile");
  cmd->add_option("--space", flags->space, "Space used for the probe config and --synthetic");
  cmd->add_option("--config", flags->config, "Probe config as a JSON object");
  cmd->add_option("--shape", flags->shape, "Probe shape as name=value,... (default n=98432)");
  cmd->add_option("--warmups", flags->warmups, "Warm-up runs in the probe");
  cmd->add_option("--reps", flags->reps, "Timed repetitions in the probe");
  cmd->add_option("--timeout-ms", flags->timeout_ms, "Time allowed per reply");
  cmd->add_flag("--json", flags->json, "Machine-readable output");
  cmd->callback([flags, &exit_code] { exit_code = run_check(*flags); });
}

void add_serve_synthetic_command(CLI::App& app, int& exit_code) {
  auto profile = std::make_shared<std::string>();
  auto space = std::make_shared<std::string>();
  auto* cmd = app.add_subcommand("serve-synthetic", "Serve the synthetic cost model over stdio");
  cmd->group("");
  cmd->add_option("--profile", *profile, "Cost profile")->required()->check(CLI::ExistingFile);
  cmd->add_option("--space", *space, "Space definition file")->required()->check(CLI::ExistingFile);
  cmd->callback([profile, space, &exit_code] {
    ConfigSpace s = load_space(*space);
    SyntheticEvaluator evaluator(CostProfile::load(*profile), s);
    exit_code = protocol::serve(std::cin, std::cout, evaluator);
  });
}

}  // namespace ktune::cli
