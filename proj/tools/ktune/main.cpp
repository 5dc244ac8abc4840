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

#include <cstdio>
#include <iostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "cli.hpp"
#include "commands.hpp"
#include "ktune/digest.hpp"
#include "ktune/error.hpp"

int main(int argc, char** argv) {
  using namespace ktune::cli;

  CLI::App app{"ktune: ahead-of-time autotuning for JIT-compiled GPU kernels"};
  app.set_version_flag("--version", ktune::kFrameworkVersion);
  app.require_subcommand(1);
  app.fallthrough();
  auto logger = spdlog::stderr_color_mt("ktune");
  logger->set_pattern("ktune: %l: %v");
  logger->set_level(spdlog::level::warn);
  spdlog::set_default_logger(logger);
  app.add_option_function<std::string>(
         "--log-level",
         [](const std::string& level) { spdlog::set_level(spdlog::level::from_str(level)); },
         "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  int exit_code = kExitOk;
  add_tune_command(app, exit_code);
  add_space_command(app, exit_code);
  add_cache_command(app, exit_code);
  add_analyze_asm_command(app, exit_code);
  add_report_command(app, exit_code);
  add_runner_check_command(app, exit_code);
  add_serve_synthetic_command(app, exit_code);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "ktune: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ktune::ParseError& e) {
    std::cerr << "ktune: parse error: " << e.what() << '\n';
    return kExitHard;
  } catch (const std::exception& e) {
    std::cerr << "ktune: error: " << e.what() << '\n';
    return kExitHard;
  }
  std::cout.flush();
  return exit_code;
}
