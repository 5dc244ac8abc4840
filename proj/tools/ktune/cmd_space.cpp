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
#include "ktune/configspace.hpp"

namespace ktune::cli {

void add_space_command(CLI::App& app, int& exit_code) {
  auto* space = app.add_subcommand("space", "Inspect a configuration space");
  space->require_subcommand(1);
  auto path = std::make_shared<std::string>();
  auto json = std::make_shared<bool>(false);
  auto limit = std::make_shared<std::uint64_t>(0);

  auto* check = space->add_subcommand("check", "Parse and type-check a space file");
  check->add_option("space", *path, "Space definition file")->required();
  check->callback([path, &exit_code] {
    ConfigSpace s = load_space(*path);
    std::cout << s.name() << ": ok, " << s.params().size() << " parameters, "
              << s.constraints().size() << " constraints, digest " << s.digest() << '\n';
    for (const auto& p : s.params()) std::cout << "  " << p.name() << ": " << p.describe() << '\n';
    for (const auto& c : s.constraints()) std::cout << "  where " << c.source() << '\n';
    // Walks the grid, so constraints that cannot be evaluated surface here.
    Cardinality c = cardinality(s);
    std::cout << "  raw " << c.raw << ", valid " << c.valid << '\n';
    exit_code = kExitOk;
  });

  auto* count = space->add_subcommand("count", "Count raw and valid configurations");
  count->add_option("space", *path, "Space definition file")->required();
  count->add_flag("--json", *json, "Machine-readable output");
  count->callback([path, json, &exit_code] {
    ConfigSpace s = load_space(*path);
    Cardinality c = cardinality(s);
    if (*json) {
      std::cout << nlohmann::json{{"raw", c.raw}, {"valid", c.valid}}.dump() << '\n';
    } else {
      std::cout << "raw " << c.raw << "\nvalid " << c.valid << '\n';
    }
    exit_code = kExitOk;
  });

  auto* enumerate_cmd = space->add_subcommand("enumerate", "List valid configurations, one JSON object per line");
  enumerate_cmd->add_option("space", *path, "Space definition file")->required();
  enumerate_cmd->add_option("--limit", *limit, "Stop after this many (0: all)");
  enumerate_cmd->callback([path, limit, &exit_code] {
    ConfigSpace s = load_space(*path);
    std::uint64_t n = 0;
    for_each_config(s, [&](const KernelConfig& c) {
      std::cout << c.canonical() << '\n';
      return *limit == 0 || ++n < *limit;
    });
    exit_code = kExitOk;
  });
}

}  // namespace ktune::cli
