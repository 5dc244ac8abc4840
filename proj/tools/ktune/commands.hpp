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

#include "CLI11.hpp"

namespace ktune::cli {

// Each registers one top-level subcommand. The callback stores its exit
// code in `exit_code`; errors propagate as exceptions.
void add_tune_command(CLI::App& app, int& exit_code);
void add_space_command(CLI::App& app, int& exit_code);
void add_cache_command(CLI::App& app, int& exit_code);
void add_analyze_asm_command(CLI::App& app, int& exit_code);
void add_report_command(CLI::App& app, int& exit_code);
void add_runner_check_command(CLI::App& app, int& exit_code);
void add_serve_synthetic_command(CLI::App& app, int& exit_code);

}  // namespace ktune::cli
