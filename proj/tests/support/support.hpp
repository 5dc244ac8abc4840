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
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ktune/configspace.hpp"
#include "ktune/synthetic.hpp"

namespace ktune::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path fixture(const std::string& name);
std::string ktune_binary();
std::string fake_runner_binary();

struct RunOutput {
  int exit_code = -1;
  std::string out;
};
// Runs `command` through /bin/sh; stdout is captured, stderr is passed through.
RunOutput run_command(const std::string& command);

void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

struct Scenario {
  ConfigSpace space;
  CostProfile profile;
  ShapeKey shape;
};

// Small space (at most `max_valid` valid configs, at least one) with random
// domains and constraints, plus a noise-free profile with random targets and
// weights.
Scenario random_scenario(std::uint64_t seed, std::uint64_t max_valid = 200);

// Unconstrained 500-point space (5 * 5 * 4 * 5) and a noise-free profile.
Scenario five_hundred_point_scenario(std::uint64_t seed);

// Independent brute force: smallest noise-free latency over the valid
// configs that trip no invalid rule, ties broken by the smaller digest.
std::optional<KernelConfig> brute_force_best(const Scenario& s);

// Number of valid configs strictly faster than `config`.
std::size_t latency_rank(const Scenario& s, const KernelConfig& config);

// Rewrites register names, addresses and immediates in an assembly listing
// without touching mnemonics.
std::string rewrite_operands(const std::string& text);

}  // namespace ktune::testing
