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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ktune/executor.hpp"
#include "ktune/search.hpp"

namespace ktune::cli {

// Exit-code contract. Scripts depend on these values.
enum ExitCode : int {
  kExitOk = 0,
  kExitHard = 1,
  kExitPartial = 2,
  kExitNotFound = 3,
  kExitUsage = 64,
};

// Bad flag combinations detected after parsing; mapped to kExitUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything one `ktune tune` invocation needs.
struct RunManifest {
  std::string space_path;
  std::vector<ShapeKey> shapes;
  std::vector<std::string> runners;
  std::optional<std::string> synthetic_profile;
  SearchStrategy strategy = Exhaustive{};
  SearchBudget budget;
  EvalPlan plan;
  std::filesystem::path cache_dir;
  std::optional<std::filesystem::path> out_dir;
  bool force = false;
  bool parallel_runners = false;

  // Manifest file keys: space, shapes | shapes_file, runner (string or
  // array) | synthetic, strategy {name, ...}, budget {max_evaluations,
  // max_wall_ms}, plan {warmups, reps, timeout_ms}, cache_dir, out_dir,
  // force, parallel_runners. Relative paths resolve against `base_dir`.
  static RunManifest from_json(const nlohmann::json& j,
                               const std::filesystem::path& base_dir);
  static RunManifest load(const std::filesystem::path& path);

  // Throws UsageError unless exactly one evaluator source is given and every
  // referenced file exists.
  void check() const;
};

// JSON array of shape objects, or one shape object per line.
std::vector<ShapeKey> load_shapes(const std::filesystem::path& path);
SearchStrategy strategy_from_json(const nlohmann::json& j);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string self_executable();
std::string shell_quote(const std::string& s);

}  // namespace ktune::cli
