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

#include "cli.hpp"

#include <unistd.h>

#include <fstream>
#include <sstream>

#include "ktune/error.hpp"

namespace ktune::cli {
namespace fs = std::filesystem;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string self_executable() {
  std::error_code ec;
  auto p = fs::read_symlink("/proc/self/exe", ec);
  return ec ? std::string("ktune") : p.string();
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::vector<ShapeKey> load_shapes(const fs::path& path) {
  std::string text = read_text(path);
  std::vector<ShapeKey> shapes;
  auto doc = nlohmann::json::parse(text, nullptr, false);
  if (!doc.is_discarded() && doc.is_array()) {
    for (const auto& s : doc) shapes.push_back(ShapeKey::from_json(s));
    return shapes;
  }
  std::istringstream in(text);
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw ParseError("malformed shape", path.string() + ":" + std::to_string(lineno));
    }
    shapes.push_back(ShapeKey::from_json(j));
  }
  return shapes;
}

SearchStrategy strategy_from_json(const nlohmann::json& j) {
  const auto name = j.value("name", std::string("exhaustive"));
  if (name == "exhaustive") return Exhaustive{};
  if (name == "random") {
    return RandomSample{j.value("seed", std::uint64_t{0}), j.value("n", std::uint64_t{1})};
  }
  if (name == "halving") {
    Halving h;
    h.seed = j.value("seed", h.seed);
    if (j.contains("initial_fraction") && !j["initial_fraction"].is_null()) {
      h.initial_fraction = j["initial_fraction"].get<double>();
    }
    h.keep_fraction = j.value("keep_fraction", h.keep_fraction);
    h.rounds = j.value("rounds", h.rounds);
    if (j.contains("reps_schedule")) {
      h.reps_schedule = j["reps_schedule"].get<std::vector<int>>();
    }
    return h;
  }
  throw UsageError("unknown strategy `" + name + "`");
}

RunManifest RunManifest::from_json(const nlohmann::json& j, const fs::path& base_dir) {
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  RunManifest m;
  try {
    if (j.contains("space")) m.space_path = resolve(j["space"].get<std::string>()).string();
    if (j.contains("shapes")) {
      for (const auto& s : j["shapes"]) m.shapes.push_back(ShapeKey::from_json(s));
    }
    if (j.contains("shapes_file")) {
      for (auto& s : load_shapes(resolve(j["shapes_file"].get<std::string>()))) {
        m.shapes.push_back(std::move(s));
      }
    }
    if (j.contains("runner")) {
      if (j["runner"].is_array()) {
        m.runners = j["runner"].get<std::vector<std::string>>();
      } else {
        m.runners.push_back(j["runner"].get<std::string>());
      }
    }
    if (j.contains("synthetic")) {
      m.synthetic_profile = resolve(j["synthetic"].get<std::string>()).string();
    }
    if (j.contains("strategy")) m.strategy = strategy_from_json(j["strategy"]);
    if (j.contains("budget")) {
      const auto& b = j["budget"];
      if (b.contains("max_evaluations") && !b["max_evaluations"].is_null()) {
        m.budget.max_evaluations = b["max_evaluations"].get<std::uint64_t>();
      }
      if (b.contains("max_wall_ms") && !b["max_wall_ms"].is_null()) {
        m.budget.max_wall_ms = b["max_wall_ms"].get<double>();
      }
    }
    if (j.contains("plan")) {
      const auto& p = j["plan"];
      m.plan.warmups = p.value("warmups", m.plan.warmups);
      m.plan.reps = p.value("reps", m.plan.reps);
      m.plan.timeout_ms = p.value("timeout_ms", m.plan.timeout_ms);
    }
    if (j.contains("cache_dir")) m.cache_dir = resolve(j["cache_dir"].get<std::string>());
    if (j.contains("out_dir")) m.out_dir = resolve(j["out_dir"].get<std::string>());
    m.force = j.value("force", false);
    m.parallel_runners = j.value("parallel_runners", false);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

RunManifest RunManifest::load(const fs::path& path) {
  auto j = nlohmann::json::parse(read_text(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ParseError("manifest must be a JSON object", path.string());
  }
  return from_json(j, path.parent_path());
}

void RunManifest::check() const {
  if (space_path.empty()) throw UsageError("no space file given (--space)");
  if (!fs::exists(space_path)) throw UsageError("space file " + space_path + " does not exist");
  if (shapes.empty()) throw UsageError("no shapes given (--shape or --shapes)");
  if (runners.empty() == !synthetic_profile.has_value()) {
    throw UsageError("give exactly one of --runner or --synthetic");
  }
  if (synthetic_profile && !fs::exists(*synthetic_profile)) {
    throw UsageError("cost profile " + *synthetic_profile + " does not exist");
  }
  if (runners.size() > 1 && !parallel_runners) {
    throw UsageError("several runners need --parallel-runners");
  }
  if (plan.reps < 1 || plan.warmups < 0 || plan.timeout_ms < 1) {
    throw UsageError("plan needs reps >= 1, warmups >= 0, timeout_ms >= 1");
  }
}

}  // namespace ktune::cli
