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

#include "support.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <sys/wait.h>

namespace ktune::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "ktune-test-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path fixture(const std::string& name) { return fs::path(KTUNE_FIXTURES_DIR) / name; }
std::string ktune_binary() { return KTUNE_BINARY; }
std::string fake_runner_binary() { return KTUNE_FAKE_RUNNER; }

RunOutput run_command(const std::string& command) {
  RunOutput r;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("popen failed: " + command);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return r;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

template <typename T>
T pick(std::mt19937_64& rng, const std::vector<T>& xs) {
  return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

nlohmann::json random_profile(std::mt19937_64& rng, const nlohmann::json& params) {
  nlohmann::json targets = nlohmann::json::object();
  nlohmann::json weights = nlohmann::json::object();
  for (const auto& p : params) {
    std::string name = p["name"];
    std::string kind = p["kind"];
    weights[name] = uniform(rng, 0.05, 2.0);
    if (kind == "categorical") {
      targets[name] = pick(rng, p["values"].get<std::vector<std::string>>());
    } else if (kind == "boolean") {
      targets[name] = static_cast<bool>(rng() & 1);
    } else {
      // Off-grid numeric targets make exact ties unlikely.
      targets[name] = static_cast<std::int64_t>(std::exp2(uniform(rng, 0.0, 9.0))) + 1;
    }
  }
  return {{"device", "sim-" + std::to_string(rng() % 1000)},
          {"base", {{"intercept", uniform(rng, 0.1, 2.0)}, {"coefficients", {{"n", 0.001}}}}},
          {"targets", targets},
          {"weights", weights}};
}

}  // namespace

Scenario random_scenario(std::uint64_t seed, std::uint64_t max_valid) {
  std::mt19937_64 rng(seed);
  for (;;) {
    nlohmann::json params = nlohmann::json::array();
    int nparams = 2 + static_cast<int>(rng() % 3);
    std::vector<std::string> numeric;
    for (int i = 0; i < nparams; ++i) {
      std::string name = "P" + std::to_string(i);
      switch (rng() % 5) {
        case 0: {
          std::int64_t lo = std::int64_t{1} << (rng() % 4);
          params.push_back({{"name", name}, {"kind", "pow2-range"}, {"lo", lo},
                            {"hi", lo << (1 + rng() % 4)}});
          numeric.push_back(name);
          break;
        }
        case 1: {
          std::int64_t lo = 1 + static_cast<std::int64_t>(rng() % 4);
          params.push_back({{"name", name}, {"kind", "int-range"}, {"lo", lo},
                            {"hi", lo + static_cast<std::int64_t>(rng() % 8)},
                            {"step", 1 + static_cast<std::int64_t>(rng() % 2)}});
          numeric.push_back(name);
          break;
        }
        case 2: {
          std::vector<std::int64_t> vals;
          int n = 2 + static_cast<int>(rng() % 4);
          std::int64_t v = 1;
          for (int k = 0; k < n; ++k) {
            v += 1 + static_cast<std::int64_t>(rng() % 12);
            vals.push_back(v);
          }
          std::shuffle(vals.begin(), vals.end(), rng);
          params.push_back({{"name", name}, {"kind", "int-list"}, {"values", vals}});
          numeric.push_back(name);
          break;
        }
        case 3:
          params.push_back({{"name", name}, {"kind", "categorical"},
                            {"values", {"x", "y", "z"}}});
          break;
        default:
          params.push_back({{"name", name}, {"kind", "boolean"}});
          break;
      }
    }
    nlohmann::json constraints = nlohmann::json::array();
    if (numeric.size() >= 2 && rng() % 2 == 0) {
      constraints.push_back(numeric[0] + " + " + numeric[1] + " <= " +
                            std::to_string(8 + rng() % 64));
    }
    if (!numeric.empty() && rng() % 3 == 0) {
      constraints.push_back(numeric.back() + " % 2 == 0 || " + numeric.front() + " < 6");
    }
    nlohmann::json doc{{"name", "random_" + std::to_string(seed)},
                       {"params", params},
                       {"constraints", constraints}};
    ConfigSpace space = ConfigSpace::from_json(doc);
    auto card = cardinality(space);
    if (card.valid == 0 || card.valid > max_valid) continue;
    CostProfile profile = CostProfile::from_json(random_profile(rng, params));
    ShapeKey shape = ShapeKey::from_json({{"n", 1 + static_cast<std::int64_t>(rng() % 4096)}});
    return {std::move(space), std::move(profile), std::move(shape)};
  }
}

Scenario five_hundred_point_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5eed5eedULL);
  std::vector<std::int64_t> warps{1, 2, 4, 8, 16};
  std::shuffle(warps.begin(), warps.end(), rng);
  nlohmann::json params = nlohmann::json::array({
      {{"name", "BLOCK_M"}, {"kind", "pow2-range"}, {"lo", 16}, {"hi", 256}},
      {{"name", "num_warps"}, {"kind", "int-list"}, {"values", warps}},
      {{"name", "num_stages"}, {"kind", "int-range"}, {"lo", 1}, {"hi", 4}},
      {{"name", "order"}, {"kind", "categorical"}, {"values", {"a", "b", "c", "d", "e"}}},
  });
  ConfigSpace space = ConfigSpace::from_json(
      {{"name", "five_hundred"}, {"params", params}, {"constraints", nlohmann::json::array()}});
  CostProfile profile = CostProfile::from_json(random_profile(rng, params));
  return {std::move(space), std::move(profile), ShapeKey::from_json({{"n", 1024}})};
}

std::optional<KernelConfig> brute_force_best(const Scenario& s) {
  SyntheticEvaluator rules(s.profile, s.space);
  std::optional<KernelConfig> best;
  double best_ms = 0.0;
  for (const auto& c : enumerate(s.space)) {
    if (rules.violated_rule(c)) continue;
    double ms = synthetic_latency(s.profile, c, s.shape);
    if (!best || ms < best_ms || (ms == best_ms && c.digest() < best->digest())) {
      best = c;
      best_ms = ms;
    }
  }
  return best;
}

std::size_t latency_rank(const Scenario& s, const KernelConfig& config) {
  double mine = synthetic_latency(s.profile, config, s.shape);
  std::size_t rank = 0;
  for (const auto& c : enumerate(s.space)) {
    if (synthetic_latency(s.profile, c, s.shape) < mine) ++rank;
  }
  return rank;
}

std::string rewrite_operands(const std::string& text) {
  // Registers, bracketed addresses, hex and decimal immediates. None of these
  // patterns can match inside a dot-joined mnemonic.
  static const std::regex reg(R"(%[A-Za-z_][A-Za-z_0-9.]*)");
  static const std::regex addr(R"(\[[^\]\n]*\])");
  static const std::regex hex(R"(\b0[xX][0-9A-Fa-f]+\b)");
  static const std::regex gpr(R"((^|[^.\w])[vsRP][0-9]+\b)");
  static const std::regex dec(R"((^|[\s,(+-])[0-9]+\b)");
  std::string out = std::regex_replace(text, addr, "[%rd77+64]");
  out = std::regex_replace(out, reg, "%zz9");
  out = std::regex_replace(out, gpr, "$01r99");
  out = std::regex_replace(out, hex, "0x7f");
  out = std::regex_replace(out, dec, "$0117");
  return out;
}

}  // namespace ktune::testing
