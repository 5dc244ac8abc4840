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
#include <exception>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "commands.hpp"
#include "ktune/cache.hpp"
#include "ktune/error.hpp"
#include "ktune/runner.hpp"
#include "ktune/synthetic.hpp"

namespace ktune::cli {
namespace {

namespace fs = std::filesystem;

constexpr double kDefaultWallBudgetMs = 24.0 * 3600.0 * 1000.0;

struct TuneFlags {
  std::string manifest;
  std::string space;
  std::vector<std::string> shapes;
  std::string shapes_file;
  std::vector<std::string> runners;
  std::string synthetic;
  std::string strategy = "exhaustive";
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  double initial_fraction = 0.0;
  double keep_fraction = 0.5;
  int rounds = 3;
  std::vector<int> reps_schedule;
  std::uint64_t max_evals = 0;
  double max_wall_ms = 0.0;
  int warmups = 3;
  int reps = 10;
  int timeout_ms = 2000;
  std::string cache_dir;
  std::string out_dir;
  bool force = false;
  bool parallel = false;
  bool json = false;
};

struct ShapeReport {
  ShapeKey shape;
  std::string status;  // cached | tuned | no-viable
  std::optional<TuningResult> result;
  std::string key;
  std::uint64_t evaluations = 0;
};

std::string fmt_ms(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

RunManifest build_manifest(const TuneFlags& f, const CLI::App& cmd) {
  RunManifest m;
  if (!f.manifest.empty()) m = RunManifest::load(f.manifest);
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--space")) m.space_path = f.space;
  if (given("--shape")) {
    m.shapes.clear();
    for (const auto& s : f.shapes) m.shapes.push_back(ShapeKey::parse(s));
  }
  if (given("--shapes")) {
    if (!given("--shape")) m.shapes.clear();
    for (auto& s : load_shapes(f.shapes_file)) m.shapes.push_back(std::move(s));
  }
  if (given("--runner")) {
    m.runners = f.runners;
    m.synthetic_profile.reset();
  }
  if (given("--synthetic")) {
    m.synthetic_profile = f.synthetic;
    if (!given("--runner")) m.runners.clear();
  }
  if (given("--strategy") || f.manifest.empty()) {
    if (f.strategy == "exhaustive") {
      m.strategy = Exhaustive{};
    } else if (f.strategy == "random") {
      if (f.n == 0) throw UsageError("--strategy random needs --n >= 1");
      m.strategy = RandomSample{f.seed, f.n};
    } else {
      Halving h;
      h.seed = f.seed;
      if (given("--initial-fraction")) h.initial_fraction = f.initial_fraction;
      h.keep_fraction = f.keep_fraction;
      h.rounds = f.rounds;
      if (given("--reps-schedule")) {
        h.reps_schedule = f.reps_schedule;
      } else {
        h.reps_schedule.clear();
        for (int r = 0; r < h.rounds; ++r) {
          h.reps_schedule.push_back(std::max(1, f.reps >> (h.rounds - 1 - r)));
        }
      }
      m.strategy = h;
    }
  }
  if (given("--max-evals")) m.budget.max_evaluations = f.max_evals;
  if (given("--max-wall-ms")) m.budget.max_wall_ms = f.max_wall_ms;
  if (!m.budget.max_evaluations && !m.budget.max_wall_ms) {
    m.budget.max_wall_ms = kDefaultWallBudgetMs;
  }
  if (given("--warmups")) m.plan.warmups = f.warmups;
  if (given("--reps")) m.plan.reps = f.reps;
  if (given("--timeout-ms")) m.plan.timeout_ms = f.timeout_ms;
  if (given("--cache-dir")) m.cache_dir = f.cache_dir;
  if (m.cache_dir.empty()) m.cache_dir = CacheStore::default_root();
  if (given("--out-dir")) m.out_dir = fs::path(f.out_dir);
  if (given("--force")) m.force = true;
  if (given("--parallel-runners")) m.parallel_runners = true;
  try {
    check_strategy(m.strategy);
  } catch (const SearchError& e) {
    throw UsageError(e.what());
  }
  m.check();
  return m;
}

ShapeReport tune_shape(const ConfigSpace& space, const ShapeKey& shape,
                       Evaluator& evaluator, CacheStore& store, const RunManifest& m) {
  ShapeReport report{shape};
  report.key = CacheKey::of(evaluator.fingerprint(), shape).str();
  if (auto hit = store.lookup(evaluator.fingerprint(), shape)) {
    spdlog::info("cache hit for {}", shape.describe());
    report.status = "cached";
    report.result = std::move(hit->result);
    return report;
  }
  spdlog::info("tuning {}", shape.describe());
  TuningResult result = run_search(space, shape, m.strategy, m.budget, evaluator, m.plan);
  report.evaluations = result.counters.evaluated;
  if (result.viable()) {
    report.status = "tuned";
    auto entry = CacheEntry::make(result);
    auto stored = store.store(entry, m.force);
    if (stored.status == StoreStatus::kKeptExisting) {
      spdlog::warn("kept existing cache entry {}: it has a better median", stored.path.string());
    }
    if (m.out_dir) {
      write_text(*m.out_dir / (entry.key.short_str() + ".result.json"),
                 entry.to_json().dump(2) + "\n");
    }
  } else {
    report.status = "no-viable";
  }
  report.result = std::move(result);
  return report;
}

std::unique_ptr<Evaluator> make_evaluator(const RunManifest& m, const ConfigSpace& space,
                                          std::size_t runner_index) {
  if (m.synthetic_profile) {
    return std::make_unique<SyntheticEvaluator>(CostProfile::load(*m.synthetic_profile),
                                                space);
  }
  return std::make_unique<RunnerEvaluator>(m.runners.at(runner_index), space.digest());
}

nlohmann::json report_json(const ShapeReport& r) {
  nlohmann::json j{{"shape", r.shape.to_json()},
                   {"key", r.key},
                   {"status", r.status},
                   {"evaluations", r.evaluations}};
  const auto& res = *r.result;
  j["best"] = res.best ? res.best->to_json() : nlohmann::json();
  j["best_digest"] = res.best ? nlohmann::json(res.best->digest()) : nlohmann::json();
  j["best_median_ms"] = res.best_median_ms ? nlohmann::json(*res.best_median_ms) : nlohmann::json();
  j["counters"] = {{"evaluated", res.counters.evaluated},
                   {"ok", res.counters.ok},
                   {"invalid", res.counters.invalid},
                   {"failed", res.counters.failed}};
  j["time_split"] = {{"total_compile_ms", res.time_split.total_compile_ms},
                     {"total_run_ms", res.time_split.total_run_ms},
                     {"total_wall_ms", res.time_split.total_wall_ms}};
  return j;
}

void print_report(const ShapeReport& r) {
  const auto& res = *r.result;
  std::ostringstream os;
  os << r.shape.describe() << ": " << r.status;
  if (res.best) {
    os << " best " << res.best->describe() << " median " << fmt_ms(*res.best_median_ms) << " ms";
  } else {
    os << " (no viable configuration)";
  }
  os << "; evaluated " << r.evaluations;
  if (r.status == "cached") os << " (cached result explored " << res.counters.evaluated << ")";
  os << " [ok " << res.counters.ok << ", invalid " << res.counters.invalid << ", failed "
     << res.counters.failed << "]; compile " << fmt_ms(res.time_split.total_compile_ms)
     << " ms / run " << fmt_ms(res.time_split.total_run_ms) << " ms / wall "
     << fmt_ms(res.time_split.total_wall_ms) << " ms";
  std::cout << os.str() << '\n';
}

int run_tune(const TuneFlags& flags, const CLI::App& cmd) {
  RunManifest m = build_manifest(flags, cmd);
  ConfigSpace space = load_space(m.space_path);
  CacheStore store(m.cache_dir, [](const std::string& msg) { spdlog::warn("{}", msg); });

  // Shapes are dealt round-robin to runner sessions. Each session is
  // serialized; sessions run concurrently only with --parallel-runners.
  std::vector<std::optional<ShapeReport>> reports(m.shapes.size());
  std::size_t sessions = m.synthetic_profile ? 1 : m.runners.size();
  std::vector<std::exception_ptr> errors(sessions);
  auto session = [&](std::size_t k) {
    try {
      auto evaluator = make_evaluator(m, space, k);
      for (std::size_t i = k; i < m.shapes.size(); i += sessions) {
        reports[i] = tune_shape(space, m.shapes[i], *evaluator, store, m);
      }
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (m.parallel_runners && sessions > 1) {
    std::vector<std::thread> threads;
    for (std::size_t k = 0; k < sessions; ++k) threads.emplace_back(session, k);
    for (auto& t : threads) t.join();
  } else {
    for (std::size_t k = 0; k < sessions; ++k) session(k);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  int code = kExitOk;
  std::uint64_t evaluations = 0;
  nlohmann::json shapes = nlohmann::json::array();
  for (const auto& r : reports) {
    evaluations += r->evaluations;
    if (r->status == "no-viable") code = kExitPartial;
    if (flags.json) {
      shapes.push_back(report_json(*r));
    } else {
      print_report(*r);
    }
  }
  if (flags.json) {
    std::cout << nlohmann::json{{"exit_code", code}, {"evaluations", evaluations},
                                {"cache_dir", m.cache_dir.string()}, {"shapes", shapes}}
                     .dump(2)
              << '\n';
  } else if (code == kExitPartial) {
    std::cout << "some shapes have no viable configuration\n";
  }
  return code;
}

}  // namespace

void add_tune_command(CLI::App& app, int& exit_code) {
  auto flags = std::make_shared<TuneFlags>();
  auto* cmd = app.add_subcommand("tune", "Tune every shape ahead of time, reusing cached results");
  cmd->add_option("--manifest", flags->manifest, "Run manifest (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--space", flags->space, "Space definition file");
  cmd->add_option("--shape", flags->shapes, "Shape as name=value,... (repeatable)");
  cmd->add_option("--shapes", flags->shapes_file, "File with shapes (JSON array or JSON lines)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--runner", flags->runners, "Benchmark runner command (repeatable)");
  cmd->add_option("--synthetic", flags->synthetic, "Use the synthetic cost model profile");
  cmd->add_option("--strategy", flags->strategy, "exhaustive|random|halving")
      ->check(CLI::IsMember({"exhaustive", "random", "halving"}));
  cmd->add_option("--seed", flags->seed, "Seed for random and halving");
  cmd->add_option("--n", flags->n, "Sample size for random");
  cmd->add_option("--initial-fraction", flags->initial_fraction, "Halving first-round fraction");
  cmd->add_option("--keep-fraction", flags->keep_fraction, "Halving survivor fraction");
  cmd->add_option("--rounds", flags->rounds, "Halving rounds");
  cmd->add_option("--reps-schedule", flags->reps_schedule, "Halving repetitions per round")
      ->delimiter(',');
  cmd->add_option("--max-evals", flags->max_evals, "Evaluation budget per shape");
  cmd->add_option("--max-wall-ms", flags->max_wall_ms, "Wall-time budget per shape");
  cmd->add_option("--warmups", flags->warmups, "Warm-up runs per evaluation");
  cmd->add_option("--reps", flags->reps, "Timed repetitions per evaluation");
  cmd->add_option("--timeout-ms", flags->timeout_ms, "Timeout per evaluation");
  cmd->add_option("--cache-dir", flags->cache_dir, "Cache store (default $KTUNE_CACHE_DIR)");
  cmd->add_option("--out-dir", flags->out_dir, "Also write result files here");
  cmd->add_flag("--force", flags->force, "Overwrite cached results even if worse");
  cmd->add_flag("--parallel-runners", flags->parallel, "Fan shapes out across runners");
  cmd->add_flag("--json", flags->json, "Machine-readable output");
  cmd->callback([flags, cmd, &exit_code] { exit_code = run_tune(*flags, *cmd); });
}

}  // namespace ktune::cli
