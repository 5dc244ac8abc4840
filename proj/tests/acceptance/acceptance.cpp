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

// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ktune/asmstats.hpp"
#include "ktune/cache.hpp"
#include "ktune/error.hpp"
#include "ktune/report.hpp"
#include "ktune/runner.hpp"
#include "ktune/search.hpp"
#include "ktune/synthetic.hpp"
#include "support.hpp"

namespace {

using namespace ktune;
namespace fs = std::filesystem;
namespace t = ktune::testing;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string secs(double s) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << s << " s";
  return os.str();
}

const EvalPlan kQuick{0, 1, 2000};

// Exhaustive search agrees with a brute-force argmin on random spaces.
Verdict oracle_equivalence() {
  auto start = Clock::now();
  constexpr int kSeeds = 120;
  int match = 0;
  std::string first_miss;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    auto s = t::random_scenario(seed);
    SyntheticEvaluator ev(s.profile, s.space);
    auto r = run_search(s.space, s.shape, Exhaustive{}, {}, ev, kQuick);
    auto want = t::brute_force_best(s);
    if (r.best && want && r.best->digest() == want->digest()) {
      ++match;
    } else if (first_miss.empty()) {
      first_miss = " first miss at seed " + std::to_string(seed);
    }
  }
  double took = seconds_since(start);
  return {match == kSeeds && took < 60.0,
          std::to_string(match) + "/" + std::to_string(kSeeds) + " seeds match in " + secs(took) +
              first_miss};
}

// Two `ktune tune` processes with one manifest: the second is a pure replay.
Verdict cache_replay() {
  t::TempDir dir;
  auto cmd = t::ktune_binary() + " tune --json --manifest " + t::fixture("manifest.json").string() +
             " --cache-dir " + (dir / "cache").string();
  auto start = Clock::now();
  auto first = t::run_command(cmd);
  auto second = t::run_command(cmd);
  double took = seconds_since(start);
  if (first.exit_code != 0 || second.exit_code != 0) {
    return {false, "tune exited " + std::to_string(first.exit_code) + " then " +
                       std::to_string(second.exit_code)};
  }
  auto a = nlohmann::json::parse(first.out), b = nlohmann::json::parse(second.out);
  bool same = a["shapes"].size() == b["shapes"].size() && !a["shapes"].empty();
  std::uint64_t replay_evals = b["evaluations"].get<std::uint64_t>();
  for (std::size_t i = 0; same && i < a["shapes"].size(); ++i) {
    same = a["shapes"][i]["best_digest"] == b["shapes"][i]["best_digest"] &&
           b["shapes"][i]["status"] == "cached" &&
           b["shapes"][i]["evaluations"] == 0;
  }
  return {same && replay_evals == 0 && a["evaluations"].get<std::uint64_t>() > 0 && took < 5.0,
          "first run " + a["evaluations"].dump() + " evaluations, replay " +
              std::to_string(replay_evals) + ", best digests " + (same ? "identical" : "differ") +
              ", " + secs(took)};
}

// Changing any single fingerprint field misses the cache.
Verdict fingerprint_sensitivity() {
  t::TempDir dir;
  CacheStore store(dir.path());
  auto s = t::random_scenario(7);
  SyntheticEvaluator ev(s.profile, s.space);
  auto r = run_search(s.space, s.shape, Exhaustive{}, {}, ev, kQuick);
  store.store(CacheEntry::make(r));
  if (!store.lookup(r.fingerprint, r.shape)) return {false, "baseline lookup missed"};
  int misses = 0;
  std::string hits;
  const auto& fields = EnvFingerprint::field_names();
  for (const auto& name : fields) {
    auto j = r.fingerprint.to_json();
    if (j[name].is_number_integer()) {
      j[name] = j[name].get<int>() + 1;
    } else {
      j[name] = j[name].get<std::string>() + "-mutated";
    }
    if (!store.lookup(EnvFingerprint::from_json(j), r.shape)) {
      ++misses;
    } else {
      hits += " " + name;
    }
  }
  return {misses == 8 && fields.size() == 8,
          std::to_string(misses) + "/" + std::to_string(fields.size()) + " fields miss" +
              (hits.empty() ? "" : "; hit on" + hits)};
}

struct Rule {
  std::string text;
  std::function<bool(const KernelConfig&)> fires;
};

std::int64_t as_int(const KernelConfig& c, const std::string& p) {
  return std::get<std::int64_t>(c.at(p));
}

// Single-parameter rules whose truth is computed here, not by the library.
std::vector<Rule> candidate_rules(const ConfigSpace& space) {
  std::vector<Rule> out;
  for (const auto& p : space.params()) {
    std::string name = p.name();
    if (p.type() == ValueType::kInt) {
      for (std::uint64_t i = 0; i < p.size(); ++i) {
        std::int64_t v = std::get<std::int64_t>(p.value_at(i));
        out.push_back({name + " >= " + std::to_string(v),
                       [name, v](const KernelConfig& c) { return as_int(c, name) >= v; }});
        out.push_back({name + " < " + std::to_string(v),
                       [name, v](const KernelConfig& c) { return as_int(c, name) < v; }});
      }
    } else if (p.type() == ValueType::kString) {
      for (std::uint64_t i = 0; i < p.size(); ++i) {
        std::string v = std::get<std::string>(p.value_at(i));
        out.push_back({name + " == \"" + v + "\"", [name, v](const KernelConfig& c) {
                         return std::get<std::string>(c.at(name)) == v;
                       }});
      }
    } else {
      out.push_back({name, [name](const KernelConfig& c) { return std::get<bool>(c.at(name)); }});
    }
  }
  return out;
}

// Invalid rules covering 10-90% of the grid never leak into a best config,
// and transfer marks exactly the rule violators.
Verdict invalid_safety() {
  int scenarios = 0, bad_best = 0, bad_cells = 0, cells = 0;
  double min_cov = 1.0, max_cov = 0.0;
  std::mt19937_64 rng(99);
  for (std::uint64_t seed = 1; scenarios < 60 && seed < 1000; ++seed) {
    auto s = t::random_scenario(seed);
    auto configs = enumerate(s.space);
    double want_cov = 0.1 + 0.8 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::optional<Rule> rule;
    double cov = 0.0;
    for (auto& r : candidate_rules(s.space)) {
      double c = static_cast<double>(std::count_if(configs.begin(), configs.end(), r.fires)) /
                 static_cast<double>(configs.size());
      if (c < 0.1 || c > 0.9) continue;
      if (!rule || std::abs(c - want_cov) < std::abs(cov - want_cov)) {
        rule = r;
        cov = c;
      }
    }
    if (!rule) continue;
    ++scenarios;
    min_cov = std::min(min_cov, cov);
    max_cov = std::max(max_cov, cov);

    CostProfile ruled = s.profile;
    ruled.invalid_rules = {rule->text};
    ruled.device += "-ruled";
    // Independent oracle over the rule-respecting configs.
    std::optional<KernelConfig> oracle;
    double oracle_ms = 0.0;
    for (const auto& c : configs) {
      if (rule->fires(c)) continue;
      double ms = synthetic_latency_noise_free(s.profile, c, s.shape);
      if (!oracle || ms < oracle_ms || (ms == oracle_ms && c.digest() < oracle->digest())) {
        oracle = c;
        oracle_ms = ms;
      }
    }
    std::vector<SearchStrategy> strategies = {
        Exhaustive{}, RandomSample{seed, std::max<std::uint64_t>(1, configs.size() / 3)},
        Halving{seed, std::nullopt, 0.5, 2, {1, 1}}};
    std::optional<TuningResult> native;
    for (std::size_t k = 0; k < strategies.size(); ++k) {
      SyntheticEvaluator ev(ruled, s.space);
      auto r = run_search(s.space, s.shape, strategies[k], {}, ev, kQuick);
      if (r.best && rule->fires(*r.best)) ++bad_best;
      if (k == 0) {
        if (!r.best || r.best->digest() != oracle->digest()) ++bad_best;
        native = r;
      }
    }

    // Every config of the space, presented as a foreign best.
    SyntheticEvaluator source(s.profile, s.space);
    auto src = run_search(s.space, s.shape, Exhaustive{}, {}, source, kQuick);
    std::vector<TuningResult> from;
    for (const auto& c : configs) {
      auto r = src;
      r.best = c;
      r.trace.clear();
      from.push_back(std::move(r));
    }
    SyntheticEvaluator target(ruled, s.space);
    std::vector<TuningResult> to = {*native};
    auto out = report::transfer_analysis(from, s.space, target, to, kQuick);
    for (std::size_t i = 0; i < out.size(); ++i) {
      ++cells;
      bool violates = rule->fires(configs[i]);
      if (out[i].invalid() != violates) ++bad_cells;
      if (!violates && (!out[i].relative_perf || *out[i].relative_perf > 1.0 + 1e-12)) {
        ++bad_cells;
      }
    }
  }
  std::ostringstream os;
  os << scenarios << " scenarios, rule coverage " << std::lround(min_cov * 100) << "-"
     << std::lround(max_cov * 100) << "%, " << bad_best << " bad best configs, " << bad_cells
     << "/" << cells << " transfer cells wrong";
  return {scenarios >= 50 && bad_best == 0 && bad_cells == 0 && cells > 0, os.str()};
}

// Successive halving with a quarter of the exhaustive budget lands in the
// top 5% of the true ranking.
Verdict halving_quality() {
  auto start = Clock::now();
  constexpr int kSeeds = 100;
  int good = 0;
  std::size_t worst = 0;
  std::uint64_t max_evals = 0;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    auto s = t::five_hundred_point_scenario(seed);
    std::uint64_t total = cardinality(s.space).valid;
    if (total != 500) return {false, "scenario has " + std::to_string(total) + " points"};
    SearchBudget budget;
    budget.max_evaluations = total / 4;
    Halving h;
    h.seed = static_cast<std::uint64_t>(seed);
    h.keep_fraction = 0.25;
    h.rounds = 2;
    h.reps_schedule = {1, 1};
    SyntheticEvaluator ev(s.profile, s.space);
    auto r = run_search(s.space, s.shape, h, budget, ev, kQuick);
    max_evals = std::max(max_evals, r.counters.evaluated);
    if (!r.best || r.counters.evaluated > *budget.max_evaluations) continue;
    std::size_t rank = t::latency_rank(s, *r.best);
    worst = std::max(worst, rank);
    if (rank < total / 20) ++good;
  }
  double took = seconds_since(start);
  return {good >= 95 && took < 120.0,
          std::to_string(good) + "/" + std::to_string(kSeeds) +
              " seeds in top 5% (worst rank " + std::to_string(worst) + ", at most " +
              std::to_string(max_evals) + " evaluations of 500), " + secs(took)};
}

// Crafted listings with counts known by construction, plus operand rewrites.
Verdict asm_counting() {
  fs::path dir = t::fixture("asm");
  auto expected = nlohmann::json::parse(t::read_file(dir / "expected.json"));
  int snippets = 0, exact = 0, stable = 0;
  for (const auto& de : fs::directory_iterator(dir)) {
    if (de.path().extension() == ".json") continue;
    ++snippets;
    std::string name = de.path().filename().string();
    std::string text = t::read_file(de.path());
    auto s = asmstats::stats({name, text});
    if (expected.contains(name) && s.unique_mnemonics == expected[name]["unique"] &&
        s.total_instructions == expected[name]["total"]) {
      ++exact;
    }
    if (asmstats::parse_asm(t::rewrite_operands(text)).mnemonics ==
        asmstats::parse_asm(text).mnemonics) {
      ++stable;
    }
  }
  return {snippets >= 20 && exact == snippets && stable == snippets &&
              static_cast<std::size_t>(snippets) == expected.size(),
          std::to_string(exact) + "/" + std::to_string(snippets) + " exact counts, " +
              std::to_string(stable) + "/" + std::to_string(snippets) +
              " unchanged by operand rewrite"};
}

bool close(double got, double want) { return std::abs(got - want) <= 1e-12 * std::abs(want); }

// Normalization and CDF on a hand-computed table, and CDF scale invariance.
Verdict report_arithmetic() {
  auto table = report::BenchmarkTable::from_csv(
      "impl,batch_size,seq_len,median_ms\n"
      "flash_attn,1,512,2.0\nflash_attn,2,512,3.0\nflash_attn,4,512,5.0\n"
      "triton,1,512,1.0\ntriton,2,512,2.5\ntriton,4,512,4.0\n"
      "flash_attn,4,1024,10.0\nflash_attn,2,1024,6.0\nflash_attn,1,1024,4.0\n"
      "triton,1,1024,5.0\ntriton,2,1024,3.0\ntriton,4,1024,8.0\n");
  const double norm_want[] = {1.0, 1.5, 2.5, 0.5, 1.25, 2.0, 2.5, 1.5, 1.0, 1.25, 0.75, 2.0};
  auto norm = report::normalize(table, "flash_attn");
  int norm_ok = 0;
  for (std::size_t i = 0; i < norm.size() && i < 12; ++i) norm_ok += close(norm[i].normalized, norm_want[i]);
  bool anchors = norm.size() == 12 && norm[0].normalized == 1.0 && norm[8].normalized == 1.0;

  std::vector<report::BenchmarkRow> base, cand;
  for (const auto& r : table.rows()) (r.impl == "triton" ? cand : base).push_back(r);
  auto cdf = report::relative_cdf(cand, base);
  const double ratio_want[] = {0.8, 1.2, 1.25, 1.25, 2.0, 2.0};
  int ratio_ok = 0;
  for (std::size_t i = 0; i < cdf.points.size() && i < 6; ++i) ratio_ok += close(cdf.points[i].ratio, ratio_want[i]);
  bool summary = close(cdf.summary.mean, 8.5 / 6.0) && close(cdf.summary.min, 0.8) &&
                 close(cdf.summary.max, 2.0) && close(cdf.summary.frac_ge_1, 5.0 / 6.0);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ms(0.01, 100.0), scale(1e-3, 1e3);
  int invariant = 0;
  for (int k = 0; k < 50; ++k) {
    std::vector<report::BenchmarkRow> b, c, bs, cs;
    double f = scale(rng);
    int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      ShapeKey shape({{"seq_len", std::int64_t{128} * (i + 1)}});
      double x = ms(rng), y = ms(rng);
      b.push_back({"base", shape, x});
      c.push_back({"cand", shape, y});
      bs.push_back({"base", shape, x * f});
      cs.push_back({"cand", shape, y * f});
    }
    auto p = report::relative_cdf(c, b), q = report::relative_cdf(cs, bs);
    bool same = p.points.size() == q.points.size();
    for (std::size_t i = 0; same && i < p.points.size(); ++i) {
      same = p.points[i].shape == q.points[i].shape && close(q.points[i].ratio, p.points[i].ratio);
    }
    invariant += same;
  }
  return {norm_ok == 12 && anchors && ratio_ok == 6 && summary && invariant == 50,
          std::to_string(norm_ok) + "/12 normalized values, " + std::to_string(ratio_ok) +
              "/6 ratios, summary " + (summary ? "exact" : "wrong") + ", " +
              std::to_string(invariant) + "/50 scaled tables invariant"};
}

// Adversarial profile pairs: a far-off optimum and a platform rule that
// forbids the foreign best.
Verdict transfer_reproduction() {
  auto start = Clock::now();
  ConfigSpace space("transfer",
                    {ParamDomain::pow2_range("BLOCK_M", 16, 256),
                     ParamDomain::int_list("num_warps", {2, 4, 8}),
                     ParamDomain::categorical("order", {"row", "col"})},
                    {});
  auto profile = [](std::string device, std::int64_t block, std::string order, double w,
                    std::vector<std::string> rules) {
    CostProfile p;
    p.device = std::move(device);
    p.base_intercept = 0.5;
    p.base_coefficients = {{"seq_len", 0.001}};
    p.targets = {{"BLOCK_M", block}, {"num_warps", std::int64_t{4}}, {"order", order}};
    p.weights = {{"BLOCK_M", w}, {"num_warps", 0.3}, {"order", w}};
    p.invalid_rules = std::move(rules);
    return p;
  };
  std::vector<ShapeKey> shapes = {ShapeKey::parse("seq_len=512"), ShapeKey::parse("seq_len=4096")};
  auto tune = [&](const CostProfile& p) {
    std::vector<TuningResult> out;
    for (const auto& s : shapes) {
      SyntheticEvaluator ev(p, space);
      out.push_back(run_search(space, s, Exhaustive{}, {}, ev, kQuick));
    }
    return out;
  };
  // Opposite corners of the grid; w = 3 gives (1 + 3 * 4) * (1 + 3) = 52x on B.
  auto a = profile("sim-a", 256, "col", 3.0, {});
  auto b = profile("sim-b", 16, "row", 3.0, {});
  SyntheticEvaluator on_b(b, space);
  auto slow = report::transfer_analysis(tune(a), space, on_b, tune(b), kQuick);
  double worst = 1.0;
  bool slow_ok = slow.size() == shapes.size();
  for (const auto& c : slow) {
    if (!c.relative_perf) {
      slow_ok = false;
      continue;
    }
    worst = std::min(worst, *c.relative_perf);
    slow_ok = slow_ok && close(*c.relative_perf, 1.0 / 52.0);
  }
  // B forbids large tiles outright, so A's best is not even valid there.
  auto b_limited = profile("sim-b-limited", 16, "row", 3.0, {"BLOCK_M > 128"});
  SyntheticEvaluator on_limited(b_limited, space);
  auto missing = report::transfer_analysis(tune(a), space, on_limited, tune(b_limited), kQuick);
  std::size_t invalid = std::count_if(missing.begin(), missing.end(),
                                      [](const auto& c) { return c.invalid(); });
  double took = seconds_since(start);
  std::ostringstream os;
  os << "relative_perf " << worst << " (formula 1/52), " << invalid << "/" << missing.size()
     << " invalid-marker cells, " << secs(took);
  return {slow_ok && worst < 0.1 && invalid >= 1 && took < 5.0, os.str()};
}

std::string fake_runner(const std::string& mode, const std::string& profile,
                        const std::string& space, const std::string& extra = "") {
  return t::fake_runner_binary() + " --profile " + profile + " --space " + space + " --mode " +
         mode + extra;
}

// Injected runner faults map to the documented outcomes, and a 10% flaky
// runner still yields the oracle best.
Verdict protocol_robustness() {
  std::string space_path = t::fixture("flash_attention.space.json").string();
  std::string profile_path = t::fixture("sim_a.profile.json").string();
  ConfigSpace space = load_space(space_path);
  KernelConfig config = *ConfigCursor(space).next();
  ShapeKey shape = ShapeKey::parse("batch_size=2,seq_len=512");
  EvalPlan plan{1, 3, 300};
  RunnerEvaluator::Options opts{1000, 1000};
  std::vector<std::string> wrong;

  // `recovers`: the fault is a one-off, so the restarted runner answers.
  auto expect_failure = [&](const std::string& mode, bool transient, int ok_first,
                            bool recovers) {
    try {
      RunnerEvaluator r(fake_runner(mode, profile_path, space_path), space.digest(), opts);
      auto fp = r.fingerprint();
      for (int i = 0; i < ok_first; ++i) {
        if (!is_ok(r.evaluate(config, shape, plan))) wrong.push_back(mode + " (warm-up)");
      }
      auto o = r.evaluate(config, shape, plan);
      const auto* f = std::get_if<Failure>(&o);
      if (f == nullptr || f->transient != transient) wrong.push_back(mode);
      // The runner comes back with the same identity.
      bool ok = is_ok(r.evaluate(config, shape, plan));
      if (ok != recovers || r.restarts() != 1 || !(r.fingerprint() == fp)) {
        wrong.push_back(mode + " (restart)");
      }
    } catch (const std::exception& e) {
      wrong.push_back(mode + ": " + e.what());
    }
  };
  expect_failure("garbled", false, 0, false);
  expect_failure("silent-eval", true, 0, false);
  expect_failure("die-mid", false, 1, true);
  try {
    RunnerEvaluator r(fake_runner("wrong-version", profile_path, space_path), space.digest(), opts);
    wrong.push_back("wrong-version accepted");
  } catch (const VersionMismatchError&) {
  } catch (const std::exception& e) {
    wrong.push_back(std::string("wrong-version: ") + e.what());
  }
  try {
    RunnerEvaluator r(fake_runner("silent-hello", profile_path, space_path), space.digest(), opts);
    wrong.push_back("silent-hello accepted");
  } catch (const ProtocolError&) {
  }
  // The CLI maps a broken runner to exit 1.
  auto check = t::run_command(t::ktune_binary() + " runner-check --space " + space_path +
                              " --shape batch_size=2,seq_len=512 \"" +
                              fake_runner("garbled", profile_path, space_path) + "\"");
  if (check.exit_code != 1) wrong.push_back("runner-check garbled exit " + std::to_string(check.exit_code));

  // Flaky runner: first attempts of ~10% of the configs hang past the timeout.
  t::TempDir dir;
  t::Scenario s{load_space(t::fixture("rms_norm.space.json").string()),
                CostProfile::from_json(nlohmann::json::parse(R"({
    "device": "sim-flaky",
    "base": {"intercept": 0.2, "coefficients": {"n": 0.0001}},
    "targets": {"BLOCK_SIZE": 1024, "num_warps": 4, "USE_BLOCKED": true, "reduction": "tree"},
    "weights": {"BLOCK_SIZE": 0.7, "num_warps": 0.4, "USE_BLOCKED": 0.2, "reduction": 0.1}})")),
                ShapeKey::parse("n=8192")};
  t::write_file(dir / "flaky.profile.json", s.profile.to_json().dump());
  fs::create_directory(dir / "state");
  std::uint64_t transient = 0;
  bool oracle = false;
  try {
    RunnerEvaluator r(fake_runner("flaky", (dir / "flaky.profile.json").string(),
                                  t::fixture("rms_norm.space.json").string(),
                                  " --fail-rate 0.1 --state-dir " + (dir / "state").string()),
                      s.space.digest(), opts);
    auto result = run_search(s.space, s.shape, Exhaustive{}, {}, r, {0, 2, 200});
    for (const auto& e : result.trace) {
      if (const auto* f = std::get_if<Failure>(&e.outcome); f && f->transient) ++transient;
    }
    auto want = t::brute_force_best(s);
    oracle = result.best && want && result.best->digest() == want->digest();
  } catch (const std::exception& e) {
    wrong.push_back(std::string("flaky: ") + e.what());
  }
  std::string detail = "5 faults, " + std::to_string(wrong.size()) + " wrong";
  for (const auto& w : wrong) detail += "; " + w;
  detail += "; flaky run: " + std::to_string(transient) + " transient failures, best " +
            (oracle ? "matches" : "differs from") + " oracle";
  return {wrong.empty() && transient > 0 && oracle, detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {"oracle_equivalence", oracle_equivalence},
      {"cache_replay", cache_replay},
      {"fingerprint_sensitivity", fingerprint_sensitivity},
      {"invalid_config_safety", invalid_safety},
      {"halving_quality", halving_quality},
      {"asm_counting", asm_counting},
      {"normalization_and_cdf", report_arithmetic},
      {"transfer_reproduction", transfer_reproduction},
      {"protocol_robustness", protocol_robustness},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << c.name << ": " << v.detail << std::endl;
  }
  std::cout << (9 - failed) << "/9 criteria passed" << std::endl;
  return failed;
}
