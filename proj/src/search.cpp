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

#include "ktune/search.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>

#include "ktune/error.hpp"

namespace ktune {
namespace {

// Attempts before the hard-failure ratio may abort a search early.
constexpr std::uint64_t kMinAttemptsBeforeAbort = 8;

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  // Rejection sampling; mt19937_64 output is fixed by the standard.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

std::uint64_t ceil_fraction(double fraction, std::uint64_t n) {
  return static_cast<std::uint64_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

bool ranked_before(double ma, const std::string& da, double mb, const std::string& db) {
  return ma < mb || (ma == mb && da < db);
}

// Bookkeeping shared by all strategies: budget checks, retries, trace.
class SearchRun {
 public:
  SearchRun(const ShapeKey& shape, const SearchBudget& budget, Evaluator& evaluator)
      : shape_(shape), budget_(budget), evaluator_(evaluator) {}

  bool budget_left() const {
    if (budget_.max_evaluations && counters_.evaluated >= *budget_.max_evaluations) {
      return false;
    }
    if (budget_.max_wall_ms && wall_ms_ >= *budget_.max_wall_ms) return false;
    return true;
  }

  // Final outcome for `config`, or nullopt if the budget tripped first.
  std::optional<EvalOutcome> attempt(const KernelConfig& config, const EvalPlan& plan,
                                     int round) {
    std::optional<EvalOutcome> last;
    for (int tries = 0; tries < 2; ++tries) {
      if (!budget_left()) {
        budget_tripped_ = true;
        return last;
      }
      EvalOutcome outcome = evaluator_.evaluate(config, shape_, plan);
      record(config, outcome, round);
      const auto* f = std::get_if<Failure>(&outcome);
      last = std::move(outcome);
      if (f == nullptr || !f->transient) break;
    }
    return last;
  }

  void finish() const { check_failures(/*final=*/true); }

  std::vector<TraceEntry>& trace() { return trace_; }
  const std::map<std::string, KernelConfig>& seen() const { return seen_; }
  bool budget_tripped() const { return budget_tripped_; }

 private:
  void record(const KernelConfig& config, const EvalOutcome& outcome, int round) {
    seen_.emplace(config.digest(), config);
    trace_.push_back({config.digest(), outcome, round});
    ++counters_.evaluated;
    wall_ms_ += wall_ms(outcome);
    if (const auto* f = std::get_if<Failure>(&outcome)) {
      ++counters_.failed;
      if (!f->transient) {
        ++hard_failures_;
        last_hard_ = f->reason;
      }
    }
    check_failures(/*final=*/false);
  }

  void check_failures(bool final) const {
    if (counters_.evaluated == 0) return;
    if (!final && counters_.evaluated < kMinAttemptsBeforeAbort) return;
    if (2 * hard_failures_ > counters_.evaluated) {
      throw SearchError("aborting search: " + std::to_string(hard_failures_) + " of " +
                        std::to_string(counters_.evaluated) +
                        " attempts failed hard; last failure: " + last_hard_);
    }
  }

  const ShapeKey& shape_;
  const SearchBudget& budget_;
  Evaluator& evaluator_;
  std::vector<TraceEntry> trace_;
  std::map<std::string, KernelConfig> seen_;
  SearchCounters counters_;
  double wall_ms_ = 0.0;
  std::uint64_t hard_failures_ = 0;
  std::string last_hard_;
  bool budget_tripped_ = false;
};

using Attempt = std::function<std::optional<EvalOutcome>(const KernelConfig&,
                                                         const EvalPlan&)>;

// Returns survivors; `stopped` is set when `attempt` reports a tripped budget.
std::vector<KernelConfig> run_round(std::span<const KernelConfig> candidates, int reps,
                                    double keep_fraction, const EvalPlan& base,
                                    const Attempt& attempt, bool* stopped) {
  EvalPlan plan = base;
  plan.reps = reps;
  struct Scored {
    double median;
    const KernelConfig* config;
  };
  std::vector<Scored> ok;
  for (const auto& c : candidates) {
    auto outcome = attempt(c, plan);
    if (!outcome) {
      if (stopped) *stopped = true;
      break;
    }
    if (const auto* o = std::get_if<Ok>(&*outcome)) {
      ok.push_back({o->measurement.median_ms(), &c});
    }
  }
  std::sort(ok.begin(), ok.end(), [](const Scored& a, const Scored& b) {
    return ranked_before(a.median, a.config->digest(), b.median, b.config->digest());
  });
  std::uint64_t keep = std::min<std::uint64_t>(ceil_fraction(keep_fraction, ok.size()),
                                               ok.size());
  std::vector<KernelConfig> survivors;
  for (std::uint64_t i = 0; i < keep; ++i) survivors.push_back(*ok[i].config);
  return survivors;
}

std::uint64_t planned_evaluations(std::uint64_t n0, const Halving& h) {
  std::uint64_t total = 0;
  std::uint64_t n = n0;
  for (int r = 0; r < h.rounds && n > 0; ++r) {
    total += n;
    n = ceil_fraction(h.keep_fraction, n);
  }
  return total;
}

std::uint64_t initial_sample(const Halving& h, std::uint64_t valid,
                             const SearchBudget& budget) {
  if (h.initial_fraction) {
    return std::clamp<std::uint64_t>(ceil_fraction(*h.initial_fraction, valid), 1, valid);
  }
  if (valid <= 64 || !budget.max_evaluations) return valid;
  std::uint64_t n0 = valid;
  while (n0 > 1 && planned_evaluations(n0, h) > *budget.max_evaluations) --n0;
  return n0;
}

}  // namespace

nlohmann::json to_json(const SearchStrategy& strategy) {
  if (std::holds_alternative<Exhaustive>(strategy)) return {{"name", "exhaustive"}};
  if (const auto* r = std::get_if<RandomSample>(&strategy)) {
    return {{"name", "random"}, {"seed", r->seed}, {"n", r->n}};
  }
  const auto& h = std::get<Halving>(strategy);
  return {{"name", "halving"},
          {"seed", h.seed},
          {"initial_fraction",
           h.initial_fraction ? nlohmann::json(*h.initial_fraction) : nlohmann::json()},
          {"keep_fraction", h.keep_fraction},
          {"rounds", h.rounds},
          {"reps_schedule", h.reps_schedule}};
}

void check_strategy(const SearchStrategy& strategy) {
  if (const auto* r = std::get_if<RandomSample>(&strategy)) {
    if (r->n < 1) throw SearchError("random strategy needs n >= 1");
  } else if (const auto* h = std::get_if<Halving>(&strategy)) {
    if (h->rounds < 1) throw SearchError("halving needs rounds >= 1");
    if (static_cast<int>(h->reps_schedule.size()) != h->rounds) {
      throw SearchError("halving reps_schedule must have one entry per round");
    }
    for (std::size_t i = 0; i < h->reps_schedule.size(); ++i) {
      if (h->reps_schedule[i] < 1 || (i > 0 && h->reps_schedule[i] < h->reps_schedule[i - 1])) {
        throw SearchError("halving reps_schedule must be positive and nondecreasing");
      }
    }
    if (!(h->keep_fraction > 0.0 && h->keep_fraction < 1.0)) {
      throw SearchError("halving keep_fraction must be in (0, 1)");
    }
    if (h->initial_fraction && !(*h->initial_fraction > 0.0 && *h->initial_fraction <= 1.0)) {
      throw SearchError("halving initial_fraction must be in (0, 1]");
    }
  }
}

nlohmann::json SearchBudget::to_json() const {
  return {{"max_evaluations",
           max_evaluations ? nlohmann::json(*max_evaluations) : nlohmann::json()},
          {"max_wall_ms", max_wall_ms ? nlohmann::json(*max_wall_ms) : nlohmann::json()}};
}

SearchCounters count_outcomes(std::span<const TraceEntry> trace) {
  SearchCounters c;
  for (const auto& e : trace) {
    ++c.evaluated;
    if (std::holds_alternative<Ok>(e.outcome)) {
      ++c.ok;
    } else if (std::holds_alternative<Invalid>(e.outcome)) {
      ++c.invalid;
    } else {
      ++c.failed;
    }
  }
  return c;
}

TimeSplit time_split(std::span<const TraceEntry> trace) {
  TimeSplit t;
  for (const auto& e : trace) {
    if (const auto* ok = std::get_if<Ok>(&e.outcome)) {
      t.total_compile_ms += ok->measurement.compile_ms();
      t.total_run_ms += ok->measurement.run_ms();
    }
    t.total_wall_ms += wall_ms(e.outcome);
  }
  return t;
}

std::optional<BestPick> select_best(std::span<const TraceEntry> trace) {
  std::optional<BestPick> best;
  for (const auto& e : trace) {
    const auto* ok = std::get_if<Ok>(&e.outcome);
    if (ok == nullptr) continue;
    double m = ok->measurement.median_ms();
    if (!best || ranked_before(m, e.config_digest, best->median_ms, best->config_digest)) {
      best = BestPick{e.config_digest, m};
    }
  }
  return best;
}

void seeded_shuffle(std::vector<KernelConfig>& configs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = configs.size(); i > 1; --i) {
    std::size_t j = bounded(rng, i);
    std::swap(configs[i - 1], configs[j]);
  }
}

std::vector<KernelConfig> halving_round(std::span<const KernelConfig> candidates,
                                        int reps, double keep_fraction,
                                        Evaluator& evaluator, const ShapeKey& shape,
                                        const EvalPlan& plan,
                                        std::vector<TraceEntry>* trace) {
  if (candidates.empty()) throw SearchError("halving round needs candidates");
  Attempt attempt = [&](const KernelConfig& c, const EvalPlan& p) -> std::optional<EvalOutcome> {
    EvalOutcome outcome = evaluator.evaluate(c, shape, p);
    if (trace) trace->push_back({c.digest(), outcome, 0});
    return outcome;
  };
  return run_round(candidates, reps, keep_fraction, plan, attempt, nullptr);
}

TuningResult run_search(const ConfigSpace& space, const ShapeKey& shape,
                        const SearchStrategy& strategy, const SearchBudget& budget,
                        Evaluator& evaluator, const EvalPlan& plan) {
  check_strategy(strategy);
  if ((budget.max_evaluations && *budget.max_evaluations == 0) ||
      (budget.max_wall_ms && !(*budget.max_wall_ms > 0.0))) {
    throw SearchError("search budget must be positive");
  }

  SearchRun run(shape, budget, evaluator);
  if (std::holds_alternative<Exhaustive>(strategy)) {
    for_each_config(space, [&](const KernelConfig& c) {
      return run.attempt(c, plan, 0).has_value();
    });
  } else if (const auto* r = std::get_if<RandomSample>(&strategy)) {
    auto configs = enumerate(space);
    seeded_shuffle(configs, r->seed);
    std::uint64_t n = std::min<std::uint64_t>(r->n, configs.size());
    for (std::uint64_t i = 0; i < n; ++i) {
      if (!run.attempt(configs[i], plan, 0)) break;
    }
  } else {
    const auto& h = std::get<Halving>(strategy);
    auto configs = enumerate(space);
    seeded_shuffle(configs, h.seed);
    configs.resize(initial_sample(h, configs.size(), budget));
    std::vector<KernelConfig> candidates = std::move(configs);
    for (int round = 0; round < h.rounds && !candidates.empty(); ++round) {
      bool stopped = false;
      Attempt attempt = [&](const KernelConfig& c, const EvalPlan& p) {
        return run.attempt(c, p, round);
      };
      candidates = run_round(candidates, h.reps_schedule[round], h.keep_fraction, plan,
                             attempt, &stopped);
      if (stopped) break;
    }
  }
  run.finish();

  TuningResult result{space.digest(), shape, evaluator.fingerprint()};
  result.trace = std::move(run.trace());
  result.counters = count_outcomes(result.trace);
  result.time_split = time_split(result.trace);
  result.strategy = to_json(strategy);
  result.strategy["budget"] = budget.to_json();
  result.stop_reason = run.budget_tripped() ? "budget" : "exhausted";
  if (auto pick = select_best(result.trace)) {
    result.best = run.seen().at(pick->config_digest);
    result.best_median_ms = pick->median_ms;
  }
  return result;
}

nlohmann::json TuningResult::to_json() const {
  nlohmann::json trace_json = nlohmann::json::array();
  for (const auto& e : trace) {
    trace_json.push_back(
        {{"config", e.config_digest}, {"round", e.round}, {"outcome", ktune::to_json(e.outcome)}});
  }
  return {{"space_digest", space_digest},
          {"shape", shape.to_json()},
          {"fingerprint", fingerprint.to_json()},
          {"viable", viable()},
          {"best", best ? best->to_json() : nlohmann::json()},
          {"best_median_ms", best_median_ms ? nlohmann::json(*best_median_ms) : nlohmann::json()},
          {"trace", trace_json},
          {"counters",
           {{"evaluated", counters.evaluated},
            {"ok", counters.ok},
            {"invalid", counters.invalid},
            {"failed", counters.failed}}},
          {"time_split",
           {{"total_compile_ms", time_split.total_compile_ms},
            {"total_run_ms", time_split.total_run_ms},
            {"total_wall_ms", time_split.total_wall_ms}}},
          {"strategy", strategy},
          {"stop_reason", stop_reason}};
}

TuningResult TuningResult::from_json(const nlohmann::json& j) {
  try {
    TuningResult r{j.at("space_digest").get<std::string>(),
                   ShapeKey::from_json(j.at("shape")),
                   EnvFingerprint::from_json(j.at("fingerprint"))};
    if (const auto& b = j.at("best"); !b.is_null()) r.best = KernelConfig::from_json(b);
    if (const auto& m = j.at("best_median_ms"); !m.is_null()) r.best_median_ms = m.get<double>();
    for (const auto& e : j.at("trace")) {
      r.trace.push_back({e.at("config").get<std::string>(), outcome_from_json(e.at("outcome")),
                         e.value("round", 0)});
    }
    const auto& c = j.at("counters");
    r.counters = {c.at("evaluated").get<std::uint64_t>(), c.at("ok").get<std::uint64_t>(),
                  c.at("invalid").get<std::uint64_t>(), c.at("failed").get<std::uint64_t>()};
    const auto& t = j.at("time_split");
    r.time_split = {t.at("total_compile_ms").get<double>(), t.at("total_run_ms").get<double>(),
                    t.at("total_wall_ms").get<double>()};
    r.strategy = j.at("strategy");
    r.stop_reason = j.value("stop_reason", "exhausted");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed tuning result: ") + e.what());
  } catch (const ProtocolError& e) {
    throw ParseError(std::string("malformed tuning result: ") + e.what());
  }
}

}  // namespace ktune
