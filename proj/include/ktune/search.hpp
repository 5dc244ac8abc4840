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
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ktune/configspace.hpp"
#include "ktune/executor.hpp"

namespace ktune {

struct Exhaustive {};

// Uniform sample of `n` valid configs without replacement.
struct RandomSample {
  std::uint64_t seed = 0;
  std::uint64_t n = 1;
};

// Successive halving: evaluate an initial sample, keep the best
// `keep_fraction` of the ok ones, re-measure them with more repetitions, and
// so on for `rounds` rounds.
struct Halving {
  std::uint64_t seed = 0;
  // Fraction of the valid configs in the first round. When unset: all of
  // them for spaces of at most 64 valid configs, otherwise the largest sample
  // whose planned rounds fit max_evaluations (all of them without a budget).
  std::optional<double> initial_fraction;
  double keep_fraction = 0.5;
  int rounds = 3;
  std::vector<int> reps_schedule = {3, 5, 10};
};

using SearchStrategy = std::variant<Exhaustive, RandomSample, Halving>;

nlohmann::json to_json(const SearchStrategy& strategy);
// Throws SearchError if the strategy's own invariants do not hold.
void check_strategy(const SearchStrategy& strategy);

struct SearchBudget {
  std::optional<std::uint64_t> max_evaluations;
  std::optional<double> max_wall_ms;

  static SearchBudget unlimited() { return {}; }
  nlohmann::json to_json() const;
};

struct TraceEntry {
  std::string config_digest;
  EvalOutcome outcome;
  int round = 0;
};

struct SearchCounters {
  std::uint64_t evaluated = 0;
  std::uint64_t ok = 0;
  std::uint64_t invalid = 0;
  std::uint64_t failed = 0;
};

struct TimeSplit {
  double total_compile_ms = 0.0;
  double total_run_ms = 0.0;
  double total_wall_ms = 0.0;

  double compile_fraction() const {
    return total_wall_ms > 0.0 ? total_compile_ms / total_wall_ms : 0.0;
  }
};

SearchCounters count_outcomes(std::span<const TraceEntry> trace);
TimeSplit time_split(std::span<const TraceEntry> trace);

struct BestPick {
  std::string config_digest;
  double median_ms = 0.0;
};

// Ok entry with the smallest median; ties go to the lexicographically
// smallest config digest. nullopt when nothing ran ok.
std::optional<BestPick> select_best(std::span<const TraceEntry> trace);

// Outcome of a whole search.
struct TuningResult {
  std::string space_digest;
  ShapeKey shape;
  EnvFingerprint fingerprint;
  std::optional<KernelConfig> best;  // nullopt: no viable configuration
  std::optional<double> best_median_ms;
  std::vector<TraceEntry> trace;
  SearchCounters counters;
  TimeSplit time_split;
  nlohmann::json strategy;
  std::string stop_reason;  // "exhausted" or "budget"

  bool viable() const { return best.has_value(); }
  nlohmann::json to_json() const;
  static TuningResult from_json(const nlohmann::json& j);
};

// Explores `space` for `shape` with `strategy` until the candidates run out or
// the budget trips. The budget is checked between evaluations only.
// Transient failures are retried once. Throws SearchError on a zero budget or
// when more than half of the attempts fail hard.
TuningResult run_search(const ConfigSpace& space, const ShapeKey& shape,
                        const SearchStrategy& strategy, const SearchBudget& budget,
                        Evaluator& evaluator, const EvalPlan& plan = {});

// One successive-halving round: evaluates every candidate at `reps`
// repetitions and returns the best ceil(keep_fraction * ok_count) by median
// in ranked order. Invalid and failed candidates are dropped. Appends to
// `trace` when given.
std::vector<KernelConfig> halving_round(std::span<const KernelConfig> candidates,
                                        int reps, double keep_fraction,
                                        Evaluator& evaluator, const ShapeKey& shape,
                                        const EvalPlan& plan = {},
                                        std::vector<TraceEntry>* trace = nullptr);

// Deterministic, standard-library-independent Fisher-Yates shuffle.
void seeded_shuffle(std::vector<KernelConfig>& configs, std::uint64_t seed);

}  // namespace ktune
