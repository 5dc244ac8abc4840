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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ktune/configspace.hpp"
#include "ktune/executor.hpp"

namespace ktune {

// Deterministic desk-scale stand-in for a GPU.
//
//   latency = base(shape)
//           * prod_numeric     (1 + w_p * |log2(v_p / t_p)|)
//           * prod_categorical (1 + w_p * [v_p != t_p])
//           * (1 + u),  u ~ U[-noise_rel, +noise_rel] seeded per repetition
//
// base(shape) = intercept + sum_d coefficient_d * shape[d].
struct CostProfile {
  std::string device = "synthetic";
  double base_intercept = 1.0;
  std::map<std::string, double, std::less<>> base_coefficients;
  std::map<std::string, Value, std::less<>> targets;
  std::map<std::string, double, std::less<>> weights;
  std::vector<std::string> invalid_rules;
  std::optional<std::uint64_t> noise_seed;
  double noise_rel = 0.0;
  double compile_ms = 0.0;

  // File format:
  //   {"base": 10.0 | {"intercept": 1.0, "coefficients": {"seq_len": 0.01}},
  //    "targets": {"BLOCK_M": 64}, "weights": {"BLOCK_M": 1.0},
  //    "invalid_rules": ["BLOCK_M > 256"],
  //    "noise": {"seed": 7, "rel": 0.05},      (optional)
  //    "compile_ms": 400.0, "device": "sim-a"} (optional)
  static CostProfile from_json(const nlohmann::json& j);
  static CostProfile load(const std::string& path);
  nlohmann::json to_json() const;
  std::string digest() const;

  double base_ms(const ShapeKey& shape) const;
  double weight(std::string_view param) const;
};

// Noise-free part of the model: base(shape) times all parameter factors.
// Throws EvalError for non-positive numeric values or a non-positive base.
double synthetic_latency_noise_free(const CostProfile& profile,
                                    const KernelConfig& config,
                                    const ShapeKey& shape);

// Latency of repetition `rep` including seeded noise.
double synthetic_latency(const CostProfile& profile, const KernelConfig& config,
                         const ShapeKey& shape, int rep = 0);

class SyntheticEvaluator final : public Evaluator {
 public:
  SyntheticEvaluator(CostProfile profile, const ConfigSpace& space);

  const EnvFingerprint& fingerprint() const override { return fingerprint_; }
  EvalOutcome evaluate(const KernelConfig& config, const ShapeKey& shape,
                       const EvalPlan& plan) override;
  std::uint64_t evaluations() const override { return evaluations_; }

  const CostProfile& profile() const { return profile_; }
  // Source text of the first invalid rule `config` trips, if any.
  std::optional<std::string> violated_rule(const KernelConfig& config) const;

 private:
  CostProfile profile_;
  std::vector<Constraint> rules_;
  EnvFingerprint fingerprint_;
  std::uint64_t evaluations_ = 0;
};

}  // namespace ktune
