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

#include "ktune/synthetic.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ktune/digest.hpp"
#include "ktune/error.hpp"

namespace ktune {
namespace {

double number_field(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError("expected a number", where);
  return j.get<double>();
}

// Uniform in [0, 1) from the first 8 bytes of a SHA-256; portable across
// standard libraries, unlike std::uniform_real_distribution.
double hashed_unit(const std::string& key) {
  std::string hex = sha256_hex(key).substr(0, 16);
  std::uint64_t bits = std::stoull(hex, nullptr, 16);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

CostProfile CostProfile::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("cost profile must be a JSON object");
  CostProfile p;
  if (auto it = j.find("device"); it != j.end()) {
    if (!it->is_string() || it->get<std::string>().empty()) {
      throw ParseError("`device` must be a nonempty string", "profile");
    }
    p.device = it->get<std::string>();
  }
  auto base = j.find("base");
  if (base == j.end()) throw ParseError("missing field `base`", "profile");
  if (base->is_number()) {
    p.base_intercept = base->get<double>();
  } else if (base->is_object()) {
    p.base_intercept = number_field(base->value("intercept", nlohmann::json(0.0)),
                                       "base.intercept");
    if (auto c = base->find("coefficients"); c != base->end()) {
      for (const auto& [dim, coef] : c->items()) {
        p.base_coefficients[dim] = number_field(coef, "base.coefficients." + dim);
      }
    }
  } else {
    throw ParseError("`base` must be a number or object", "profile");
  }
  if (auto t = j.find("targets"); t != j.end()) {
    for (const auto& [name, v] : t->items()) {
      Value value = value_from_json(v, "targets." + name);
      if (const auto* i = std::get_if<std::int64_t>(&value); i && *i <= 0) {
        throw ParseError("numeric target must be positive", "targets." + name);
      }
      p.targets[name] = value;
    }
  }
  if (auto w = j.find("weights"); w != j.end()) {
    for (const auto& [name, v] : w->items()) {
      double weight = number_field(v, "weights." + name);
      if (!(weight >= 0.0)) throw ParseError("weight must be >= 0", "weights." + name);
      if (!p.targets.count(name)) {
        throw ParseError("weight for `" + name + "` has no target", "weights");
      }
      p.weights[name] = weight;
    }
  }
  if (auto r = j.find("invalid_rules"); r != j.end()) {
    for (const auto& rule : *r) {
      if (!rule.is_string()) throw ParseError("rules must be strings", "invalid_rules");
      p.invalid_rules.push_back(rule.get<std::string>());
    }
  }
  if (auto n = j.find("noise"); n != j.end() && !n->is_null()) {
    if (auto s = n->find("seed"); s != n->end() && !s->is_null()) {
      p.noise_seed = s->get<std::uint64_t>();
    }
    p.noise_rel = number_field(n->value("rel", nlohmann::json(0.0)), "noise.rel");
    if (p.noise_rel < 0.0 || p.noise_rel >= 0.5) {
      throw ParseError("noise.rel must be in [0, 0.5)", "noise");
    }
  }
  if (auto c = j.find("compile_ms"); c != j.end()) {
    p.compile_ms = number_field(*c, "compile_ms");
    if (p.compile_ms < 0.0) throw ParseError("compile_ms must be >= 0", "profile");
  }
  return p;
}

CostProfile CostProfile::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read cost profile " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return from_json(nlohmann::json::parse(ss.str()));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

nlohmann::json CostProfile::to_json() const {
  nlohmann::json targets = nlohmann::json::object();
  for (const auto& [k, v] : this->targets) targets[k] = ktune::to_json(v);
  nlohmann::json coefs = nlohmann::json::object();
  for (const auto& [k, v] : base_coefficients) coefs[k] = v;
  nlohmann::json weights = nlohmann::json::object();
  for (const auto& [k, v] : this->weights) weights[k] = v;
  nlohmann::json j{{"device", device},
                   {"base", {{"intercept", base_intercept}, {"coefficients", coefs}}},
                   {"targets", targets},
                   {"weights", weights},
                   {"invalid_rules", invalid_rules},
                   {"compile_ms", compile_ms}};
  if (noise_seed || noise_rel > 0.0) {
    j["noise"] = {{"seed", noise_seed ? nlohmann::json(*noise_seed) : nlohmann::json()},
                  {"rel", noise_rel}};
  }
  return j;
}

std::string CostProfile::digest() const { return json_digest(to_json()); }

double CostProfile::base_ms(const ShapeKey& shape) const {
  double base = base_intercept;
  for (const auto& [dim, coef] : base_coefficients) {
    const Value* v = shape.find(dim);
    if (v == nullptr) {
      throw EvalError("cost profile needs shape dimension `" + dim + "`");
    }
    const auto* i = std::get_if<std::int64_t>(v);
    if (i == nullptr) {
      throw EvalError("shape dimension `" + dim + "` must be an integer");
    }
    base += coef * static_cast<double>(*i);
  }
  if (!(base > 0.0)) {
    throw EvalError("base latency must be positive for shape " + shape.describe());
  }
  return base;
}

double CostProfile::weight(std::string_view param) const {
  auto w = weights.find(param);
  if (w != weights.end()) return w->second;
  return targets.count(param) ? 1.0 : 0.0;
}

double synthetic_latency_noise_free(const CostProfile& profile,
                                    const KernelConfig& config,
                                    const ShapeKey& shape) {
  double latency = profile.base_ms(shape);
  for (const auto& [name, value] : config.values()) {
    const auto* iv = std::get_if<std::int64_t>(&value);
    if (iv != nullptr && *iv <= 0) {
      throw EvalError("numeric parameter `" + name + "` must be positive, got " +
                      std::to_string(*iv));
    }
    auto target = profile.targets.find(name);
    if (target == profile.targets.end()) continue;
    double w = profile.weight(name);
    const auto* it = std::get_if<std::int64_t>(&target->second);
    if (iv != nullptr && it != nullptr) {
      double ratio = static_cast<double>(*iv) / static_cast<double>(*it);
      latency *= 1.0 + w * std::fabs(std::log2(ratio));
    } else {
      latency *= 1.0 + w * (value != target->second ? 1.0 : 0.0);
    }
  }
  return latency;
}

double synthetic_latency(const CostProfile& profile, const KernelConfig& config,
                         const ShapeKey& shape, int rep) {
  double latency = synthetic_latency_noise_free(profile, config, shape);
  if (profile.noise_rel > 0.0) {
    std::string key = std::to_string(profile.noise_seed.value_or(0)) + "/" +
                      config.digest() + "/" + shape.digest() + "/" +
                      std::to_string(rep);
    double u = (2.0 * hashed_unit(key) - 1.0) * profile.noise_rel;
    latency *= 1.0 + u;
  }
  return latency;
}

SyntheticEvaluator::SyntheticEvaluator(CostProfile profile, const ConfigSpace& space)
    : profile_(std::move(profile)) {
  for (std::size_t i = 0; i < profile_.invalid_rules.size(); ++i) {
    try {
      rules_.push_back(Constraint::parse(profile_.invalid_rules[i], space.types()));
    } catch (const ParseError& e) {
      throw ParseError("invalid_rules[" + std::to_string(i) + "]: " + e.bare_message(),
                       e.context(), e.position());
    }
  }
  std::string profile_digest = profile_.digest();
  fingerprint_.device_name = profile_.device;
  fingerprint_.driver_version = "synthetic";
  fingerprint_.toolchain_version = profile_digest;
  fingerprint_.runner_id = "synthetic";
  fingerprint_.runner_version = kFrameworkVersion;
  fingerprint_.kernel_source_digest = profile_digest;
  fingerprint_.space_digest = space.digest();
  fingerprint_.protocol_version = kProtocolVersion;
}

std::optional<std::string> SyntheticEvaluator::violated_rule(
    const KernelConfig& config) const {
  for (const auto& rule : rules_) {
    if (rule.evaluate(config)) return rule.source();
  }
  return std::nullopt;
}

EvalOutcome SyntheticEvaluator::evaluate(const KernelConfig& config,
                                         const ShapeKey& shape,
                                         const EvalPlan& plan) {
  ++evaluations_;
  if (plan.reps < 1) return Failure{"reps must be >= 1", false};
  try {
    if (auto rule = violated_rule(config)) return Invalid{"rule: " + *rule};
    std::vector<double> latencies;
    latencies.reserve(plan.reps);
    for (int rep = 0; rep < plan.reps; ++rep) {
      latencies.push_back(synthetic_latency(profile_, config, shape, rep));
    }
    return Ok{Measurement(profile_.compile_ms, std::move(latencies), plan.warmups, 0.0)};
  } catch (const EvalError& e) {
    return Failure{e.what(), false};
  }
}

}  // namespace ktune
