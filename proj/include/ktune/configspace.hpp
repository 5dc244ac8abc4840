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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ktune/constraint.hpp"
#include "ktune/error.hpp"
#include "ktune/value.hpp"

namespace ktune {

enum class DomainKind { kIntList, kIntRange, kPow2Range, kCategorical, kBoolean };

std::string_view kind_name(DomainKind kind);

// The values one tunable parameter may take. Ranges are not materialized.
class ParamDomain {
 public:
  static ParamDomain int_list(std::string name, std::vector<std::int64_t> values);
  static ParamDomain int_range(std::string name, std::int64_t lo, std::int64_t hi,
                               std::int64_t step = 1);
  static ParamDomain pow2_range(std::string name, std::int64_t lo, std::int64_t hi);
  static ParamDomain categorical(std::string name, std::vector<std::string> values);
  static ParamDomain boolean(std::string name);

  const std::string& name() const { return name_; }
  DomainKind kind() const { return kind_; }
  ValueType type() const;
  std::uint64_t size() const;
  // Values in enumeration order: ascending for ranges, declared for lists,
  // false before true for booleans.
  Value value_at(std::uint64_t index) const;
  bool contains(const Value& v) const;

  // e.g. `pow2-range(16,128)`.
  std::string describe() const;
  nlohmann::json to_json() const;

 private:
  ParamDomain(std::string name, DomainKind kind);

  std::string name_;
  DomainKind kind_;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
  std::int64_t step_ = 1;
  std::vector<Value> list_;
};

// A named, ordered set of parameter domains plus constraints that every
// valid configuration must satisfy. Immutable after construction.
class ConfigSpace {
 public:
  ConfigSpace(std::string name, std::vector<ParamDomain> params,
              const std::vector<std::string>& constraints);

  static ConfigSpace from_json(const nlohmann::json& doc);

  const std::string& name() const { return name_; }
  const std::vector<ParamDomain>& params() const { return params_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const TypeEnv& types() const { return types_; }
  const ParamDomain* find(std::string_view name) const;
  const std::string& digest() const { return digest_; }

  // Canonical document: expanded kind fields, canonical constraint text.
  nlohmann::json to_json() const;
  // Product of domain sizes; throws Error if it does not fit 64 bits.
  std::uint64_t raw_size() const;

 private:
  std::string name_;
  std::vector<ParamDomain> params_;
  std::vector<Constraint> constraints_;
  TypeEnv types_;
  std::string digest_;
};

// Raised by enumeration when a constraint cannot be evaluated on a grid
// point (modulo by zero and the like).
class EnumerationError : public EvalError {
 public:
  EnumerationError(const KernelConfig& config, const Constraint& constraint,
                   const std::string& why);
  const KernelConfig& config() const { return config_; }
  const std::string& constraint() const { return constraint_; }

 private:
  KernelConfig config_;
  std::string constraint_;
};

// Streams the valid points of a space in deterministic order: the cartesian
// product in declared parameter order (first parameter varies slowest).
class ConfigCursor {
 public:
  explicit ConfigCursor(const ConfigSpace& space);

  // Next constraint-satisfying config, or nullopt when exhausted.
  std::optional<KernelConfig> next();
  std::uint64_t visited() const { return visited_; }

 private:
  bool advance();

  const ConfigSpace* space_;
  std::vector<std::uint64_t> index_;
  bool done_ = false;
  std::uint64_t visited_ = 0;
};

struct Cardinality {
  std::uint64_t raw = 0;
  std::uint64_t valid = 0;
};

struct ValidationResult {
  bool valid = true;
  // Human-readable descriptions: failed constraint source text or
  // `name=value not in <domain>`.
  std::vector<std::string> violations;
};

ConfigSpace parse_space(std::string_view text);
ConfigSpace load_space(const std::string& path);
std::vector<KernelConfig> enumerate(const ConfigSpace& space);
// Calls `fn` for each valid config; stop early by returning false.
void for_each_config(const ConfigSpace& space,
                     const std::function<bool(const KernelConfig&)>& fn);
Cardinality cardinality(const ConfigSpace& space);
// Throws StructuralError if `config` misses or adds parameters.
ValidationResult validate(const ConfigSpace& space, const KernelConfig& config);

}  // namespace ktune
